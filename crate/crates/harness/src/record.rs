//! Output records and CSV plumbing. Floats are written with 17 significant
//! digits so files round-trip exactly.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// A value that renders into one CSV cell.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        format!("{self:.16e}")
    }
}

impl Cell for usize {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for bool {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for Option<f64> {
    fn cell(&self) -> String {
        self.map(|x| x.cell()).unwrap_or_default()
    }
}

pub trait Record {
    fn header() -> Vec<&'static str>;
    fn row(&self) -> Vec<String>;
}

macro_rules! column {
    ($field:ident) => {
        stringify!($field)
    };
    ($field:ident $col:literal) => {
        $col
    };
}

// A field may carry `["Name"]` to use a different column name.
macro_rules! record {
    ($(#[$meta:meta])* pub struct $name:ident { $($(#[$fmeta:meta])* pub $field:ident $([$col:literal])? : $ty:ty,)* }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct $name { $($(#[$fmeta])* pub $field: $ty,)* }

        impl Record for $name {
            fn header() -> Vec<&'static str> {
                vec![$(column!($field $($col)?)),*]
            }
            fn row(&self) -> Vec<String> {
                vec![$(self.$field.cell()),*]
            }
        }
    };
}

record! {
    /// One point of the `(μ, κ)` plane.
    pub struct SweepRecord {
        pub eta: f64,
        #[serde(rename = "N")]
        pub n ["N"]: usize,
        pub mu: f64,
        pub kappa: f64,
        pub mu_aux: f64,
        /// Gaussian RCI in ebits.
        pub rci_g: f64,
        pub p_succ: f64,
        pub p_succ_prime: f64,
        /// False when the renormalised `p_succ` exceeds 1.
        pub p_succ_valid: bool,
        pub geof: Option<f64>,
        pub product: f64,
        pub timing: f64,
    }
}

record! {
    pub struct ParetoPoint {
        #[serde(rename = "N")]
        pub n ["N"]: usize,
        pub p_succ: f64,
        pub best_rci: f64,
        pub arg_mu: f64,
        pub arg_kappa: f64,
    }
}

record! {
    /// EC box at one amplifier gain.
    pub struct EcBoxRecord {
        #[serde(rename = "N")]
        pub n ["N"]: usize,
        pub g: f64,
        pub kappa: f64,
        pub eta_effec: f64,
        pub mu: f64,
        pub mu_res: f64,
        pub eta: f64,
        pub mu_aux: f64,
        pub p_succ: f64,
        pub gain_multiplier: f64,
        pub q1_geof: f64,
        pub q2_geof: f64,
        pub q2_rci: f64,
        pub benchmark_eof: f64,
        pub timing: f64,
    }
}

record! {
    /// Post-selected measures on the disc `|γ| ≤ window`.
    pub struct WindowRecord {
        #[serde(rename = "N")]
        pub n ["N"]: usize,
        pub g: f64,
        pub eta_effec: f64,
        pub window: f64,
        /// Share of the successful runs that fall inside the window.
        pub acceptance: f64,
        pub q2_rci: f64,
        pub q2_geof: f64,
    }
}

record! {
    /// Gaussian pipeline against the Fock oracle at one point.
    pub struct OracleRecord {
        pub mu: f64,
        pub kappa: f64,
        pub eta: f64,
        pub mu_aux: f64,
        pub cutoff: usize,
        pub p_gauss: f64,
        pub p_fock: f64,
        pub p_rel_err: f64,
        pub cov_max_rel_err: f64,
        pub input_tail: f64,
        pub output_tail: f64,
        pub pass: bool,
    }
}

fn builder() -> csv::WriterBuilder {
    let mut b = csv::WriterBuilder::new();
    b.terminator(csv::Terminator::Any(b'\n'));
    b
}

/// Streams records to a CSV file.
pub struct CsvSink {
    writer: csv::Writer<File>,
}

impl CsvSink {
    /// Creates (truncating) `path` and writes the header.
    pub fn create<R: Record>(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
        let mut writer = builder().from_writer(file);
        writer.write_record(R::header())?;
        Ok(Self { writer })
    }

    /// Opens `path` for appending; the header must already be there.
    pub fn append(path: &Path) -> Result<Self> {
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| HarnessError::io(path, e))?;
        Ok(Self {
            writer: builder().has_headers(false).from_writer(file),
        })
    }

    pub fn write<R: Record>(&mut self, record: &R) -> Result<()> {
        self.writer.write_record(record.row())?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.writer.flush().map_err(|e| HarnessError::io("csv output", e))
    }
}

pub fn write_csv<R: Record>(path: &Path, records: &[R]) -> Result<()> {
    let mut sink = CsvSink::create::<R>(path)?;
    for r in records {
        sink.write(r)?;
    }
    sink.flush()
}

/// Reads back a file written by [`CsvSink`].
pub fn read_csv<R: Record + for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<R>> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(HarnessError::from)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != R::header() {
        return Err(HarnessError::Resume(format!("unexpected header in {}", path.display())));
    }
    reader.deserialize().map(|r| r.map_err(HarnessError::from)).collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| HarnessError::io(path, e))
}
