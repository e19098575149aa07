//! TOML run configuration. Every section is optional and falls back to the
//! defaults below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

/// One-dimensional parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values { values: Vec<f64> },
    Linear { linear: [f64; 2], points: usize },
    /// Geometric spacing between the endpoints.
    Log { log: [f64; 2], points: usize },
}

impl Grid {
    pub fn log(lo: f64, hi: f64, points: usize) -> Self {
        Self::Log { log: [lo, hi], points }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let spaced = |lo: f64, hi: f64, n: usize, f: &dyn Fn(f64, f64, f64) -> f64| -> Result<Vec<f64>> {
            match n {
                0 => Err(HarnessError::Config("grid needs at least one point".into())),
                1 => Ok(vec![lo]),
                _ => Ok((0..n).map(|i| f(lo, hi, i as f64 / (n - 1) as f64)).collect()),
            }
        };
        let v = match self {
            Self::Values { values } => values.clone(),
            Self::Linear { linear: [lo, hi], points } => spaced(*lo, *hi, *points, &|a, b, t| a + (b - a) * t)?,
            Self::Log { log: [lo, hi], points } => {
                if !(*lo > 0.0 && *hi > 0.0) {
                    return Err(HarnessError::Config("log grid endpoints must be positive".into()));
                }
                spaced(*lo, *hi, *points, &|a, b, t| (a.ln() + (b.ln() - a.ln()) * t).exp())?
            }
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(HarnessError::Config("grid is empty or not finite".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Gaussian RCI.
    Rci,
    /// Gaussian RCI times success probability.
    Product,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub eta: Vec<f64>,
    pub n: Vec<usize>,
    pub mu_aux: f64,
    pub mu: Grid,
    pub kappa: Grid,
    /// Also evaluate the GEOF of every heralded state.
    pub geof: bool,
    /// Fraction of points allowed to fail before the run counts as failed.
    pub max_invalid_fraction: f64,
    /// Points evaluated in parallel between writes.
    pub chunk: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            eta: vec![0.01],
            n: vec![1],
            mu_aux: 0.01,
            mu: Grid::log(0.01, 3.0, 40),
            kappa: Grid::log(1e-4, 0.99, 40),
            geof: false,
            max_invalid_fraction: 0.0,
            chunk: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub eta: f64,
    pub n: usize,
    pub objective: Objective,
    pub mu_aux: f64,
    pub mu_bounds: [f64; 2],
    pub kappa_bounds: [f64; 2],
    /// Coarse-grid seeds refined by the simplex.
    pub restarts: usize,
    pub coarse_mu: usize,
    pub coarse_kappa: usize,
    pub tol: f64,
    pub max_iters: u64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            eta: 0.01,
            n: 1,
            objective: Objective::Rci,
            mu_aux: 0.01,
            mu_bounds: [0.01, 3.0],
            kappa_bounds: [1e-6, 0.99],
            restarts: 5,
            coarse_mu: 10,
            coarse_kappa: 16,
            tol: 1e-6,
            max_iters: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParetoConfig {
    pub eta: f64,
    pub n: Vec<usize>,
    pub mu_aux: f64,
    pub budget: usize,
    pub seed: u64,
    pub mu_bounds: [f64; 2],
    pub kappa_bounds: [f64; 2],
}

impl Default for ParetoConfig {
    fn default() -> Self {
        Self {
            eta: 0.01,
            n: vec![1, 2],
            mu_aux: 0.01,
            budget: 2000,
            seed: 20200601,
            mu_bounds: [0.01, 3.0],
            kappa_bounds: [1e-6, 0.99],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EcBoxRunConfig {
    pub mu: f64,
    pub mu_res: f64,
    pub eta: f64,
    pub n: Vec<usize>,
    pub mu_aux: f64,
    /// Amplitude gains `g` of the amplifier.
    pub gain: Grid,
    /// Base displacement gains, scaled by the optimised multiplier.
    pub gain_a: f64,
    pub gain_b: f64,
    pub nodes: usize,
    /// Post-selection radii for the windowed measures.
    pub windows: Vec<f64>,
    pub window_nodes: [usize; 2],
    pub feed_forward: bool,
}

impl Default for EcBoxRunConfig {
    fn default() -> Self {
        Self {
            mu: 0.33,
            mu_res: 0.33,
            eta: 0.01,
            n: vec![1, 2],
            mu_aux: 0.01,
            gain: Grid::log(1.5, 30.0, 12),
            gain_a: 0.0,
            gain_b: 1.0,
            nodes: 21,
            windows: vec![0.5, 0.2, 0.1, 0.05],
            window_nodes: [12, 24],
            feed_forward: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub mu: Vec<f64>,
    pub kappa: Vec<f64>,
    pub eta: Vec<f64>,
    pub mu_aux: f64,
    pub cutoff: usize,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            mu: vec![0.05, 0.1, 0.3, 0.5],
            kappa: vec![0.3, 0.5, 0.7],
            eta: vec![0.01, 0.1],
            mu_aux: 0.01,
            cutoff: 12,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write wall-clock seconds into the `timing` column. Off by default so
    /// reruns produce identical files.
    pub timing: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub sweep: SweepConfig,
    pub optimize: OptimizeConfig,
    pub pareto: ParetoConfig,
    pub ecbox: EcBoxRunConfig,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::Config(what.to_string()))
    }
}

fn unit_open(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

fn bounds_ok(b: [f64; 2]) -> bool {
    b[0] > 0.0 && b[0] < b[1] && b[1].is_finite()
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        check(!s.eta.is_empty() && s.eta.iter().all(|&e| e > 0.0 && e <= 1.0), "sweep.eta must lie in (0, 1]")?;
        check(!s.n.is_empty() && s.n.iter().all(|&n| n >= 1), "sweep.n must be ≥ 1")?;
        check(s.mu_aux > 0.0, "sweep.mu_aux must be positive")?;
        check(s.mu.values()?.iter().all(|&m| m > 0.0), "sweep.mu must be positive")?;
        check(s.kappa.values()?.iter().all(|&k| unit_open(k)), "sweep.kappa must lie in (0, 1)")?;
        check((0.0..=1.0).contains(&s.max_invalid_fraction), "sweep.max_invalid_fraction must lie in [0, 1]")?;
        check(s.chunk >= 1, "sweep.chunk must be ≥ 1")?;

        let o = &self.optimize;
        check(o.eta > 0.0 && o.eta <= 1.0 && o.n >= 1 && o.mu_aux > 0.0, "optimize: bad eta, n or mu_aux")?;
        check(bounds_ok(o.mu_bounds), "optimize.mu_bounds must be increasing and positive")?;
        check(
            bounds_ok(o.kappa_bounds) && o.kappa_bounds[1] < 1.0,
            "optimize.kappa_bounds must lie in (0, 1)",
        )?;
        check(o.restarts >= 1 && o.coarse_mu >= 2 && o.coarse_kappa >= 2, "optimize: grid and restarts too small")?;
        check(o.tol > 0.0 && o.max_iters > 0, "optimize: tol and max_iters must be positive")?;

        let p = &self.pareto;
        check(p.eta > 0.0 && p.eta <= 1.0 && !p.n.is_empty() && p.n.iter().all(|&n| n >= 1), "pareto: bad eta or n")?;
        check(p.budget >= 100, "pareto.budget must be ≥ 100")?;
        check(bounds_ok(p.mu_bounds) && bounds_ok(p.kappa_bounds) && p.kappa_bounds[1] < 1.0, "pareto: bad bounds")?;

        let e = &self.ecbox;
        check(e.mu > 0.0 && e.mu_res > 0.0 && e.eta > 0.0 && e.eta <= 1.0, "ecbox: bad mu, mu_res or eta")?;
        check(!e.n.is_empty() && e.mu_aux > 0.0, "ecbox: bad n or mu_aux")?;
        check(e.gain.values()?.iter().all(|&g| g > 0.0), "ecbox.gain must be positive")?;
        check(e.nodes >= 2 && e.window_nodes.iter().all(|&k| k >= 1), "ecbox: too few quadrature nodes")?;
        check(e.windows.iter().all(|&w| w >= 0.0), "ecbox.windows must be non-negative")?;

        let q = &self.oracle;
        check(q.mu.iter().all(|&m| m > 0.0) && q.kappa.iter().all(|&k| unit_open(k)), "oracle: bad mu or kappa")?;
        check(q.eta.iter().all(|&e| e > 0.0 && e <= 1.0) && q.mu_aux > 0.0, "oracle: bad eta or mu_aux")?;
        check(q.cutoff >= 2 && q.tolerance > 0.0, "oracle: bad cutoff or tolerance")?;
        Ok(())
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn grids_parse() {
        let c = Config::parse(
            "[sweep]\nmu = { values = [0.1, 0.2] }\nkappa = { linear = [0.1, 0.5], points = 3 }\n",
        )
        .unwrap();
        assert_eq!(c.sweep.mu.values().unwrap(), vec![0.1, 0.2]);
        let k = c.sweep.kappa.values().unwrap();
        assert!((k[1] - 0.3).abs() < 1e-15);
        let g = Grid::log(0.01, 1.0, 3).values().unwrap();
        assert!((g[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn bad_values_rejected() {
        assert!(Config::parse("[sweep]\neta = [1.5]\n").is_err());
        assert!(Config::parse("[sweep]\nbogus = 1\n").is_err());
        assert!(Config::parse("[pareto]\nbudget = 10\n").is_err());
        assert!(Config::parse("[optimize]\nobjective = \"fast\"\n").is_err());
    }

    #[test]
    fn hash_is_stable() {
        let a = Config::parse("[sweep]\neta = [0.1]\n").unwrap();
        let b = Config::parse("[sweep]\neta = [0.1]\n# comment\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), Config::default().hash());
        assert_eq!(a.hash().len(), 64);
    }
}
