//! Acceptance criteria 1 to 8. Each criterion prints one PASS/FAIL line with
//! its runtime; the test fails if any criterion does.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use scissors_core::ecbox::EcBoxConfig;
use scissors_core::gaussian::symplectic_deviation;
use scissors_core::nla::{build_premeasurement, success_patterns};
use scissors_core::{
    beamsplitter, gaussian_rci, geof_two_mode, herald_nla, herald_probability, phase_rotation, squeezer,
    thermal, thermal_entropy_g, tmsv, EcBox, GaussianState, OnOffPattern, ScissorsConfig, SymplecticOp,
};
use scissors_harness::config::{Config, OracleConfig};
use scissors_harness::oracle;
use scissors_harness::record::{read_csv, EcBoxRecord, SweepRecord};
use scissors_harness::repro::{repro, Figure};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

/// `C_direct(0.01)` and `C_direct(0.1)` as quoted, truncated to seven decimals.
const C_001: f64 = 0.0144995;
const C_01: f64 = 0.1520031;

fn c_direct(eta: f64) -> f64 {
    -(1.0 - eta).log2()
}

fn g(x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let (u, d) = ((x + 1.0) / 2.0, (x - 1.0) / 2.0);
    u * u.log2() - d * d.log2()
}

fn criterion(id: u32, title: &str, budget_s: f64, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let (pass, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    let secs = start.elapsed().as_secs_f64();
    let pass = pass && secs < budget_s;
    // Written past the test harness capture so the lines show in plain `cargo test`.
    let _ = writeln!(
        std::io::stderr(),
        "{} criterion {id}: {title} ({detail}) [{secs:.1} s of {budget_s:.0} s]",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn local_scramble(v: DMatrix<f64>, rng: &mut StdRng) -> GaussianState<f64> {
    let mut s = GaussianState::new(DVector::zeros(4), v).unwrap();
    for mode in 0..2 {
        for op in [
            phase_rotation(rng.random_range(-3.0..3.0), mode, 2).unwrap(),
            squeezer(rng.random_range(-0.8..0.8), mode, 2).unwrap(),
            phase_rotation(rng.random_range(-3.0..3.0), mode, 2).unwrap(),
        ] {
            s = s.apply_symplectic(&op).unwrap();
        }
    }
    s
}

fn standard(a: f64, b: f64, c1: f64, c2: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(4, 4, &[a, c1, 0.0, 0.0, c1, b, 0.0, 0.0, 0.0, 0.0, a, c2, 0.0, 0.0, c2, b])
}

/// EOF of `[[a,c₁],[c₁,b]] ⊕ [[a,c₂],[c₂,b]]` over pure states `G ⊕ G⁻¹`
/// with `P⁻¹ ≤ G ≤ X`, parametrised as `G = P⁻¹ + D^½ U D^½`,
/// `U = R(θ) diag(u₁, u₂) R(θ)ᵀ`, and minimised by multi-start zoomed grids.
fn interval_geof(a: f64, b: f64, c1: f64, c2: f64) -> f64 {
    let x = Matrix2::new(a, c1, c1, b);
    let p_inv = Matrix2::new(a, c2, c2, b).try_inverse().unwrap();
    let eig = (x - p_inv).symmetric_eigen();
    let d_half = eig.eigenvectors
        * Matrix2::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    let f = |q: [f64; 3]| {
        let r = Matrix2::new(q[2].cos(), -q[2].sin(), q[2].sin(), q[2].cos());
        let gm = p_inv + d_half * r * Matrix2::new(q[0], 0.0, 0.0, q[1]) * r.transpose() * d_half;
        gm[(0, 0)] * gm[(1, 1)] / gm.determinant()
    };
    let pi = std::f64::consts::PI;
    let n = 24;
    let mut seeds = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..n {
                let q = [i as f64 / n as f64, j as f64 / n as f64, pi * k as f64 / n as f64];
                seeds.push((f(q), q));
            }
        }
    }
    seeds.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = f64::INFINITY;
    for &(f0, q0) in seeds.iter().take(6) {
        let (mut fc, mut centre) = (f0, q0);
        let mut half = [1.0 / n as f64, 1.0 / n as f64, pi / n as f64];
        let m = 6;
        for _ in 0..120 {
            let mut moved = false;
            for i in 0..=m {
                for j in 0..=m {
                    for k in 0..=m {
                        let at = |c: usize, s: usize| centre[c] - half[c] + 2.0 * half[c] * s as f64 / m as f64;
                        let q = [at(0, i).clamp(0.0, 1.0), at(1, j).clamp(0.0, 1.0), at(2, k)];
                        let v = f(q);
                        if v < fc {
                            fc = v;
                            centre = q;
                            moved = true;
                        }
                    }
                }
            }
            if !moved {
                half = half.map(|h| h * 0.6);
            }
        }
        best = best.min(fc);
    }
    g(best.sqrt())
}

fn max_rci(path: &Path, n: usize) -> Result<SweepRecord, Box<dyn std::error::Error>> {
    read_csv::<SweepRecord>(path)?
        .into_iter()
        .filter(|r| r.n == n)
        .max_by(|a, b| a.rci_g.total_cmp(&b.rci_g))
        .ok_or_else(|| "no records".into())
}

fn optimum(dir: &Path, name: &str, n: usize) -> Result<f64, Box<dyn std::error::Error>> {
    Ok(max_rci(&dir.join(name), n)?.rci_g)
}

fn capacity_exceeded_at_low_transmission() -> Outcome {
    let dir = tempfile::tempdir()?;
    repro(Figure::Fig4a, &Config::default(), dir.path())?;
    let best = max_rci(&dir.path().join("fig4a.csv"), 1)?;
    let quoted = (c_direct(0.01) - C_001).abs() < 1e-7;
    Ok((
        quoted && best.rci_g > 1.5 * C_001,
        format!(
            "max RCI {:.6} at mu={:.4} kappa={:.4e}, 1.5 C_direct = {:.6}",
            best.rci_g,
            best.mu,
            best.kappa,
            1.5 * C_001
        ),
    ))
}

fn two_scissors_ratio() -> Outcome {
    let dir = tempfile::tempdir()?;
    repro(Figure::Fig4b, &Config::default(), dir.path())?;
    let r1 = optimum(dir.path(), "fig4b_optimum.csv", 1)?;
    let r2 = optimum(dir.path(), "fig4b_optimum.csv", 2)?;
    let ratio = r2 / r1;
    Ok(((3.0..=5.0).contains(&ratio), format!("N=1 {r1:.6}, N=2 {r2:.6}, ratio {ratio:.4}")))
}

fn activation_at_eta_point_one() -> Outcome {
    let dir = tempfile::tempdir()?;
    repro(Figure::Fig6, &Config::default(), dir.path())?;
    let r1 = optimum(dir.path(), "fig6_optimum.csv", 1)?;
    let r2 = optimum(dir.path(), "fig6_optimum.csv", 2)?;
    let quoted = (c_direct(0.1) - C_01).abs() < 1e-7;
    let slack = 1e-4;
    Ok((
        quoted && r1 <= C_01 - slack && r2 > C_01 + slack,
        format!("N=1 {r1:.6} <= {:.7}, N=2 {r2:.6} > {:.7}", C_01 - slack, C_01 + slack),
    ))
}

fn no_repeater() -> Outcome {
    let dir = tempfile::tempdir()?;
    repro(Figure::Fig11, &Config::default(), dir.path())?;
    let records = read_csv::<SweepRecord>(&dir.path().join("fig11.csv"))?;
    let mut cells = std::collections::BTreeSet::new();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for r in &records {
        cells.insert((r.eta.to_bits(), r.n));
        let gap = r.rci_g * r.p_succ - c_direct(r.eta);
        worst = worst.max(gap / c_direct(r.eta));
        violations += !(gap < 0.0) as usize;
    }
    Ok((
        violations == 0 && cells.len() == 4 && !records.is_empty(),
        format!(
            "{violations} violations over {} points in {} (eta, N) cells, max RCI x P_succ / C_direct {:.3e}",
            records.len(),
            cells.len(),
            worst + 1.0
        ),
    ))
}

fn oracle_equivalence() -> Outcome {
    let cfg = OracleConfig::default();
    let grid_ok = cfg.mu == [0.05, 0.1, 0.3, 0.5]
        && cfg.kappa == [0.3, 0.5, 0.7]
        && cfg.eta == [0.01, 0.1]
        && cfg.mu_aux == 0.01
        && cfg.cutoff == 12;
    let recs = oracle::run(&cfg)?;
    let tol = 1e-4;
    let worst_p = recs.iter().map(|r| r.p_rel_err).fold(0.0, f64::max);
    let worst_c = recs.iter().map(|r| r.cov_max_rel_err).fold(0.0, f64::max);
    Ok((
        grid_ok && recs.len() == 24 && worst_p <= tol && worst_c <= tol,
        format!("{} points, max P rel err {worst_p:.2e}, max cov rel err {worst_c:.2e}", recs.len()),
    ))
}

fn measure_sanity() -> Outcome {
    let g3 = thermal_entropy_g(3.0f64)?;
    let e_tmsv = geof_two_mode(&tmsv(1.0f64)?)?;
    let mut rng = StdRng::seed_from_u64(2020);
    let mut worst_sym: f64 = 0.0;
    let mut entangled = 0;
    for i in 0..100 {
        let (a, c1, c2, nu) = loop {
            let a: f64 = rng.random_range(1.0..6.0);
            let c1 = rng.random_range(0.3 * a..a);
            let c2 = -c1 * rng.random_range(0.0..1.0);
            // Symplectic eigenvalues √((a ± c₁)(a ± c₂)).
            if (a - c1) * (a - c2) < 1.0 || (a + c1) * (a + c2) < 1.0 {
                continue;
            }
            // Partial transposition flips the sign of c₂.
            let nu = ((a - c1) * (a + c2)).min((a + c1) * (a - c2)).sqrt();
            if i % 3 == 2 || nu < 1.0 {
                break (a, c1, c2, nu);
            }
        };
        entangled += (nu < 1.0) as usize;
        let expect = if nu < 1.0 { g(0.5 * (nu + 1.0 / nu)) } else { 0.0 };
        let got = geof_two_mode(&local_scramble(standard(a, a, c1, c2), &mut rng))?;
        worst_sym = worst_sym.max((got - expect).abs());
    }
    let mut worst_rci = f64::NEG_INFINITY;
    for _ in 0..100 {
        let p = thermal(rng.random_range(0.0..3.0))?.tensor(&thermal(rng.random_range(0.0..3.0))?);
        worst_rci = worst_rci.max(gaussian_rci(&local_scramble(p.cov().clone(), &mut rng))?);
    }
    Ok((
        (g3 - 2.0).abs() <= 1e-12 && (e_tmsv - 2.0).abs() <= 1e-6 && worst_sym <= 1e-5 && worst_rci <= 0.0,
        format!(
            "g(3)-2 = {:.1e}, GEOF(tmsv(1))-2 = {:.1e}, symmetric max err {worst_sym:.1e} ({entangled} entangled), product max RCI {worst_rci:.3e}",
            g3 - 2.0,
            e_tmsv - 2.0
        ),
    ))
}

fn ecbox_properties() -> Outcome {
    let dir = tempfile::tempdir()?;
    let mut cfg = Config::default();
    // Windows do not enter this criterion.
    cfg.ecbox.windows.clear();
    let e = &cfg.ecbox;
    let params_ok = e.eta == 0.01 && e.mu == 0.33 && e.mu_res == 0.33 && e.n == [1, 2];
    repro(Figure::Fig8, &cfg, dir.path())?;
    let rows = read_csv::<EcBoxRecord>(&dir.path().join("fig8.csv"))?;
    let (mu, eta) = (0.33f64, 0.01f64);
    let c = 2.0 * (eta * mu * (1.0 + mu)).sqrt();
    let benchmark = interval_geof(1.0 + 2.0 * mu, 1.0 + 2.0 * eta * mu, c, -c);
    let bench_ok = rows.iter().all(|r| (r.benchmark_eof - benchmark).abs() < 1e-6);
    let convex = rows.iter().filter(|r| r.q2_geof < r.q1_geof).count();
    let n1: Vec<&EcBoxRecord> = rows.iter().filter(|r| r.n == 1).collect();
    let beats = n1.iter().filter(|r| r.q2_geof > benchmark).count();
    let mut shared = 0;
    let mut below = 0;
    for a in &n1 {
        if let Some(b) = rows.iter().find(|b| b.n == 2 && b.g == a.g) {
            shared += 1;
            below += (b.q2_geof < a.q2_geof) as usize;
        }
    }
    Ok((
        params_ok && bench_ok && convex == 0 && beats > 0 && shared == n1.len() && shared > 0 && below == 0,
        format!(
            "{} rows, q2 < q1 on {convex}; N=1 q2 above benchmark {benchmark:.6} at {beats} gains; N=2 below N=1 at {below} of {shared}",
            rows.len()
        ),
    ))
}

fn invariants() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    // Symplectic identities on random circuits.
    let mut rng = StdRng::seed_from_u64(8);
    let mut worst_dev: f64 = 0.0;
    for _ in 0..200 {
        let mut s = SymplecticOp::<f64>::identity(4);
        for _ in 0..10 {
            let (i, j) = (rng.random_range(0..4), rng.random_range(0..3));
            let j = if j >= i { j + 1 } else { j };
            let op = match rng.random_range(0..3) {
                0 => beamsplitter(rng.random_range(0.0..=1.0), (i, j), 4)?,
                1 => squeezer(rng.random_range(-1.0..1.0), i, 4)?,
                _ => phase_rotation(rng.random_range(-3.2..3.2), i, 4)?,
            };
            s = op.compose(&s);
        }
        let scale = s.matrix().amax().powi(2).max(1.0);
        worst_dev = worst_dev.max(symplectic_deviation(s.matrix()) / scale);
        let back = s.inverse().compose(&s);
        worst_dev = worst_dev.max((back.matrix() - DMatrix::identity(8, 8)).amax() / scale);
    }
    ok &= worst_dev < 1e-12;
    notes.push(format!("symplectic dev {worst_dev:.1e}"));

    // Physicality of heralded states and inclusion-exclusion complementarity.
    let mut heralds = 0;
    let mut worst_sum: f64 = 0.0;
    let mut worst_psucc: f64 = 0.0;
    for n in [1, 2] {
        for &(mu, kappa, eta) in &[(0.05, 0.01, 0.01), (0.3, 0.2, 0.1), (1.0, 0.5, 0.5), (2.5, 0.9, 0.9)] {
            let cfg = ScissorsConfig::new(n, kappa, 0.01, eta, mu)?;
            let h = herald_nla(&cfg)?;
            h.result.state()?;
            heralds += 1;
            let (state, layout) = build_premeasurement(&cfg)?;
            let mut detectors: Vec<usize> = Vec::new();
            for i in 0..n {
                let (y, c) = layout.detectors(i);
                detectors.extend([y, c, layout.aux_d[i]]);
            }
            detectors.extend(&layout.check_ports);
            let kept = vec![layout.idler, layout.output];
            let mut total = 0.0f64;
            for mask in 0..1u32 << detectors.len() {
                let on: Vec<usize> = (0..detectors.len()).filter(|k| mask >> k & 1 == 1).map(|k| detectors[k]).collect();
                let off: Vec<usize> = detectors.iter().copied().filter(|m| !on.contains(m)).collect();
                let pat = OnOffPattern::new(off, on, kept.clone());
                total += herald_probability(&state, &pat)?;
            }
            worst_sum = worst_sum.max((total - 1.0).abs());
            let patterns = success_patterns(n).len() as f64;
            let sum: f64 = h.pattern_probabilities.iter().sum();
            worst_psucc = worst_psucc.max((sum - h.p_succ_prime).abs() / h.p_succ_prime);
            ok &= patterns == h.pattern_probabilities.len() as f64;
        }
    }
    let b = EcBox::new(EcBoxConfig::new(0.33f64, 0.33, 0.01, 2, 0.2, 0.01)?)?;
    let avg = b.full_average()?;
    let live = avg.samples.iter().filter(|s| s.1.herald.is_some()).count();
    for (_, s) in &avg.samples {
        if let Some(h) = &s.herald {
            h.state()?;
        }
    }
    heralds += live;
    ok &= worst_sum < 1e-10 && worst_psucc < 1e-12;
    notes.push(format!(
        "{heralds} heralded states physical, pattern-sum err {worst_sum:.1e}, P_succ' split err {worst_psucc:.1e}"
    ));

    // Teleportation identity limit.
    let tele = EcBox::new(EcBoxConfig::new(0.5f64, 1e4, 1.0, 0, 0.5, 0.01)?)?;
    let tavg = tele.full_average()?;
    let (lambda, _) = tavg.optimize_gain(2.0)?;
    let (_, cov) = tavg.q1_moments(1.0)?;
    let cov_err = (cov - tmsv(0.5f64)?.cov()).amax();
    ok &= (lambda - 1.0).abs() < 0.05 && cov_err < 0.05;
    notes.push(format!("teleport gain {lambda:.4}, cov err {cov_err:.1e}"));

    // Bit-identical reruns, also across thread counts.
    let d1 = tempfile::tempdir()?;
    let d2 = tempfile::tempdir()?;
    repro(Figure::Fig4a, &Config::default(), d1.path())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build()?;
    pool.install(|| repro(Figure::Fig4a, &Config::default(), d2.path()))?;
    let same = std::fs::read(d1.path().join("fig4a.csv"))? == std::fs::read(d2.path().join("fig4a.csv"))?;
    let rerun = EcBox::new(EcBoxConfig::new(0.33f64, 0.33, 0.01, 2, 0.2, 0.01)?)?.full_average()?;
    let same_box = rerun.q2(scissors_core::Measure::Geof)?.to_bits() == avg.q2(scissors_core::Measure::Geof)?.to_bits();
    ok &= same && same_box;
    notes.push(format!("reruns identical: sweep {same}, EC box {same_box}"));

    Ok((ok, notes.join("; ")))
}

#[test]
fn acceptance_criteria() {
    let results = [
        criterion(1, "N=1 heralded RCI above 1.5 C_direct at eta=0.01", 300.0, capacity_exceeded_at_low_transmission),
        criterion(2, "optimised RCI ratio N=2/N=1 in [3, 5] at eta=0.01", 1800.0, two_scissors_ratio),
        criterion(3, "activation at eta=0.1 with 1e-4 slack", 1800.0, activation_at_eta_point_one),
        criterion(4, "RCI x P_succ below C_direct on every swept point", 1800.0, no_repeater),
        criterion(5, "Gaussian pipeline matches the Fock oracle within 1e-4", 600.0, oracle_equivalence),
        criterion(6, "entropy, GEOF and RCI sanity", 300.0, measure_sanity),
        criterion(7, "EC-box q2 >= q1, benchmark beaten, N=2 >= N=1", 1800.0, ecbox_properties),
        criterion(8, "invariant suite", 300.0, invariants),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, &p)| !p)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
