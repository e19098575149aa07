//! Error-correction box: one arm of a TMSV teleported over an
//! NLA-corrected lossy resource.
//!
//! Mode order of the joint state before the Bell measurement:
//!
//! ```text
//! A, In, R₁, then the amplifier modes after its idler
//! ```
//!
//! `(A, In)` is the input TMSV and `(R₁, R₂)` the resource; `R₂` plays the
//! signal of the amplifier (or goes straight to `B` when there is none) and
//! `R₁` plays its idler. The dual homodyne mixes `In` with `R₁` and reads
//! `x` on `R₁`, `p` on `In`. After conditioning the remaining modes line up
//! with the amplifier layout, with `A` in the idler slot, so the amplifier's
//! detection patterns apply unchanged.

use nalgebra::{DMatrix, DVector, Matrix2};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{beamsplitter, tmsv, GaussianMeasurement, GaussianState};
use crate::herald::{herald_mixture, HeraldResult, OnOffPattern, SignedGaussianMixture};
use crate::linalg::select_rows_cols;
use crate::measures::{gaussian_rci, geof_two_mode, pt_min_eigenvalue};
use crate::nla::{pattern_states, renormalized_success, NlaOptions, ScissorsConfig};
use crate::optim::golden_section;
use crate::quadrature::{disc_rule, gaussian_rule, Rule2D};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcBoxConfig<T: Real> {
    /// Input TMSV mean photon number.
    pub mu: T,
    /// Resource TMSV mean photon number.
    pub mu_res: T,
    pub eta: T,
    /// Number of scissors; 0 means no amplifier.
    pub n: usize,
    pub kappa: T,
    pub mu_aux: T,
    /// Displacement gains. Unit gain on `B` is ideal teleportation.
    pub gain_a: T,
    pub gain_b: T,
    /// Post-selection radius on `|γ|`.
    pub window: Option<T>,
    /// Gauss–Hermite nodes per outcome axis.
    pub nodes: usize,
    pub feed_forward: bool,
}

impl<T: Real> EcBoxConfig<T> {
    pub fn new(mu: T, mu_res: T, eta: T, n: usize, kappa: T, mu_aux: T) -> Result<Self> {
        let cfg = Self {
            mu,
            mu_res,
            eta,
            n,
            kappa,
            mu_aux,
            gain_a: T::zero(),
            gain_b: T::one(),
            window: None,
            nodes: 21,
            feed_forward: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > T::zero() && self.mu.is_finite()) {
            return Err(invalid("mu", "must be positive and finite"));
        }
        if !(self.mu_res > T::zero() && self.mu_res.is_finite()) {
            return Err(invalid("mu_res", "must be positive and finite"));
        }
        if !(self.eta > T::zero() && self.eta <= T::one()) {
            return Err(invalid("eta", "not in (0, 1]"));
        }
        if let Some(w) = self.window {
            if !(w >= T::zero()) {
                return Err(invalid("window", "must be non-negative"));
            }
        }
        if self.nodes == 0 {
            return Err(invalid("nodes", "must be positive"));
        }
        if !(self.gain_a.is_finite() && self.gain_b.is_finite()) {
            return Err(invalid("gain", "must be finite"));
        }
        self.scissors().map(|_| ())
    }

    /// Amplifier acting on the resource arm, if any.
    pub fn scissors(&self) -> Result<Option<ScissorsConfig<T>>> {
        if self.n == 0 {
            return Ok(None);
        }
        ScissorsConfig::new(self.n, self.kappa, self.mu_aux, self.eta, self.mu_res).map(Some)
    }

    /// Amplitude gain of the amplifier, 1 without one.
    pub fn nla_gain(&self) -> Result<T> {
        Ok(self.scissors()?.map_or(T::one(), |s| s.gain()))
    }
}

/// `g² η χ²` with `χ = tanh(asinh √μ_res)`.
pub fn effective_transmission<T: Real>(g: T, eta: T, mu_res: T) -> T {
    let chi = mu_res.sqrt().asinh().tanh();
    g * g * eta * chi * chi
}

/// GEOF of a TMSV with one arm sent through loss `eta`.
pub fn lossy_tmsv_geof<T: Real>(mu: T, eta: T) -> Result<T> {
    geof_two_mode(&tmsv(mu)?.pure_loss(eta, 1)?)
}

/// 50:50 on `(b, a)` followed by ideal `x` on `a` and `p` on `b`.
/// Returns the state of the other modes and the density of `γ`.
pub fn dual_homodyne<T: Real>(
    state: &GaussianState<T>,
    modes: (usize, usize),
    gamma: [T; 2],
) -> Result<(GaussianState<T>, T)> {
    let n = state.num_modes();
    let mixed = state.apply_symplectic(&beamsplitter(T::lit(0.5), (modes.1, modes.0), n)?)?;
    let c = mixed.condition(&GaussianMeasurement::dual_homodyne(modes, gamma[0], gamma[1]))?;
    let rest = c
        .state
        .ok_or_else(|| Error::InvalidModes("dual homodyne leaves no modes".into()))?;
    Ok((rest, c.density))
}

/// Heralded `(A, B)` state at one Bell-measurement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalHerald<T: Real> {
    pub gamma: [T; 2],
    /// Outcome density `p(γ)`.
    pub density: T,
    /// `P_succ(γ)`, 1 without an amplifier.
    pub success: T,
    /// `p(γ)·P_succ(γ)`.
    pub density_weight: T,
    /// Moments after the displacement correction; `None` when they cannot be
    /// resolved numerically at this outcome (far tails of tiny heralds).
    pub herald: Option<HeraldResult<T>>,
}

/// Prepared EC box: the joint state is built once per configuration.
#[derive(Debug, Clone)]
pub struct EcBox<T: Real> {
    cfg: EcBoxConfig<T>,
    scissors: Option<ScissorsConfig<T>>,
    /// Joint states after the Bell beamsplitter, one per success pattern.
    branches: Vec<(GaussianState<T>, OnOffPattern)>,
    outcome_cov: Matrix2<T>,
    /// Unconditional herald probability `P_succ′`.
    p_prime: T,
    coverage_tol: f64,
}

const R1: usize = 2;
const IN: usize = 1;

impl<T: Real> EcBox<T> {
    pub fn new(cfg: EcBoxConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let scissors = cfg.scissors()?;
        let receiver = match &scissors {
            Some(s) => pattern_states(
                s,
                NlaOptions {
                    feed_forward: cfg.feed_forward,
                },
            )?,
            None => vec![(
                tmsv(cfg.mu_res)?.pure_loss(cfg.eta, 1)?,
                OnOffPattern::new(vec![], vec![], vec![0, 1]),
            )],
        };
        let mut p_prime = T::zero();
        let mut magnitude = 0.0;
        for (state, pattern) in &receiver {
            let m = herald_mixture(state, pattern)?;
            p_prime += m.total_weight;
            magnitude += m.components.iter().map(|c| c.weight.as_f64().abs()).sum::<f64>();
        }
        // Inclusion–exclusion cancels terms far larger than the result; the
        // coverage check cannot be tighter than that cancellation allows.
        let coverage_tol = (4.0 * f64::EPSILON * magnitude / p_prime.as_f64()).max(1e-6);
        let input = tmsv(cfg.mu)?;
        let branches = receiver
            .into_iter()
            .map(|(state, pattern)| {
                let joint = input.tensor(&state);
                let n = joint.num_modes();
                let mixed = joint.apply_symplectic(&beamsplitter(T::lit(0.5), (IN, R1), n)?)?;
                Ok((mixed, pattern))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = branches[0].0.num_modes();
        let meas = GaussianMeasurement::<T>::dual_homodyne((R1, IN), T::zero(), T::zero());
        let q = meas.measured_quadratures(n);
        let v = select_rows_cols(branches[0].0.cov(), &q, &q) * T::lit(0.5);
        let outcome_cov = Matrix2::new(v[(0, 0)], v[(0, 1)], v[(1, 0)], v[(1, 1)]);
        Ok(Self {
            cfg,
            scissors,
            branches,
            outcome_cov,
            p_prime,
            coverage_tol,
        })
    }

    pub fn config(&self) -> &EcBoxConfig<T> {
        &self.cfg
    }

    /// Covariance of the outcome `γ`, which is a centred Gaussian.
    pub fn outcome_cov(&self) -> Matrix2<T> {
        self.outcome_cov
    }

    /// Unconditional `P_succ`, 1 without an amplifier.
    pub fn success_probability(&self) -> T {
        self.normalize(self.p_prime)
    }

    /// Relative tolerance of the coverage check.
    pub fn coverage_tolerance(&self) -> f64 {
        self.coverage_tol
    }

    fn normalize(&self, p_prime: T) -> T {
        match &self.scissors {
            Some(s) => renormalized_success(s, p_prime),
            None => p_prime,
        }
    }

    /// Correction added to the `(x_A, x_B, p_A, p_B)` means at outcome `γ`.
    pub fn correction(&self, gamma: [T; 2], gain_a: T, gain_b: T) -> DVector<T> {
        corrected_shift(gamma, gain_a, gain_b)
    }

    /// Uncorrected conditional mixture and the outcome density.
    fn conditional_mixture(&self, gamma: [T; 2]) -> Result<(SignedGaussianMixture<T>, T)> {
        let meas = GaussianMeasurement::dual_homodyne((R1, IN), gamma[0], gamma[1]);
        let mut density = T::zero();
        let mut parts = Vec::with_capacity(self.branches.len());
        for (state, pattern) in &self.branches {
            let c = state.condition(&meas)?;
            density = c.density;
            let rest = c.state.ok_or(Error::SingularMeasurement)?;
            parts.push(herald_mixture(&rest, pattern)?);
        }
        Ok((SignedGaussianMixture::merge(parts), density))
    }

    /// Heralded state at `γ` with the configured gains applied.
    pub fn herald_at(&self, gamma: [T; 2]) -> Result<ConditionalHerald<T>> {
        self.herald_with_gains(gamma, self.cfg.gain_a, self.cfg.gain_b)
    }

    pub fn herald_with_gains(&self, gamma: [T; 2], gain_a: T, gain_b: T) -> Result<ConditionalHerald<T>> {
        let (mixture, density) = self.conditional_mixture(gamma)?;
        let success = self.normalize(mixture.total_weight);
        let d = self.correction(gamma, gain_a, gain_b);
        // Moments come from the uncorrected mixture so the covariance does not
        // depend on the gains at all.
        let herald = match HeraldResult::from_mixture(mixture) {
            Ok(mut h) => {
                h.mean += &d;
                h.mixture = h.mixture.displaced(&d);
                Some(h)
            }
            Err(Error::HeraldImpossible(_)) | Err(Error::MomentPrecisionLoss(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(ConditionalHerald {
            gamma,
            density,
            success,
            density_weight: density * success,
            herald,
        })
    }

    /// Gauss–Hermite samples over the whole outcome plane, weighted by
    /// `p(γ)·P_succ(γ)`. The rule must recover the unconditional success
    /// probability to 1e-6, or to the cancellation floor of the herald when
    /// that is coarser; the node count starts at the configured value and
    /// grows by 10 per axis up to three times before giving up.
    pub fn full_average(&self) -> Result<OutcomeSamples<T>> {
        let mut last = 0.0;
        for step in 0..4 {
            let rule = gaussian_rule(&self.outcome_cov, self.cfg.nodes + 10 * step)?;
            let samples = self.sample(&rule, |w, h| w * h.success)?;
            let coverage = samples.total_weight().as_f64() / self.success_probability().as_f64();
            let dropped = samples.dropped_weight().as_f64() / samples.total_weight().as_f64();
            if (coverage - 1.0).abs() <= self.coverage_tol && dropped <= 1e-6 {
                return Ok(samples);
            }
            last = coverage;
        }
        Err(Error::GridCoverage(last))
    }

    /// Samples on the disc `|γ| ≤ radius`.
    pub fn windowed(&self, radius: T, n_radial: usize, n_angular: usize) -> Result<OutcomeSamples<T>> {
        if radius == T::zero() {
            let h = self.herald_at([T::zero(), T::zero()])?;
            if h.herald.is_none() {
                return Err(Error::EmptyWindow);
            }
            return Ok(OutcomeSamples {
                gain_a: self.cfg.gain_a,
                gain_b: self.cfg.gain_b,
                samples: vec![(T::one(), h)],
            });
        }
        let rule = disc_rule(radius, n_radial, n_angular)?;
        let samples = self.sample(&rule, |w, h| w * h.density_weight)?;
        if !(samples.live_weight() > T::zero()) {
            return Err(Error::EmptyWindow);
        }
        Ok(samples)
    }

    /// Full average, or the configured window when one is set.
    pub fn samples(&self) -> Result<OutcomeSamples<T>> {
        match self.cfg.window {
            Some(w) => self.windowed(w, 12, 24),
            None => self.full_average(),
        }
    }

    fn sample<F>(&self, rule: &Rule2D<T>, weight: F) -> Result<OutcomeSamples<T>>
    where
        F: Fn(T, &ConditionalHerald<T>) -> T + Sync,
    {
        let samples = rule
            .nodes
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(g, w)| {
                let h = self.herald_at(*g)?;
                Ok((weight(*w, &h), h))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OutcomeSamples {
            gain_a: self.cfg.gain_a,
            gain_b: self.cfg.gain_b,
            samples,
        })
    }
}

/// Weighted conditional heralds over a set of outcomes.
#[derive(Debug, Clone)]
pub struct OutcomeSamples<T: Real> {
    gain_a: T,
    gain_b: T,
    /// Unnormalized weight and heralded state per node.
    pub samples: Vec<(T, ConditionalHerald<T>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Geof,
    Rci,
}

impl<T: Real> OutcomeSamples<T> {
    pub fn total_weight(&self) -> T {
        self.samples.iter().fold(T::zero(), |acc, (w, _)| acc + *w)
    }

    /// Weight of nodes whose moments could not be resolved.
    pub fn dropped_weight(&self) -> T {
        self.samples
            .iter()
            .filter(|(_, c)| c.herald.is_none())
            .fold(T::zero(), |acc, (w, _)| acc + *w)
    }

    fn live_weight(&self) -> T {
        self.total_weight() - self.dropped_weight()
    }

    fn live(&self) -> impl Iterator<Item = (T, &ConditionalHerald<T>, &HeraldResult<T>)> {
        self.samples
            .iter()
            .filter_map(|(w, c)| c.herald.as_ref().map(|h| (*w, c, h)))
    }

    /// Moments of the average state for gains scaled by `lambda`:
    /// mean of the conditional covariances plus twice the covariance of the
    /// corrected means.
    pub fn q1_moments(&self, lambda: T) -> Result<(DVector<T>, DMatrix<T>)> {
        let total = self.live_weight();
        if !(total > T::zero()) {
            return Err(Error::EmptyWindow);
        }
        let (ga, gb) = (self.gain_a * lambda, self.gain_b * lambda);
        let corrected: Vec<(T, DVector<T>, &DMatrix<T>)> = self
            .live()
            .map(|(w, c, h)| {
                // stored means already carry the configured gains
                let d = corrected_shift(c.gamma, ga - self.gain_a, gb - self.gain_b);
                (w / total, &h.mean + d, &h.cov)
            })
            .collect();
        let mut mean = DVector::zeros(4);
        let mut cov = DMatrix::zeros(4, 4);
        for (w, m, v) in &corrected {
            mean += m * *w;
            cov += *v * *w;
        }
        for (w, m, _) in &corrected {
            let dm = m - &mean;
            cov += &dm * dm.transpose() * (*w * T::lit(2.0));
        }
        Ok((mean, cov))
    }

    /// GEOF of the average state.
    pub fn q1_geof(&self, lambda: T) -> Result<T> {
        let (mean, cov) = self.q1_moments(lambda)?;
        geof_two_mode(&GaussianState::new(mean, cov)?)
    }

    /// Average of a measure over the conditional covariances.
    pub fn q2(&self, measure: Measure) -> Result<T> {
        let total = self.live_weight();
        if !(total > T::zero()) {
            return Err(Error::EmptyWindow);
        }
        let terms = self
            .samples
            .par_iter()
            .filter(|(w, c)| c.herald.is_some() && *w != T::zero())
            .map(|(w, c)| {
                let h = c.herald.as_ref().expect("filtered");
                let state = GaussianState::new(DVector::zeros(4), h.cov.clone())?;
                let m = match measure {
                    Measure::Geof => geof_two_mode(&state)?,
                    Measure::Rci => gaussian_rci(&state)?,
                };
                Ok(*w * m)
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(terms.into_iter().fold(T::zero(), |a, b| a + b) / total)
    }

    /// Gain multiplier in `[0, hi]` maximising the GEOF of the average state,
    /// with that GEOF.
    pub fn optimize_gain(&self, hi: f64) -> Result<(T, T)> {
        // Separable states score 1 − ν̃_min ≤ 0 so the objective stays
        // continuous across the entanglement boundary.
        let objective = |lambda: f64| -> f64 {
            let Ok((mean, cov)) = self.q1_moments(T::lit(lambda)) else {
                return f64::INFINITY;
            };
            let Ok(state) = GaussianState::new(mean, cov) else {
                return f64::INFINITY;
            };
            match (geof_two_mode(&state), pt_min_eigenvalue(&state)) {
                (Ok(e), _) if e.as_f64() > 0.0 => -e.as_f64(),
                (_, Ok(nu)) => nu.as_f64() - 1.0,
                _ => f64::INFINITY,
            }
        };
        let (lambda, _) = golden_section(objective, 0.0, hi, 1e-6);
        let lambda = T::lit(lambda);
        Ok((lambda, self.q1_geof(lambda)?))
    }
}

fn corrected_shift<T: Real>(gamma: [T; 2], da: T, db: T) -> DVector<T> {
    let s = T::lit(std::f64::consts::SQRT_2);
    let (gx, gy) = (gamma[0] * s, gamma[1] * s);
    DVector::from_vec(vec![-da * gx, -db * gx, -da * gy, db * gy])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herald::q_moments;
    use crate::nla::herald_nla;

    fn teleport(mu_res: f64, eta: f64) -> EcBox<f64> {
        EcBox::new(EcBoxConfig::new(0.5, mu_res, eta, 0, 0.5, 0.01).unwrap()).unwrap()
    }

    #[test]
    fn effective_transmission_values() {
        assert!((effective_transmission(2.0f64, 0.01, 0.33) - 0.04 * 0.33 / 1.33).abs() < 1e-15);
        assert_eq!(effective_transmission(0.0f64, 0.3, 1.0), 0.0);
        assert!((effective_transmission(1.0f64, 0.3, 1e12) - 0.3).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(EcBoxConfig::new(0.0f64, 1.0, 0.5, 1, 0.5, 0.1).is_err());
        assert!(EcBoxConfig::new(1.0f64, 1.0, 0.0, 1, 0.5, 0.1).is_err());
        assert!(EcBoxConfig::new(1.0f64, 1.0, 0.5, 1, 1.5, 0.1).is_err());
        let mut c = EcBoxConfig::new(1.0f64, 1.0, 0.5, 1, 0.5, 0.1).unwrap();
        c.window = Some(-1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn dual_homodyne_on_vacuum_pair() {
        let v = crate::gaussian::vacuum::<f64>(2).unwrap();
        let t = tmsv(1.0f64).unwrap().tensor(&v);
        let (rest, p) = dual_homodyne(&t, (2, 1), [0.0, 0.0]).unwrap();
        assert_eq!(rest.num_modes(), 2);
        assert!(rest.mean().amax() < 1e-15);
        assert!(p > 0.0);
    }

    #[test]
    fn ideal_teleportation_limit() {
        let avg = teleport(1e4, 1.0).full_average().unwrap();
        let (mean, cov) = avg.q1_moments(1.0).unwrap();
        let target = tmsv(0.5f64).unwrap();
        assert!(mean.amax() < 1e-8);
        assert!((cov - target.cov()).amax() < 0.05);
    }

    #[test]
    fn optimal_gain_approaches_unity() {
        let avg = teleport(1e4, 1.0).full_average().unwrap();
        let (lambda, _) = avg.optimize_gain(2.0).unwrap();
        assert!((lambda - 1.0).abs() < 0.05, "{lambda}");
    }

    #[test]
    fn outcome_density_is_centred() {
        let b = teleport(1.0, 0.5);
        let p = |g| b.herald_at(g).unwrap().density;
        assert!((p([0.3, -0.2]) - p([-0.3, 0.2])).abs() < 1e-15);
        let h = b.herald_with_gains([0.0, 0.0], 0.0, 0.0).unwrap().herald.unwrap();
        assert!(h.mean.amax() < 1e-15);
    }

    #[test]
    fn gains_only_move_means() {
        let cfg = EcBoxConfig::new(0.2f64, 0.5, 0.1, 1, 0.2, 0.05).unwrap();
        let b = EcBox::new(cfg).unwrap();
        let g = [0.4, -0.7];
        let h0 = b.herald_with_gains(g, 0.0, 0.0).unwrap().herald.unwrap();
        let h1 = b.herald_with_gains(g, 0.8, 1.3).unwrap().herald.unwrap();
        assert!((&h0.cov - &h1.cov).amax() < 1e-12);
        assert!((h0.mean - h1.mean - b.correction(g, -0.8, -1.3)).amax() < 1e-12);
    }

    #[test]
    fn zero_outcome_matches_direct_scheme() {
        let (mu, mu_res, eta, kappa, mu_aux) = (0.3f64, 0.8, 0.01, 0.05, 0.02);
        let b = EcBox::new(EcBoxConfig::new(mu, mu_res, eta, 1, kappa, mu_aux).unwrap()).unwrap();
        let h = b.herald_at([0.0, 0.0]).unwrap().herald.unwrap();
        let chi2 = mu / (1.0 + mu) * mu_res / (1.0 + mu_res);
        let mu_eff = chi2 / (1.0 - chi2);
        let d = herald_nla(&ScissorsConfig::new(1, kappa, mu_aux, eta, mu_eff).unwrap()).unwrap();
        let diff = (h.cov.abs() - d.result.cov.abs()).amax();
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn full_average_covers_success_probability() {
        let b = EcBox::new(EcBoxConfig::new(0.33f64, 0.33, 0.01, 1, 0.01, 0.01).unwrap()).unwrap();
        let s = b.full_average().unwrap();
        let mass = s.total_weight() / b.success_probability();
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn total_covariance_matches_mixture_moments() {
        let mut cfg = EcBoxConfig::new(0.33f64, 0.33, 0.05, 1, 0.05, 0.02).unwrap();
        cfg.nodes = 9;
        let s = EcBox::new(cfg).unwrap().full_average().unwrap();
        let (mean, cov) = s.q1_moments(1.0).unwrap();
        let mut parts = Vec::new();
        for (w, c) in &s.samples {
            let h = c.herald.as_ref().unwrap();
            let mut m = h.mixture.clone();
            let scale = *w / h.probability;
            for comp in &mut m.components {
                comp.weight *= scale;
            }
            m.total_weight *= scale;
            parts.push(m);
        }
        let (m2, v2) = q_moments(&SignedGaussianMixture::merge(parts)).unwrap();
        assert!((mean - m2).amax() < 1e-10);
        assert!((cov - v2).amax() < 1e-10);
    }

    #[test]
    fn q2_is_gain_independent_and_above_q1() {
        let mut cfg = EcBoxConfig::new(0.33f64, 0.33, 0.05, 1, 0.05, 0.02).unwrap();
        cfg.nodes = 9;
        let a = EcBox::new(cfg).unwrap().full_average().unwrap().q2(Measure::Geof).unwrap();
        cfg.gain_a = 0.7;
        cfg.gain_b = 0.3;
        let s = EcBox::new(cfg).unwrap().full_average().unwrap();
        let b = s.q2(Measure::Geof).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let (_, q1) = s.optimize_gain(4.0).unwrap();
        assert!(a >= q1 - 1e-9, "{a} {q1}");
    }

    #[test]
    fn zero_window_uses_origin() {
        let mut cfg = EcBoxConfig::new(0.33f64, 0.33, 0.05, 1, 0.05, 0.02).unwrap();
        cfg.window = Some(0.0);
        let s = EcBox::new(cfg).unwrap().samples().unwrap();
        assert_eq!(s.samples.len(), 1);
        assert!(s.q2(Measure::Rci).is_ok());
    }
}
