//! N-fold quantum-scissors noiseless linear amplifier after a pure-loss channel.
//!
//! Mode order of the pre-measurement state:
//!
//! ```text
//! A, S₁ … S_N, (C₁, D₁, B₁), …, (C_N, D_N, B_N)
//! ```
//!
//! `A` is the retained idler, `S₁` carries the lossy signal and `S₂ … S_N`
//! are the vacuum ports of the splitter. Each scissors takes an auxiliary
//! TMSV on `(Cᵢ, Dᵢ)`, mixes `Bᵢ` with `Cᵢ` on a κ beamsplitter and `Sᵢ`
//! with `Cᵢ` on a 50:50. After the 50:50 the detector pair is `(Sᵢ, Cᵢ)`,
//! called `(Yᵢ, Cᵢ)` below. The recombiner gathers the `Bᵢ` into `B₁`.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::gaussian::{beamsplitter, phase_rotation, tmsv, vacuum, GaussianState, SymplecticOp};
use crate::herald::{herald_mixture, HeraldResult, OnOffPattern, SignedGaussianMixture};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScissorsConfig<T: Real> {
    pub n: usize,
    kappa: T,
    pub mu_aux: T,
    pub eta: T,
    pub mu: T,
}

/// Snaps κ onto a cycle of `κ → 1/(1 + g(κ)²)` so that a configuration built
/// from κ and one built from the matching gain agree bit for bit.
fn canonical_kappa<T: Real>(kappa: T) -> T {
    let step = |k: T| kappa_from_gain(gain_from_kappa(k));
    let mut seen = vec![kappa];
    let mut k = kappa;
    for _ in 0..64 {
        k = step(k);
        if let Some(pos) = seen.iter().position(|&s| s == k) {
            return seen[pos..]
                .iter()
                .copied()
                .fold(k, |a, b| if b < a { b } else { a });
        }
        seen.push(k);
    }
    k
}

impl<T: Real> ScissorsConfig<T> {
    pub fn new(n: usize, kappa: T, mu_aux: T, eta: T, mu: T) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "need at least one scissors"));
        }
        if !(kappa > T::zero() && kappa < T::one()) {
            return Err(invalid("kappa", format!("{} not in (0, 1)", kappa.as_f64())));
        }
        if !(mu_aux >= T::zero() && mu_aux.as_f64().is_finite()) {
            return Err(invalid("mu_aux", format!("{} must be non-negative", mu_aux.as_f64())));
        }
        if !(eta > T::zero() && eta <= T::one()) {
            return Err(invalid("eta", format!("{} not in (0, 1]", eta.as_f64())));
        }
        if !(mu >= T::zero() && mu.as_f64().is_finite()) {
            return Err(invalid("mu", format!("{} must be non-negative", mu.as_f64())));
        }
        Ok(Self {
            n,
            kappa: canonical_kappa(kappa),
            mu_aux,
            eta,
            mu,
        })
    }

    /// Builds the configuration from the amplitude gain `g = √((1−κ)/κ)`.
    pub fn from_gain(n: usize, g: T, mu_aux: T, eta: T, mu: T) -> Result<Self> {
        if !(g > T::zero() && g.as_f64().is_finite()) {
            return Err(invalid("g", format!("{} must be finite and positive", g.as_f64())));
        }
        Self::new(n, kappa_from_gain(g), mu_aux, eta, mu)
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn gain(&self) -> T {
        gain_from_kappa(self.kappa)
    }

    pub fn layout(&self) -> CircuitLayout {
        CircuitLayout::new(self.n)
    }
}

pub fn gain_from_kappa<T: Real>(kappa: T) -> T {
    ((T::one() - kappa) / kappa).sqrt()
}

pub fn kappa_from_gain<T: Real>(g: T) -> T {
    T::one() / (T::one() + g * g)
}

/// One step of the optical network, in application order.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitElement {
    Tmsv { modes: (usize, usize), aux: bool },
    Loss { mode: usize },
    Beamsplitter { modes: (usize, usize), transmissivity: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitLayout {
    pub n: usize,
    pub idler: usize,
    /// Signal path after the splitter; `signal[i]` becomes detector `Yᵢ`.
    pub signal: Vec<usize>,
    pub aux_c: Vec<usize>,
    pub aux_d: Vec<usize>,
    pub scissors_out: Vec<usize>,
    pub output: usize,
    pub check_ports: Vec<usize>,
    pub elements: Vec<CircuitElement>,
}

impl CircuitLayout {
    pub fn new(n: usize) -> Self {
        let signal: Vec<usize> = (1..=n).collect();
        let base = n + 1;
        let aux_c: Vec<usize> = (0..n).map(|i| base + 3 * i).collect();
        let aux_d: Vec<usize> = (0..n).map(|i| base + 3 * i + 1).collect();
        let scissors_out: Vec<usize> = (0..n).map(|i| base + 3 * i + 2).collect();
        let mut elements = vec![
            CircuitElement::Tmsv { modes: (0, 1), aux: false },
            CircuitElement::Loss { mode: 1 },
        ];
        for k in 0..n.saturating_sub(1) {
            elements.push(CircuitElement::Beamsplitter {
                modes: (signal[k], signal[k + 1]),
                transmissivity: format!("1/{}", n - k),
            });
        }
        for i in 0..n {
            elements.push(CircuitElement::Tmsv {
                modes: (aux_c[i], aux_d[i]),
                aux: true,
            });
            elements.push(CircuitElement::Beamsplitter {
                modes: (scissors_out[i], aux_c[i]),
                transmissivity: "kappa".into(),
            });
            elements.push(CircuitElement::Beamsplitter {
                modes: (signal[i], aux_c[i]),
                transmissivity: "1/2".into(),
            });
        }
        for k in (0..n.saturating_sub(1)).rev() {
            elements.push(CircuitElement::Beamsplitter {
                modes: (scissors_out[k], scissors_out[k + 1]),
                transmissivity: format!("inverse 1/{}", n - k),
            });
        }
        Self {
            n,
            idler: 0,
            output: scissors_out[0],
            check_ports: scissors_out[1..].to_vec(),
            signal,
            aux_c,
            aux_d,
            scissors_out,
            elements,
        }
    }

    pub fn total_modes(&self) -> usize {
        1 + 4 * self.n
    }

    /// Detector pair `(Yᵢ, Cᵢ)` of scissors `i`.
    pub fn detectors(&self, i: usize) -> (usize, usize) {
        (self.signal[i], self.aux_c[i])
    }
}

/// Balanced splitter cascade `modes[0] → modes[0..n]`.
pub fn splitter_cascade<T: Real>(modes: &[usize], total: usize) -> Result<SymplecticOp<T>> {
    let n = modes.len();
    let mut op = SymplecticOp::identity(total);
    for k in 0..n.saturating_sub(1) {
        let t = T::one() / T::from_usize_lossy(n - k);
        let bs = beamsplitter(t, (modes[k], modes[k + 1]), total)?;
        op = bs.compose(&op);
    }
    Ok(op)
}

/// Pre-measurement state up to, but excluding, the recombiner.
fn scissors_bank_state<T: Real>(cfg: &ScissorsConfig<T>, layout: &CircuitLayout) -> Result<GaussianState<T>> {
    let n = cfg.n;
    let total = layout.total_modes();
    let mut state = tmsv(cfg.mu)?;
    if n > 1 {
        state = state.tensor(&vacuum(n - 1)?);
    }
    let aux = tmsv(cfg.mu_aux)?.tensor(&vacuum(1)?);
    for _ in 0..n {
        state = state.tensor(&aux);
    }
    state = state.pure_loss(cfg.eta, layout.signal[0])?;
    state = state.apply_symplectic(&splitter_cascade(&layout.signal, total)?)?;
    let half = T::lit(0.5);
    let mut bank = SymplecticOp::identity(total);
    for i in 0..n {
        let k = beamsplitter(cfg.kappa, (layout.scissors_out[i], layout.aux_c[i]), total)?;
        let h = beamsplitter(half, (layout.signal[i], layout.aux_c[i]), total)?;
        bank = h.compose(&k.compose(&bank));
    }
    state.apply_symplectic(&bank)
}

fn recombiner<T: Real>(layout: &CircuitLayout) -> Result<SymplecticOp<T>> {
    Ok(splitter_cascade(&layout.scissors_out, layout.total_modes())?.inverse())
}

/// Gaussian state of every mode immediately before detection.
pub fn build_premeasurement<T: Real>(cfg: &ScissorsConfig<T>) -> Result<(GaussianState<T>, CircuitLayout)> {
    let layout = cfg.layout();
    let state = scissors_bank_state(cfg, &layout)?.apply_symplectic(&recombiner(&layout)?)?;
    Ok((state, layout))
}

/// Per-scissors success outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScissorsClick {
    /// `Yᵢ` ON, `Cᵢ` OFF.
    Y,
    /// `Cᵢ` ON, `Yᵢ` OFF.
    C,
}

/// All `2^N` success patterns in a fixed order.
pub fn success_patterns(n: usize) -> Vec<Vec<ScissorsClick>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 0 { ScissorsClick::Y } else { ScissorsClick::C })
                .collect()
        })
        .collect()
}

fn onoff_pattern(layout: &CircuitLayout, clicks: &[ScissorsClick]) -> OnOffPattern {
    let mut off = Vec::new();
    let mut on = Vec::new();
    for (i, click) in clicks.iter().enumerate() {
        let (y, c) = layout.detectors(i);
        on.push(layout.aux_d[i]);
        match click {
            ScissorsClick::Y => {
                on.push(y);
                off.push(c);
            }
            ScissorsClick::C => {
                on.push(c);
                off.push(y);
            }
        }
    }
    off.extend(&layout.check_ports);
    OnOffPattern::new(off, on, vec![layout.idler, layout.output])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NlaOptions {
    /// Rotate `Bᵢ` by π whenever `Cᵢ` clicks, before recombination. The two
    /// click outcomes of one scissors leave amplitudes of opposite sign on
    /// the one-photon component, and mixing them uncorrected erases the
    /// `A`–`B` coherence.
    pub feed_forward: bool,
}

impl Default for NlaOptions {
    fn default() -> Self {
        Self { feed_forward: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlaHerald<T: Real> {
    /// Heralded state on `(A, B)`; `result.probability` is `P_succ′`.
    pub result: HeraldResult<T>,
    pub pattern_probabilities: Vec<T>,
    pub p_succ_prime: T,
    /// `P_succ′ / (μ_aux/(1+μ_aux))^N`.
    pub p_succ: T,
}

pub fn herald_nla<T: Real>(cfg: &ScissorsConfig<T>) -> Result<NlaHerald<T>> {
    herald_nla_with(cfg, NlaOptions::default())
}

/// Pre-measurement state and detection pattern of every success pattern.
///
/// The state includes the feed-forward phase (when enabled) and the
/// recombiner; mode 0 is the idler and the pattern keeps `[0, output]`.
pub fn pattern_states<T: Real>(
    cfg: &ScissorsConfig<T>,
    opts: NlaOptions,
) -> Result<Vec<(GaussianState<T>, OnOffPattern)>> {
    let layout = cfg.layout();
    let total = layout.total_modes();
    let bank = scissors_bank_state(cfg, &layout)?;
    let recomb = recombiner::<T>(&layout)?;
    let pi = T::pi();
    success_patterns(cfg.n)
        .iter()
        .map(|clicks| {
            let mut op = SymplecticOp::identity(total);
            if opts.feed_forward {
                for (i, click) in clicks.iter().enumerate() {
                    if *click == ScissorsClick::C {
                        op = phase_rotation(pi, layout.scissors_out[i], total)?.compose(&op);
                    }
                }
            }
            let state = bank.apply_symplectic(&recomb.compose(&op))?;
            Ok((state, onoff_pattern(&layout, clicks)))
        })
        .collect()
}

pub fn herald_nla_with<T: Real>(cfg: &ScissorsConfig<T>, opts: NlaOptions) -> Result<NlaHerald<T>> {
    let mixtures: Vec<SignedGaussianMixture<T>> = pattern_states(cfg, opts)?
        .par_iter()
        .map(|(state, pattern)| herald_mixture(state, pattern))
        .collect::<Result<_>>()?;
    let pattern_probabilities = mixtures.iter().map(|m| m.total_weight).collect();
    let result = HeraldResult::from_mixture(SignedGaussianMixture::merge(mixtures))?;
    let p_succ_prime = result.probability;
    Ok(NlaHerald {
        result,
        pattern_probabilities,
        p_succ_prime,
        p_succ: renormalized_success(cfg, p_succ_prime),
    })
}

/// `P_succ′ / (μ_aux/(1+μ_aux))^N`.
pub fn renormalized_success<T: Real>(cfg: &ScissorsConfig<T>, p_prime: T) -> T {
    let herald_rate = cfg.mu_aux / (T::one() + cfg.mu_aux);
    p_prime / herald_rate.powi(cfg.n as i32)
}

/// Lossy TMSV `(μ′, η′)` produced by an ideal NLA of gain `g` acting on a
/// TMSV(μ) sent through a pure-loss channel of transmissivity η.
pub fn ideal_nla_equivalent<T: Real>(mu: T, eta: T, g: T) -> Result<(T, T)> {
    if !(mu >= T::zero()) {
        return Err(invalid("mu", "must be non-negative"));
    }
    if !(eta > T::zero() && eta <= T::one()) {
        return Err(invalid("eta", format!("{} not in (0, 1]", eta.as_f64())));
    }
    if !(g > T::zero()) {
        return Err(invalid("g", "must be positive"));
    }
    let chi = (mu / (T::one() + mu)).sqrt();
    let boost = T::one() + (g * g - T::one()) * eta;
    let x = chi * boost.sqrt();
    if !(x < T::one()) {
        return Err(invalid(
            "g",
            format!("amplified squeezing parameter {} is not below 1", x.as_f64()),
        ));
    }
    let x2 = x * x;
    Ok((x2 / (T::one() - x2), g * g * eta / boost))
}

/// Lossy TMSV covariance on `(A, B)`: TMSV(μ) followed by loss η on `B`.
pub fn lossy_tmsv<T: Real>(mu: T, eta: T) -> Result<GaussianState<T>> {
    tmsv(mu)?.pure_loss(eta, 1)
}
