//! Truncated Fock-space simulator used as an independent check of the
//! Gaussian pipeline.
//!
//! States are dense complex tensors with a separate dimension per mode,
//! stored row-major with mode 0 slowest. Mixed states are kept as ensembles
//! of unnormalized pure branches, which is all the loss channel and the
//! number-diagonal detectors ever need.

mod circuit;

pub use circuit::{fig3_oracle, FockCutoffs, OracleResult};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::herald::OnOffPattern;
use crate::scalar::{Real, TOL};

pub type C<T> = Complex<T>;

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<T: Real> {
    dims: Vec<usize>,
    amps: Vec<C<T>>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn binom<T: Real>(n: usize, k: usize) -> T {
    let mut r = T::one();
    for i in 0..k {
        r = r * T::from_usize_lossy(n - i) / T::from_usize_lossy(i + 1);
    }
    r
}

fn factorial_sqrt<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k).sqrt())
}

impl<T: Real> FockVector<T> {
    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(invalid("dims", "every mode needs dimension ≥ 2"));
        }
        let len = dims.iter().product();
        Ok(Self {
            dims,
            amps: vec![C::new(T::zero(), T::zero()); len],
        })
    }

    pub fn vacuum(dims: Vec<usize>) -> Result<Self> {
        let mut v = Self::zeros(dims)?;
        v.amps[0] = C::new(T::one(), T::zero());
        Ok(v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter().zip(strides(&self.dims)).map(|(n, s)| n * s).sum()
    }

    pub fn get(&self, occ: &[usize]) -> C<T> {
        self.amps[self.index(occ)]
    }

    pub fn set(&mut self, occ: &[usize], v: C<T>) {
        let i = self.index(occ);
        self.amps[i] = v;
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn scale(&mut self, s: T) {
        for a in &mut self.amps {
            *a = *a * s;
        }
    }

    /// Tensor product; modes of `other` are appended.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { dims, amps }
    }

    /// Multiplies each amplitude by `f(n_mode)`.
    pub fn apply_diagonal(&mut self, mode: usize, f: impl Fn(usize) -> C<T>) -> Result<()> {
        self.check_mode(mode)?;
        let s = strides(&self.dims)[mode];
        let d = self.dims[mode];
        let factors: Vec<C<T>> = (0..d).map(&f).collect();
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a = *a * factors[(i / s) % d];
        }
        Ok(())
    }

    /// Phase rotation `a → e^{−iθ} a`, i.e. `|n⟩ → e^{−inθ}|n⟩`.
    pub fn phase_rotation(&mut self, theta: T, mode: usize) -> Result<()> {
        self.apply_diagonal(mode, |n| {
            let ph = -theta * T::from_usize_lossy(n);
            C::new(ph.cos(), ph.sin())
        })
    }

    /// Lowering operator on one mode.
    pub fn annihilate(&self, mode: usize) -> Self {
        let st = strides(&self.dims);
        let (s, d) = (st[mode], self.dims[mode]);
        let mut out = vec![C::new(T::zero(), T::zero()); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let n = (i / s) % d;
            if n > 0 {
                out[i - s] = *a * T::from_usize_lossy(n).sqrt();
            }
        }
        Self {
            dims: self.dims.clone(),
            amps: out,
        }
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.dims.len() {
            return Err(Error::InvalidModes(format!(
                "mode {mode} out of range for {} modes",
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// Beamsplitter of transmissivity `t` with the same convention as the
    /// Gaussian symplectic: `a₁† → √t a₁† − √(1−t) a₂†`,
    /// `a₂† → √(1−t) a₁† + √t a₂†`. Returns the norm lost to truncation.
    pub fn beamsplitter(&mut self, t: T, modes: (usize, usize)) -> Result<T> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(invalid("t", format!("{} not in [0, 1]", t.as_f64())));
        }
        let (m1, m2) = modes;
        self.check_mode(m1)?;
        self.check_mode(m2)?;
        if m1 == m2 {
            return Err(Error::InvalidModes("beamsplitter needs two distinct modes".into()));
        }
        let (d1, d2) = (self.dims[m1], self.dims[m2]);
        let st = strides(&self.dims);
        let (s1, s2) = (st[m1], st[m2]);
        let tables: Vec<DMatrix<T>> = (0..d1 + d2 - 1).map(|n| bs_block(t, n)).collect();
        let before = self.norm_sqr();
        let zero = C::new(T::zero(), T::zero());
        let mut out = vec![zero; self.amps.len()];
        for base in 0..self.amps.len() {
            if (base / s1) % d1 != 0 || (base / s2) % d2 != 0 {
                continue;
            }
            for n1 in 0..d1 {
                for n2 in 0..d2 {
                    let a = self.amps[base + n1 * s1 + n2 * s2];
                    if a == zero {
                        continue;
                    }
                    let total = n1 + n2;
                    let u = &tables[total];
                    for k1 in 0..=total {
                        let k2 = total - k1;
                        if k1 < d1 && k2 < d2 {
                            out[base + k1 * s1 + k2 * s2] += a * u[(k1, n1)];
                        }
                    }
                }
            }
        }
        self.amps = out;
        Ok(before - self.norm_sqr())
    }

    /// Pure-loss channel on one mode as a Kraus ensemble.
    pub fn loss(&self, eta: T, mode: usize) -> Result<FockDensity<T>> {
        FockDensity::from_pure(self.clone()).loss(eta, mode)
    }

    /// Zeroes every amplitude rejected by the ON/OFF pattern; kept modes untouched.
    pub fn project_onoff(&mut self, pattern: &OnOffPattern) -> Result<()> {
        for &m in &pattern.off_modes {
            self.apply_diagonal(m, |n| if n == 0 { C::new(T::one(), T::zero()) } else { C::new(T::zero(), T::zero()) })?;
        }
        for &m in &pattern.on_modes {
            self.apply_diagonal(m, |n| if n == 0 { C::new(T::zero(), T::zero()) } else { C::new(T::one(), T::zero()) })?;
        }
        Ok(())
    }

    /// Probability mass on the top Fock level of any mode.
    pub fn tail_mass(&self) -> T {
        let st = strides(&self.dims);
        let mut tail = T::zero();
        for (i, a) in self.amps.iter().enumerate() {
            if (0..self.dims.len()).any(|m| (i / st[m]) % self.dims[m] == self.dims[m] - 1) {
                tail += a.norm_sqr();
            }
        }
        tail
    }
}

/// Matrix `U[k₁, n₁]` of the beamsplitter on the fixed-total-photon subspace.
fn bs_block<T: Real>(t: T, total: usize) -> DMatrix<T> {
    let ct = t.sqrt();
    let st = (T::one() - t).sqrt();
    let mut u = DMatrix::zeros(total + 1, total + 1);
    for n1 in 0..=total {
        let n2 = total - n1;
        let norm = factorial_sqrt::<T>(n1) * factorial_sqrt::<T>(n2);
        for k in 0..=n1 {
            // a₁†^k (−a₂†)^{n1−k} from the first factor
            let c1 = binom::<T>(n1, k) * ct.powi(k as i32) * (-st).powi((n1 - k) as i32);
            for l in 0..=n2 {
                let c2 = binom::<T>(n2, l) * st.powi(l as i32) * ct.powi((n2 - l) as i32);
                let k1 = k + l;
                let k2 = total - k1;
                u[(k1, n1)] += c1 * c2 * factorial_sqrt::<T>(k1) * factorial_sqrt::<T>(k2) / norm;
            }
        }
    }
    u
}

/// Mixed state as a sum of unnormalized pure branches, `ρ = Σ |ψ_k⟩⟨ψ_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity<T: Real> {
    pub branches: Vec<FockVector<T>>,
}

impl<T: Real> FockDensity<T> {
    pub fn from_pure(v: FockVector<T>) -> Self {
        Self { branches: vec![v] }
    }

    pub fn trace(&self) -> T {
        self.branches.iter().fold(T::zero(), |acc, b| acc + b.norm_sqr())
    }

    pub fn dims(&self) -> &[usize] {
        self.branches[0].dims()
    }

    /// Kraus operators `K_k|n⟩ = √C(n,k) η^{(n−k)/2} (1−η)^{k/2} |n−k⟩`.
    pub fn loss(&self, eta: T, mode: usize) -> Result<Self> {
        if !(eta >= T::zero() && eta <= T::one()) {
            return Err(invalid("eta", format!("{} not in [0, 1]", eta.as_f64())));
        }
        let mut out = Vec::new();
        for b in &self.branches {
            b.check_mode(mode)?;
            let d = b.dims[mode];
            let s = strides(&b.dims)[mode];
            for k in 0..d {
                let mut nb = FockVector::zeros(b.dims.clone())?;
                let mut any = false;
                for (i, a) in b.amps.iter().enumerate() {
                    let n = (i / s) % d;
                    if n < k {
                        continue;
                    }
                    let c = binom::<T>(n, k).sqrt()
                        * eta.powf(T::from_usize_lossy(n - k) * T::lit(0.5))
                        * (T::one() - eta).powf(T::from_usize_lossy(k) * T::lit(0.5));
                    if c != T::zero() {
                        nb.amps[i - k * s] = *a * c;
                        any = true;
                    }
                }
                if any && nb.norm_sqr() > T::zero() {
                    out.push(nb);
                }
            }
        }
        Ok(Self { branches: out })
    }

    pub fn beamsplitter(&mut self, t: T, modes: (usize, usize)) -> Result<T> {
        let mut lost = T::zero();
        for b in &mut self.branches {
            lost += b.beamsplitter(t, modes)?;
        }
        Ok(lost)
    }

    pub fn phase_rotation(&mut self, theta: T, mode: usize) -> Result<()> {
        for b in &mut self.branches {
            b.phase_rotation(theta, mode)?;
        }
        Ok(())
    }

    /// Applies the ON/OFF projectors and returns the unnormalized state with
    /// its probability. Kept and detected modes stay in the tensor; detected
    /// modes are traced out implicitly by [`FockDensity::moments`].
    pub fn onoff(&self, pattern: &OnOffPattern) -> Result<(Self, T)> {
        pattern.validate(self.dims().len())?;
        let mut out = self.clone();
        for b in &mut out.branches {
            b.project_onoff(pattern)?;
        }
        let p = out.trace();
        Ok((out, p))
    }

    /// Mean vector and covariance (xxpp, vacuum = I) of the listed modes,
    /// normalized by the trace.
    pub fn moments(&self, modes: &[usize]) -> Result<(DVector<T>, DMatrix<T>)> {
        let tr = self.trace();
        if !(tr.as_f64() > TOL.probability_floor) {
            return Err(Error::HeraldImpossible(tr.as_f64()));
        }
        let k = modes.len();
        let zero = C::new(T::zero(), T::zero());
        let mut a = vec![zero; k];
        let mut n = vec![vec![zero; k]; k];
        let mut m = vec![vec![zero; k]; k];
        for b in &self.branches {
            let lowered: Vec<FockVector<T>> = modes.iter().map(|&q| b.annihilate(q)).collect();
            for i in 0..k {
                a[i] += b.inner(&lowered[i]);
                for j in 0..k {
                    n[i][j] += lowered[i].inner(&lowered[j]);
                    m[i][j] += b.inner(&lowered[j].annihilate(modes[i]));
                }
            }
        }
        let inv = T::one() / tr;
        let two = T::lit(2.0);
        let sqrt2 = two.sqrt();
        let mut mean = DVector::zeros(2 * k);
        for i in 0..k {
            a[i] = a[i] * inv;
            mean[i] = sqrt2 * a[i].re;
            mean[k + i] = sqrt2 * a[i].im;
        }
        let mut cov = DMatrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                let c = n[i][j] * inv - a[i].conj() * a[j];
                let mm = m[i][j] * inv - a[i] * a[j];
                let delta = if i == j { T::one() } else { T::zero() };
                cov[(i, j)] = two * (mm.re + c.re) + delta;
                cov[(k + i, k + j)] = two * (c.re - mm.re) + delta;
                cov[(i, k + j)] = two * (mm.im + c.im);
            }
        }
        for i in 0..k {
            for j in 0..k {
                cov[(k + j, i)] = cov[(i, k + j)];
            }
        }
        Ok((mean, cov))
    }

    /// Largest top-level occupation across branches, relative to the trace.
    pub fn tail_mass(&self) -> T {
        let tr = self.trace();
        self.branches.iter().fold(T::zero(), |acc, b| acc + b.tail_mass()) / tr
    }

    /// Dense density matrix over the full tensor; only for small systems.
    pub fn matrix(&self) -> Result<DMatrix<C<T>>> {
        let len = self.branches[0].amps.len();
        if len > 4096 {
            return Err(Error::Truncation(format!("{len}-dimensional space too large to densify")));
        }
        let mut rho = DMatrix::from_element(len, len, C::new(T::zero(), T::zero()));
        for b in &self.branches {
            for i in 0..len {
                for j in 0..len {
                    rho[(i, j)] += b.amps[i] * b.amps[j].conj();
                }
            }
        }
        Ok(rho)
    }
}

/// Two-mode squeezed vacuum truncated at `cutoff` photons per arm.
/// Returns the state and the discarded probability mass.
pub fn fock_tmsv<T: Real>(mu: T, cutoff: usize) -> Result<(FockVector<T>, T)> {
    fock_tmsv_dims(mu, cutoff, cutoff, cutoff)
}

/// TMSV with Schmidt sum truncated at `terms`, embedded in `(d1, d2)`.
pub fn fock_tmsv_dims<T: Real>(mu: T, terms: usize, d1: usize, d2: usize) -> Result<(FockVector<T>, T)> {
    if terms < 2 {
        return Err(invalid("cutoff", "must be at least 2"));
    }
    if !(mu >= T::zero()) {
        return Err(invalid("mu", "must be non-negative"));
    }
    let chi2 = mu / (T::one() + mu);
    let chi = chi2.sqrt();
    let lead = (T::one() - chi2).sqrt();
    let mut v = FockVector::zeros(vec![d1, d2])?;
    let terms = terms.min(d1).min(d2);
    for n in 0..terms {
        v.set(&[n, n], C::new(lead * chi.powi(n as i32), T::zero()));
    }
    let tail = T::one() - v.norm_sqr();
    Ok((v, tail.max(T::zero())))
}

/// Coherent state `|α⟩` truncated to `cutoff` levels.
pub fn fock_coherent<T: Real>(alpha: C<T>, cutoff: usize) -> Result<FockVector<T>> {
    let mut v = FockVector::zeros(vec![cutoff])?;
    let pref = (-alpha.norm_sqr() * T::lit(0.5)).exp();
    let mut term = C::new(pref, T::zero());
    for n in 0..cutoff {
        v.amps[n] = term;
        term = term * alpha / T::from_usize_lossy(n + 1).sqrt();
    }
    Ok(v)
}

/// Single-mode number state `|n⟩`.
pub fn fock_number<T: Real>(n: usize, cutoff: usize) -> Result<FockVector<T>> {
    if n >= cutoff {
        return Err(Error::Truncation(format!("|{n}⟩ needs cutoff > {n}")));
    }
    let mut v = FockVector::zeros(vec![cutoff])?;
    v.amps[n] = C::new(T::one(), T::zero());
    Ok(v)
}

/// Ideal scissors `(α₀, α₁, α₂, …) → (α₀, gα₁, 0, …)/√(1+g²)` on one mode.
/// Returns the unnormalized output and its norm as success probability.
pub fn fock_scissors_exact<T: Real>(state: &FockVector<T>, g: T, mode: usize) -> Result<(FockVector<T>, T)> {
    let mut out = state.clone();
    let pref = (T::one() / (T::one() + g * g)).sqrt();
    out.apply_diagonal(mode, |n| match n {
        0 => C::new(pref, T::zero()),
        1 => C::new(pref * g, T::zero()),
        _ => C::new(T::zero(), T::zero()),
    })?;
    let p = out.norm_sqr();
    Ok((out, p))
}
