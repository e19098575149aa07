//! Gaussian states, symplectic transforms, pure loss and Gaussian measurements.
//!
//! Conventions: quadratures `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, xxpp
//! ordering, and `V_ij = ⟨{r_i, r_j}⟩ − 2⟨r_i⟩⟨r_j⟩` so that the vacuum has
//! covariance `I`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    physicality_tolerance,
    check_symmetric, omega, quadrature_indices, select_entries, select_rows_cols, spd_solve,
    symmetrize, symplectic_spectrum,
};
use crate::scalar::{Real, TOL};

/// Mean vector and covariance matrix of an `M`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T: Real> {
    mean: DVector<T>,
    cov: DMatrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// Validated constructor: checks shape, symmetry and the Heisenberg condition.
    pub fn new(mean: DVector<T>, cov: DMatrix<T>) -> Result<Self> {
        let state = Self::from_parts_unchecked(mean, cov)?;
        state.check_physical()?;
        Ok(state)
    }

    /// Shape and symmetry checks only. Used for intermediate results whose
    /// physicality follows from construction.
    pub fn from_parts_unchecked(mean: DVector<T>, cov: DMatrix<T>) -> Result<Self> {
        let n = cov.nrows();
        if n == 0 || n % 2 != 0 || cov.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n.max(2),
                got: cov.ncols(),
            });
        }
        if mean.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: mean.len(),
            });
        }
        check_symmetric(&cov)?;
        Ok(Self {
            mean,
            cov: symmetrize(&cov),
        })
    }

    pub fn num_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<T> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<T> {
        &self.cov
    }

    pub fn into_parts(self) -> (DVector<T>, DMatrix<T>) {
        (self.mean, self.cov)
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<T>> {
        symplectic_spectrum(&self.cov)
    }

    pub fn check_physical(&self) -> Result<()> {
        let nu = self.symplectic_eigenvalues()?;
        let min = nu.first().copied().unwrap_or_else(T::one);
        if min.as_f64() < 1.0 - physicality_tolerance(&self.cov) || !min.as_f64().is_finite() {
            return Err(Error::NotPhysical(min.as_f64()));
        }
        Ok(())
    }

    /// `√det V = Π νᵢ`; equals one for pure states.
    pub fn purity_product(&self) -> T {
        self.cov.determinant().sqrt()
    }

    /// Direct sum: the modes of `other` are appended after those of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (m1, m2) = (self.num_modes(), other.num_modes());
        let m = m1 + m2;
        let mut mean = DVector::zeros(2 * m);
        let mut cov = DMatrix::zeros(2 * m, 2 * m);
        let map1: Vec<usize> = (0..m1).chain(m..m + m1).collect();
        let map2: Vec<usize> = (m1..m).chain(m + m1..2 * m).collect();
        for (src, map) in [(self, &map1), (other, &map2)] {
            for (i, &gi) in map.iter().enumerate() {
                mean[gi] = src.mean[i];
                for (j, &gj) in map.iter().enumerate() {
                    cov[(gi, gj)] = src.cov[(i, j)];
                }
            }
        }
        Self { mean, cov }
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidModes("empty keep set".into()));
        }
        validate_modes(keep, self.num_modes())?;
        let idx = quadrature_indices(keep, self.num_modes());
        Ok(Self {
            mean: select_entries(&self.mean, &idx),
            cov: select_rows_cols(&self.cov, &idx, &idx),
        })
    }

    pub fn apply_symplectic(&self, s: &SymplecticOp<T>) -> Result<Self> {
        if s.dim() != self.cov.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.cov.nrows(),
                got: s.dim(),
            });
        }
        let m = &s.matrix;
        Ok(Self {
            mean: m * &self.mean,
            cov: symmetrize(&(m * &self.cov * m.transpose())),
        })
    }

    /// Pure-loss channel of transmissivity `eta` on one mode:
    /// `V → Xᵀ V X + Y` with `X = √η I`, `Y = (1 − η) I` on that mode.
    pub fn pure_loss(&self, eta: T, mode: usize) -> Result<Self> {
        if !(eta >= T::zero() && eta <= T::one()) {
            return Err(invalid("eta", format!("{} not in [0, 1]", eta.as_f64())));
        }
        validate_modes(&[mode], self.num_modes())?;
        let n = self.num_modes();
        let root = eta.sqrt();
        let mut mean = self.mean.clone();
        let mut cov = self.cov.clone();
        for q in [mode, n + mode] {
            mean[q] *= root;
            for j in 0..2 * n {
                cov[(q, j)] *= root;
                cov[(j, q)] *= root;
            }
            cov[(q, q)] += T::one() - eta;
        }
        Ok(Self { mean, cov })
    }

    pub fn displace(&self, d: &DVector<T>) -> Result<Self> {
        if d.len() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: d.len(),
            });
        }
        Ok(Self {
            mean: &self.mean + d,
            cov: self.cov.clone(),
        })
    }

    /// Gaussian conditioning on a measurement outcome. Returns the state of the
    /// unmeasured modes (original order) and the outcome probability density.
    pub fn condition(&self, meas: &GaussianMeasurement<T>) -> Result<Conditioned<T>> {
        let n = self.num_modes();
        validate_modes(&meas.modes, n)?;
        let rest: Vec<usize> = (0..n).filter(|m| !meas.modes.contains(m)).collect();
        let (quads, vm) = meas.retained_block(n);
        if meas.outcome.len() != quads.len() {
            return Err(Error::DimensionMismatch {
                expected: quads.len(),
                got: meas.outcome.len(),
            });
        }
        let a_idx = quadrature_indices(&rest, n);
        let v_b = select_rows_cols(&self.cov, &quads, &quads);
        let v_ab = select_rows_cols(&self.cov, &a_idx, &quads);
        let diff = &meas.outcome - select_entries(&self.mean, &quads);
        let sigma = &v_b + vm;
        let (solved_diff, det) = spd_solve(&sigma, &DMatrix::from_column_slice(diff.len(), 1, diff.as_slice()))?;
        let exponent = (diff.transpose() * &solved_diff)[(0, 0)];
        let pi = T::pi();
        let norm = pi.powf(T::from_usize_lossy(quads.len()) * T::lit(0.5)) * det.sqrt();
        let density = (-exponent).exp() / norm;

        if rest.is_empty() {
            return Ok(Conditioned {
                state: None,
                density,
            });
        }
        let (solved_cross, _) = spd_solve(&sigma, &v_ab.transpose())?;
        let v_a = select_rows_cols(&self.cov, &a_idx, &a_idx);
        let cov = symmetrize(&(v_a - &v_ab * solved_cross));
        let mean = select_entries(&self.mean, &a_idx) + &v_ab * solved_diff.column(0);
        Ok(Conditioned {
            state: Some(Self { mean, cov }),
            density,
        })
    }

    /// Probability that every mode in `modes` is found in vacuum:
    /// `2^m exp(−s_Bᵀ (V_B + I)⁻¹ s_B) / √det(V_B + I)`.
    pub fn off_probability(&self, modes: &[usize]) -> Result<T> {
        validate_modes(modes, self.num_modes())?;
        if modes.is_empty() {
            return Ok(T::one());
        }
        let idx = quadrature_indices(modes, self.num_modes());
        let v_b = select_rows_cols(&self.cov, &idx, &idx);
        let s_b = select_entries(&self.mean, &idx);
        let sigma = v_b + DMatrix::identity(idx.len(), idx.len());
        let (solved, det) = spd_solve(&sigma, &DMatrix::from_column_slice(s_b.len(), 1, s_b.as_slice()))?;
        let exponent = (s_b.transpose() * solved)[(0, 0)];
        let two_m = T::lit(2.0).powi(modes.len() as i32);
        Ok(two_m * (-exponent).exp() / det.sqrt())
    }

    /// Characteristic function `χ(ξ) = exp(−¼ ξᵀVξ − i sᵀξ)`, returned as
    /// `(modulus, phase)`.
    pub fn characteristic(&self, xi: &DVector<T>) -> (T, T) {
        let quad = (xi.transpose() * &self.cov * xi)[(0, 0)];
        let lin = self.mean.dot(xi);
        ((-quad * T::lit(0.25)).exp(), -lin)
    }
}

/// Outcome of [`GaussianState::condition`]. `state` is `None` when every mode
/// was measured.
#[derive(Debug, Clone)]
pub struct Conditioned<T: Real> {
    pub state: Option<GaussianState<T>>,
    pub density: T,
}

pub fn validate_modes(modes: &[usize], total: usize) -> Result<()> {
    for (i, &m) in modes.iter().enumerate() {
        if m >= total {
            return Err(Error::InvalidModes(format!(
                "mode {m} out of range for {total} modes"
            )));
        }
        if modes[..i].contains(&m) {
            return Err(Error::InvalidModes(format!("mode {m} listed twice")));
        }
    }
    Ok(())
}

pub fn vacuum<T: Real>(modes: usize) -> Result<GaussianState<T>> {
    if modes == 0 {
        return Err(invalid("modes", "need at least one mode"));
    }
    Ok(GaussianState {
        mean: DVector::zeros(2 * modes),
        cov: DMatrix::identity(2 * modes, 2 * modes),
    })
}

/// Single-mode thermal state with mean photon number `n`.
pub fn thermal<T: Real>(n: T) -> Result<GaussianState<T>> {
    if !(n >= T::zero()) {
        return Err(invalid("n", "mean photon number must be non-negative"));
    }
    Ok(GaussianState {
        mean: DVector::zeros(2),
        cov: DMatrix::identity(2, 2) * (T::lit(2.0) * n + T::one()),
    })
}

/// Coherent state `|α⟩`, `α = (x + i p)/√2`, given by its quadrature means.
pub fn coherent<T: Real>(x: T, p: T) -> GaussianState<T> {
    GaussianState {
        mean: DVector::from_vec(vec![x, p]),
        cov: DMatrix::identity(2, 2),
    }
}

/// Two-mode squeezed vacuum with mean photon number `mu` per arm.
pub fn tmsv<T: Real>(mu: T) -> Result<GaussianState<T>> {
    if !(mu >= T::zero()) || !mu.as_f64().is_finite() {
        return Err(invalid("mu", format!("{} must be finite and >= 0", mu.as_f64())));
    }
    let two = T::lit(2.0);
    let d = two * mu + T::one();
    let c = two * (mu * (mu + T::one())).sqrt();
    let mut cov = DMatrix::identity(4, 4) * d;
    cov[(0, 1)] = c;
    cov[(1, 0)] = c;
    cov[(2, 3)] = -c;
    cov[(3, 2)] = -c;
    Ok(GaussianState {
        mean: DVector::zeros(4),
        cov,
    })
}

/// Real `2M × 2M` matrix preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp<T: Real> {
    matrix: DMatrix<T>,
}

impl<T: Real> SymplecticOp<T> {
    pub fn new(matrix: DMatrix<T>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || n % 2 != 0 || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.ncols(),
            });
        }
        let dev = symplectic_deviation(&matrix);
        if dev > TOL.identity {
            return Err(Error::NotSymplectic(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_modes(&self) -> usize {
        self.dim() / 2
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Exact inverse `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn inverse(&self) -> Self {
        let w = omega::<T>(self.num_modes());
        Self {
            matrix: -(&w * self.matrix.transpose() * &w),
        }
    }
}

/// `max |S Ω Sᵀ − Ω|`.
pub fn symplectic_deviation<T: Real>(s: &DMatrix<T>) -> f64 {
    let w = omega::<T>(s.nrows() / 2);
    let d = s * &w * s.transpose() - w;
    d.iter().fold(0.0, |m, v| m.max(v.as_f64().abs()))
}

/// Beamsplitter of transmissivity `t` acting on `modes = (m₁, m₂)`:
///
/// ```text
/// x₁ →  √t x₁ + √(1−t) x₂      (same for p)
/// x₂ → −√(1−t) x₁ + √t x₂
/// ```
pub fn beamsplitter<T: Real>(t: T, modes: (usize, usize), total: usize) -> Result<SymplecticOp<T>> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(invalid("t", format!("{} not in [0, 1]", t.as_f64())));
    }
    validate_modes(&[modes.0, modes.1], total)?;
    let (a, b) = modes;
    let ct = t.sqrt();
    let st = (T::one() - t).sqrt();
    let mut m = DMatrix::identity(2 * total, 2 * total);
    for off in [0, total] {
        let (i, j) = (a + off, b + off);
        m[(i, i)] = ct;
        m[(i, j)] = st;
        m[(j, i)] = -st;
        m[(j, j)] = ct;
    }
    Ok(SymplecticOp { matrix: m })
}

/// Phase rotation `a → e^{−iθ} a` on one mode.
pub fn phase_rotation<T: Real>(theta: T, mode: usize, total: usize) -> Result<SymplecticOp<T>> {
    validate_modes(&[mode], total)?;
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = DMatrix::identity(2 * total, 2 * total);
    let (x, p) = (mode, total + mode);
    m[(x, x)] = c;
    m[(x, p)] = s;
    m[(p, x)] = -s;
    m[(p, p)] = c;
    Ok(SymplecticOp { matrix: m })
}

/// Single-mode squeezer `x → e^{−r} x`, `p → e^{r} p`.
pub fn squeezer<T: Real>(r: T, mode: usize, total: usize) -> Result<SymplecticOp<T>> {
    validate_modes(&[mode], total)?;
    let mut m = DMatrix::identity(2 * total, 2 * total);
    m[(mode, mode)] = (-r).exp();
    m[(total + mode, total + mode)] = r.exp();
    Ok(SymplecticOp { matrix: m })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// Projection on coherent states, `V_m = I`.
    Heterodyne,
    /// Ideal homodyne of `x` (infinitely squeezed projector).
    HomodyneX,
    HomodyneP,
    /// `x` of the first mode and `p` of the second, both ideal. The mixing
    /// beamsplitter is not part of the measurement.
    DualHomodyne,
    /// `|0⟩⟨0|` on every listed mode (heterodyne at the origin).
    VacuumProjection,
}

/// Gaussian projective measurement on `modes`.
///
/// `outcome` lists the values of the sharply measured quadratures in the
/// order used by [`GaussianMeasurement::measured_quadratures`]. Ideal
/// homodyne limits are taken analytically: the antisqueezed quadratures are
/// dropped and the squeezed ones get zero measurement variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasurement<T: Real> {
    pub modes: Vec<usize>,
    pub kind: MeasurementKind,
    pub outcome: DVector<T>,
}

impl<T: Real> GaussianMeasurement<T> {
    pub fn heterodyne(modes: Vec<usize>, outcome: DVector<T>) -> Self {
        Self {
            modes,
            kind: MeasurementKind::Heterodyne,
            outcome,
        }
    }

    pub fn homodyne_x(modes: Vec<usize>, outcome: DVector<T>) -> Self {
        Self {
            modes,
            kind: MeasurementKind::HomodyneX,
            outcome,
        }
    }

    pub fn homodyne_p(modes: Vec<usize>, outcome: DVector<T>) -> Self {
        Self {
            modes,
            kind: MeasurementKind::HomodyneP,
            outcome,
        }
    }

    pub fn dual_homodyne(modes: (usize, usize), gamma_x: T, gamma_y: T) -> Self {
        Self {
            modes: vec![modes.0, modes.1],
            kind: MeasurementKind::DualHomodyne,
            outcome: DVector::from_vec(vec![gamma_x, gamma_y]),
        }
    }

    pub fn vacuum(modes: Vec<usize>) -> Self {
        let n = 2 * modes.len();
        Self {
            modes,
            kind: MeasurementKind::VacuumProjection,
            outcome: DVector::zeros(n),
        }
    }

    /// Global quadrature indices kept by the measurement, for a state of
    /// `total` modes.
    pub fn measured_quadratures(&self, total: usize) -> Vec<usize> {
        match self.kind {
            MeasurementKind::Heterodyne | MeasurementKind::VacuumProjection => {
                quadrature_indices(&self.modes, total)
            }
            MeasurementKind::HomodyneX => self.modes.clone(),
            MeasurementKind::HomodyneP => self.modes.iter().map(|m| total + m).collect(),
            MeasurementKind::DualHomodyne => vec![self.modes[0], total + self.modes[1]],
        }
    }

    /// Covariance of the projecting Gaussian, or `None` for the singular
    /// homodyne limits.
    pub fn meas_cov(&self) -> Option<DMatrix<T>> {
        match self.kind {
            MeasurementKind::Heterodyne | MeasurementKind::VacuumProjection => {
                let n = 2 * self.modes.len();
                Some(DMatrix::identity(n, n))
            }
            _ => None,
        }
    }

    fn retained_block(&self, total: usize) -> (Vec<usize>, DMatrix<T>) {
        let q = self.measured_quadratures(total);
        let k = q.len();
        let vm = match self.kind {
            MeasurementKind::Heterodyne | MeasurementKind::VacuumProjection => {
                DMatrix::identity(k, k)
            }
            _ => DMatrix::zeros(k, k),
        };
        (q, vm)
    }
}
