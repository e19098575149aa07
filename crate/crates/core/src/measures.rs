//! Entanglement quantifiers for Gaussian states, in bits.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{partial_transpose_two_mode, quadrature_indices, select_rows_cols, symplectic_spectrum};
use crate::optim::nelder_mead;
use crate::scalar::{Real, TOL};

/// Von Neumann entropy of a single-mode thermal state with symplectic
/// eigenvalue `x`, i.e. mean photon number `(x − 1)/2`.
pub fn thermal_entropy_g<T: Real>(x: T) -> Result<T> {
    let xf = x.as_f64();
    if !(xf >= 1.0 - TOL.physicality) {
        return Err(invalid("x", format!("{xf} is below 1")));
    }
    if xf <= 1.0 {
        return Ok(T::zero());
    }
    let half = T::lit(0.5);
    let up = (x + T::one()) * half;
    let down = (x - T::one()) * half;
    Ok(up * up.log2() - down * down.log2())
}

fn g_f64(x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let (up, down) = ((x + 1.0) / 2.0, (x - 1.0) / 2.0);
    up * up.log2() - down * down.log2()
}

/// Reverse coherent information `g(ν_A) − Σ g(ν_AB)` of a two-mode state
/// with `A` = mode 0.
pub fn gaussian_rci<T: Real>(state: &GaussianState<T>) -> Result<T> {
    if state.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.num_modes(),
        });
    }
    gaussian_rci_partition(state, &[0])
}

/// Reverse coherent information `H(A) − H(AB)` for an arbitrary subset `A`.
pub fn gaussian_rci_partition<T: Real>(state: &GaussianState<T>, a_modes: &[usize]) -> Result<T> {
    state.check_physical()?;
    let idx = quadrature_indices(a_modes, state.num_modes());
    let va = select_rows_cols(state.cov(), &idx, &idx);
    let mut h = T::zero();
    for nu in symplectic_spectrum(&va)? {
        h += thermal_entropy_g(nu)?;
    }
    for nu in state.symplectic_eigenvalues()? {
        h -= thermal_entropy_g(nu)?;
    }
    Ok(h)
}

/// Repeaterless bound `−log₂(1 − η)` of a pure-loss channel.
pub fn direct_capacity<T: Real>(eta: T) -> Result<T> {
    if !(eta >= T::zero() && eta < T::one()) {
        return Err(invalid("eta", format!("{} not in [0, 1)", eta.as_f64())));
    }
    Ok(-(T::one() - eta).log2())
}

/// Smallest symplectic eigenvalue of the partially transposed two-mode covariance.
pub fn pt_min_eigenvalue<T: Real>(state: &GaussianState<T>) -> Result<T> {
    if state.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.num_modes(),
        });
    }
    let nu = symplectic_spectrum(&partial_transpose_two_mode(state.cov()))?;
    Ok(nu[0])
}

/// Local-symplectic invariants `(a, b, c₁, c₂)` of the standard form
/// `x-block [[a, c₁], [c₁, b]]`, `p-block [[a, c₂], [c₂, b]]`, with
/// `c₁ ≥ |c₂|` and `c₂` carrying the sign of `det C`.
pub fn standard_form<T: Real>(state: &GaussianState<T>) -> Result<(f64, f64, f64, f64)> {
    if state.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.num_modes(),
        });
    }
    let v = state.cov();
    let at = |i: usize, j: usize| v[(i, j)].as_f64();
    // xxpp: mode 0 owns rows 0, 2; mode 1 owns rows 1, 3.
    let det2 = |i: usize, j: usize, k: usize, l: usize| at(i, k) * at(j, l) - at(i, l) * at(j, k);
    let det_a = det2(0, 2, 0, 2);
    let det_b = det2(1, 3, 1, 3);
    let det_c = det2(0, 2, 1, 3);
    let det_v = v.map(|x| x.as_f64()).determinant();
    let a = det_a.sqrt();
    let b = det_b.sqrt();
    let sum = (det_a * det_b + det_c * det_c - det_v) / (a * b);
    let disc = (sum * sum - 4.0 * det_c * det_c).max(0.0).sqrt();
    let big = ((sum + disc) / 2.0).max(0.0);
    let small = ((sum - disc) / 2.0).max(0.0);
    let c1 = big.sqrt();
    let c2 = small.sqrt() * if det_c < 0.0 { -1.0 } else { 1.0 };
    Ok((a, b, c1, c2))
}

/// Covariance of the standard form with the given invariants.
pub fn standard_form_cov(a: f64, b: f64, c1: f64, c2: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            a, c1, 0.0, 0.0, //
            c1, b, 0.0, 0.0, //
            0.0, 0.0, a, c2, //
            0.0, 0.0, c2, b,
        ],
    )
}

/// Constraint data for pure states of the x/p block-diagonal family.
struct Family {
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
}

impl Family {
    /// Smallest `t = e^{2r} ≥ 1` such that a pure state with local squeezings
    /// `(α, β)` and two-mode squeezing `r` lies below the standard form.
    fn t_min(&self, alpha: f64, beta: f64) -> Option<f64> {
        let Family { a, b, c1, c2 } = *self;
        let (ax, bx, ex) = ((2.0 * alpha).exp(), (2.0 * beta).exp(), (alpha + beta).exp());
        let (ap, bp, ep) = (1.0 / ax, 1.0 / bx, 1.0 / ex);
        let cmax = (a / ax).min(b / bx).min(a / ap).min(b / bp);
        if cmax < 1.0 {
            return None;
        }
        let t_max = cmax + (cmax * cmax - 1.0).max(0.0).sqrt();
        // Determinant conditions times 2t, as quadratics in t.
        let sx = a * bx + b * ax;
        let sp = a * bp + b * ap;
        let qx = [
            -(sx + 2.0 * c1 * ex),
            2.0 * (a * b + ax * bx - c1 * c1),
            2.0 * c1 * ex - sx,
        ];
        let qp = [
            -(sp - 2.0 * c2 * ep),
            2.0 * (a * b + ap * bp - c2 * c2),
            -2.0 * c2 * ep - sp,
        ];
        let eval = |q: &[f64; 3], t: f64| q[0] + q[1] * t + q[2] * t * t;
        let scale = (a * b).max(1.0) * t_max;
        let tol = 1e-12 * scale;
        let feasible = |t: f64| eval(&qx, t) >= -tol && eval(&qp, t) >= -tol;
        let mut cands = vec![1.0, t_max];
        for q in [&qx, &qp] {
            // The vertex covers a double root lost to rounding.
            let vertex = if q[2] != 0.0 { -q[1] / (2.0 * q[2]) } else { f64::NAN };
            for r in quadratic_roots(q).into_iter().chain(std::iter::once(vertex)) {
                if r > 1.0 && r < t_max {
                    cands.push(r);
                }
            }
        }
        cands.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cands.into_iter().find(|&t| feasible(t))
    }

    /// Geometric mean of `X` and `P⁻¹`: a pure state of the family that always
    /// lies below the standard form. Returns `(α, β)`.
    fn geometric_start(&self) -> Option<(f64, f64)> {
        let x = Matrix2::new(self.a, self.c1, self.c1, self.b);
        let p = Matrix2::new(self.a, self.c2, self.c2, self.b);
        let p_inv = p.try_inverse()?;
        let xs = sqrtm2(&x)?;
        let xs_inv = xs.try_inverse()?;
        let inner = sqrtm2(&(xs_inv * p_inv * xs_inv))?;
        let g = xs * inner * xs;
        let det = g.determinant();
        if !(det > 0.0) {
            return None;
        }
        let c = (g[(0, 0)] * g[(1, 1)] / det).sqrt();
        Some((0.5 * (g[(0, 0)] / c).ln(), 0.5 * (g[(1, 1)] / c).ln()))
    }
}

fn sqrtm2(m: &Matrix2<f64>) -> Option<Matrix2<f64>> {
    let eig = m.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < 0.0) {
        return None;
    }
    let d = Matrix2::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Some(eig.eigenvectors * d * eig.eigenvectors.transpose())
}

fn quadratic_roots(q: &[f64; 3]) -> Vec<f64> {
    let (c, b, a) = (q[0], q[1], q[2]);
    let scale = a.abs().max(b.abs()).max(c.abs());
    if a.abs() <= 1e-15 * scale {
        return if b.abs() > 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let s = disc.sqrt();
    let q = -0.5 * (b + b.signum() * s);
    let mut out = vec![q / a];
    if q != 0.0 {
        out.push(c / q);
    }
    out
}

/// Gaussian entanglement of formation of a two-mode state.
///
/// PPT states return 0 and pure states `g(√det V_A)`. Otherwise the state is
/// brought to standard form and the infimum over pure states below it is
/// taken over pure states whose covariance is block diagonal in `x` and `p`.
/// For fixed local squeezings the smallest admissible two-mode squeezing is
/// found in closed form; the two local squeezings are searched on a grid
/// and refined with Nelder–Mead.
pub fn geof_two_mode<T: Real>(state: &GaussianState<T>) -> Result<T> {
    state.check_physical()?;
    if pt_min_eigenvalue(state)?.as_f64() >= 1.0 {
        return Ok(T::zero());
    }
    let (a, b, c1, c2) = standard_form(state)?;
    let det_v = state.cov().map(|x| x.as_f64()).determinant();
    if (det_v - 1.0).abs() < 1e-10 * det_v.max(1.0) {
        return Ok(T::lit(g_f64(a)));
    }
    let fam = Family { a, b, c1, c2 };
    let cost = |p: &[f64]| fam.t_min(p[0], p[1]).unwrap_or(1e30);
    let (ra, rb) = (0.5 * a.ln(), 0.5 * b.ln());
    let mut starts: Vec<(f64, [f64; 2])> = Vec::new();
    if let Some((al, be)) = fam.geometric_start() {
        let p = [al, be];
        starts.push((cost(&p), p));
    }
    let n = 12;
    for i in 0..=n {
        for j in 0..=n {
            let p = [
                -ra + 2.0 * ra * i as f64 / n as f64,
                -rb + 2.0 * rb * j as f64 / n as f64,
            ];
            starts.push((cost(&p), p));
        }
    }
    starts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    if !(starts[0].0 < 1e29) {
        return Err(Error::NotPhysical(det_v));
    }
    let step = [(ra / n as f64).max(1e-6), (rb / n as f64).max(1e-6)];
    let mut best = starts[0].0;
    for (_, p) in starts.iter().take(2) {
        let (x, fx) = nelder_mead(cost, p, &step, 600, 1e-13);
        // Restart from the result to escape early simplex collapse.
        let small = [step[0] * 0.1, step[1] * 0.1];
        let (_, f2) = nelder_mead(cost, &x, &small, 600, 1e-14);
        let fx = fx.min(f2);
        best = best.min(fx);
    }
    let c = 0.5 * (best + 1.0 / best);
    Ok(T::lit(g_f64(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{thermal, tmsv};
    use approx::assert_relative_eq;

    #[test]
    fn g_values() {
        assert_eq!(thermal_entropy_g(1.0f64).unwrap(), 0.0);
        assert_relative_eq!(thermal_entropy_g(3.0f64).unwrap(), 2.0, epsilon = 1e-14);
        assert_eq!(thermal_entropy_g(1.0 - 1e-10f64).unwrap(), 0.0);
        assert!(thermal_entropy_g(0.9f64).is_err());
        let mut prev = -1.0;
        for i in 0..1000 {
            let v = thermal_entropy_g(1.0 + i as f64 * 0.099).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn direct_capacity_values() {
        assert_relative_eq!(direct_capacity(0.5f64).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(direct_capacity(0.01f64).unwrap(), 0.0144995, epsilon = 1e-7);
        assert_relative_eq!(direct_capacity(0.1f64).unwrap(), 0.1520031, epsilon = 1e-7);
        assert!(direct_capacity(1.0f64).is_err());
    }

    #[test]
    fn rci_of_pure_and_product_states() {
        assert_relative_eq!(gaussian_rci(&tmsv(1.0f64).unwrap()).unwrap(), 2.0, epsilon = 1e-12);
        let prod = thermal(0.5f64).unwrap().tensor(&thermal(1.0).unwrap());
        let h_b = thermal_entropy_g(3.0f64).unwrap();
        assert_relative_eq!(gaussian_rci(&prod).unwrap(), -h_b, epsilon = 1e-12);
    }

    #[test]
    fn rci_approaches_direct_capacity() {
        let st = tmsv(1e3f64).unwrap().pure_loss(0.5, 1).unwrap();
        let r = gaussian_rci(&st).unwrap();
        assert!(r < 1.0 && r > 0.99, "{r}");
    }

    #[test]
    fn geof_of_pure_and_separable_states() {
        assert_relative_eq!(geof_two_mode(&tmsv(1.0f64).unwrap()).unwrap(), 2.0, epsilon = 1e-6);
        let prod = thermal(0.5f64).unwrap().tensor(&thermal(1.0).unwrap());
        assert_eq!(geof_two_mode(&prod).unwrap(), 0.0);
    }

    #[test]
    fn standard_form_of_tmsv() {
        let (a, b, c1, c2) = standard_form(&tmsv(1.0f64).unwrap()).unwrap();
        assert_relative_eq!(a, 3.0, epsilon = 1e-12);
        assert_relative_eq!(b, 3.0, epsilon = 1e-12);
        assert_relative_eq!(c1, 8f64.sqrt(), epsilon = 1e-7);
        assert_relative_eq!(c2, -8f64.sqrt(), epsilon = 1e-7);
    }

    fn symmetric_closed_form(nu: f64) -> f64 {
        if nu >= 1.0 {
            return 0.0;
        }
        let cp = (nu.powf(-0.5) + nu.sqrt()).powi(2) / 4.0;
        let cm = (nu.powf(-0.5) - nu.sqrt()).powi(2) / 4.0;
        cp * cp.log2() - if cm > 0.0 { cm * cm.log2() } else { 0.0 }
    }

    #[test]
    fn symmetric_lossy_tmsv_matches_closed_form() {
        for &(mu, eta) in &[(0.1, 0.9), (1.0, 0.5), (3.0, 0.8), (0.5, 0.99), (2.0, 0.3)] {
            let st = tmsv(mu).unwrap().pure_loss(eta, 0).unwrap().pure_loss(eta, 1).unwrap();
            let nu = pt_min_eigenvalue(&st).unwrap();
            let expect = symmetric_closed_form(nu);
            let got = geof_two_mode(&st).unwrap();
            assert!((got - expect).abs() < 1e-6, "mu {mu} eta {eta}: {got} vs {expect}");
        }
    }
}
