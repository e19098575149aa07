//! Small dense linear-algebra helpers in the xxpp quadrature ordering.
//!
//! Every matrix in this crate orders the quadratures as
//! `(x₁, …, x_M, p₁, …, p_M)`, so mode `m` owns rows `m` and `M + m`.
//! Many other libraries use the interleaved xpxp ordering; do not mix them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{Real, TOL};

/// Symplectic form `Ω = [[0, I], [−I, 0]]` for `modes` modes.
pub fn omega<T: Real>(modes: usize) -> DMatrix<T> {
    let n = 2 * modes;
    let mut w = DMatrix::zeros(n, n);
    for i in 0..modes {
        w[(i, modes + i)] = T::one();
        w[(modes + i, i)] = -T::one();
    }
    w
}

/// Quadrature row indices `[x_{m₁}, …, x_{m_k}, p_{m₁}, …, p_{m_k}]` of the given modes.
pub fn quadrature_indices(modes: &[usize], total_modes: usize) -> Vec<usize> {
    modes
        .iter()
        .copied()
        .chain(modes.iter().map(|&m| total_modes + m))
        .collect()
}

pub fn select_rows_cols<T: Real>(m: &DMatrix<T>, rows: &[usize], cols: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn select_entries<T: Real>(v: &DVector<T>, idx: &[usize]) -> DVector<T> {
    DVector::from_fn(idx.len(), |i, _| v[idx[i]])
}

pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

/// Largest `|m_ij − m_ji|` relative to `max(1, max|m_ij|)`.
pub fn relative_asymmetry<T: Real>(m: &DMatrix<T>) -> f64 {
    let mut scale = 1.0f64;
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            scale = scale.max(m[(i, j)].as_f64().abs());
            if j > i {
                worst = worst.max((m[(i, j)] - m[(j, i)]).as_f64().abs());
            }
        }
    }
    worst / scale
}

pub fn check_symmetric<T: Real>(m: &DMatrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let asym = relative_asymmetry(m);
    if asym > TOL.symmetry || !asym.is_finite() {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Symplectic spectrum `ν₁ ≤ … ≤ ν_M` of a symmetric `2M × 2M` matrix.
///
/// For positive-definite input the spectrum is read off the singular values of
/// the antisymmetric matrix `Lᵀ Ω L` with `V = L Lᵀ`, which keeps the error
/// proportional to `‖V‖` rather than `‖V‖²`. Other input falls back to the
/// moduli of the eigenvalues of `Ω V`. Values within the physicality
/// tolerance below one are clamped to one.
pub fn symplectic_spectrum<T: Real>(cov: &DMatrix<T>) -> Result<Vec<T>> {
    check_symmetric(cov)?;
    let n = cov.nrows();
    if n % 2 != 0 || n == 0 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: n,
        });
    }
    let modes = n / 2;
    let cov = symmetrize(cov);
    let w = omega::<T>(modes);
    let mut vals: Vec<T> = match cov.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let k = l.transpose() * &w * &l;
            k.singular_values().iter().copied().collect()
        }
        None => (&w * &cov)
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re * z.re + z.im * z.im).sqrt())
            .collect(),
    };
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let one = T::one();
    let tol = T::lit(physicality_tolerance(&cov));
    Ok(vals
        .chunks(2)
        .map(|pair| {
            let v = (pair[0] + pair[1]) * T::lit(0.5);
            if v < one && v >= one - tol {
                one
            } else {
                v
            }
        })
        .collect())
}

/// Allowed undershoot of the smallest symplectic eigenvalue below one.
///
/// Rounding the entries of `V` perturbs its symplectic spectrum by roughly
/// `ε‖V‖²`, which dominates the fixed tolerance for strongly squeezed states.
pub fn physicality_tolerance<T: Real>(cov: &DMatrix<T>) -> f64 {
    let scale = cov.iter().fold(1.0f64, |m, v| m.max(v.as_f64().abs()));
    let eps = T::default_epsilon().as_f64();
    TOL.physicality.max(8.0 * eps * scale * scale)
}

/// Solve `A x = b` for symmetric positive-definite `A`, returning `(A⁻¹ b, det A)`.
pub fn spd_solve<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<(DMatrix<T>, T)> {
    let ch = symmetrize(a)
        .cholesky()
        .ok_or(Error::SingularMeasurement)?;
    let diag = ch.l_dirty().diagonal();
    let mut det = T::one();
    for d in diag.iter() {
        det *= *d * *d;
    }
    // Reject blocks whose pivots collapse relative to the largest one.
    let max_pivot = diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
    let min_pivot = diag.iter().fold(max_pivot, |m, d| m.min(d.abs()));
    if !(min_pivot > max_pivot * T::lit(1e-12)) {
        return Err(Error::SingularMeasurement);
    }
    Ok((ch.solve(b), det))
}

/// Partial transposition of a two-mode covariance matrix: flips `p` of mode 1.
pub fn partial_transpose_two_mode<T: Real>(cov: &DMatrix<T>) -> DMatrix<T> {
    let mut p = DMatrix::<T>::identity(4, 4);
    p[(3, 3)] = -T::one();
    &p * cov * &p
}

/// Plain-text row-major dump with 17 significant digits.
pub fn dump_matrix<T: Real>(m: &DMatrix<T>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:.16e}", m[(i, j)].as_f64()))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_antisymmetric_and_squares_to_minus_identity() {
        let w = omega::<f64>(3);
        assert_eq!(w.transpose(), -&w);
        assert_eq!(&w * &w, -DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn thermal_spectrum() {
        let v = DMatrix::<f64>::identity(2, 2) * 5.0;
        let nu = symplectic_spectrum(&v).unwrap();
        assert!((nu[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_rejected() {
        let mut v = DMatrix::<f64>::identity(2, 2);
        v[(0, 1)] = 0.1;
        assert!(matches!(symplectic_spectrum(&v), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn dump_uses_seventeen_digits() {
        let m = DMatrix::<f64>::from_row_slice(1, 2, &[1.0 / 3.0, 2.0]);
        let s = dump_matrix(&m);
        assert_eq!(s, "3.3333333333333331e-1 2.0000000000000000e0\n");
    }
}
