//! Two-dimensional quadrature rules for averaging over homodyne outcomes.

use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};
use nalgebra::Matrix2;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Nodes and weights of a rule on the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule2D<T: Real> {
    pub nodes: Vec<[T; 2]>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule2D<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn order(n: usize, name: &'static str) -> Result<NonZeroUsize> {
    NonZeroUsize::new(n).ok_or_else(|| invalid(name, "must be positive"))
}

/// Tensor Gauss–Hermite rule for `E[f(γ)]` with `γ ~ N(0, Σ)`.
///
/// Nodes are placed in whitened coordinates `γ = √2 L z`, `Σ = L Lᵀ`;
/// the weights sum to one.
pub fn gaussian_rule<T: Real>(sigma: &Matrix2<T>, n: usize) -> Result<Rule2D<T>> {
    let rule = GaussHermite::new(order(n, "nodes")?);
    let pairs = rule.as_node_weight_pairs();
    let l11 = sigma[(0, 0)].sqrt();
    if !(l11 > T::zero()) {
        return Err(invalid("sigma", "not positive definite"));
    }
    let l21 = sigma[(1, 0)] / l11;
    let l22 = (sigma[(1, 1)] - l21 * l21).sqrt();
    if !(l22 > T::zero()) {
        return Err(invalid("sigma", "not positive definite"));
    }
    let s2 = T::lit(std::f64::consts::SQRT_2);
    let inv_pi = T::lit(std::f64::consts::FRAC_1_PI);
    let mut nodes = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for &(z1, w1) in pairs {
        for &(z2, w2) in pairs {
            let (z1, z2) = (T::lit(z1), T::lit(z2));
            nodes.push([s2 * l11 * z1, s2 * (l21 * z1 + l22 * z2)]);
            weights.push(T::lit(w1 * w2) * inv_pi);
        }
    }
    Ok(Rule2D { nodes, weights })
}

/// Area rule on the disc `|γ| ≤ radius`: Gauss–Legendre in the radius,
/// equispaced angles. Weights integrate `dγ_x dγ_y`.
pub fn disc_rule<T: Real>(radius: T, n_radial: usize, n_angular: usize) -> Result<Rule2D<T>> {
    if !(radius > T::zero()) {
        return Err(invalid("radius", "must be positive"));
    }
    let rule = GaussLegendre::new(order(n_radial, "radial nodes")?);
    let n_ang = order(n_angular, "angular nodes")?.get();
    let half = radius * T::lit(0.5);
    let dtheta = T::two_pi() / T::from_usize_lossy(n_ang);
    let mut nodes = Vec::with_capacity(n_radial * n_ang);
    let mut weights = Vec::with_capacity(n_radial * n_ang);
    for &(u, w) in rule.as_node_weight_pairs() {
        let rho = half * (T::lit(u) + T::one());
        let wr = half * T::lit(w) * rho * dtheta;
        for k in 0..n_ang {
            // half-step offset keeps nodes off the axes
            let theta = dtheta * (T::from_usize_lossy(k) + T::lit(0.5));
            nodes.push([rho * theta.cos(), rho * theta.sin()]);
            weights.push(wr);
        }
    }
    Ok(Rule2D { nodes, weights })
}
