//! ON-OFF photodetection heralding on Gaussian states.
//!
//! The ON element `I − |0⟩⟨0|` is not Gaussian, but a product of ON
//! projectors expands by inclusion–exclusion into a signed sum of vacuum
//! projections. Each term conditions the Gaussian state on vacuum in a
//! subset of modes, so the heralded state is a signed mixture of Gaussians
//! and its first and second moments follow in closed form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{validate_modes, GaussianMeasurement, GaussianState};
use crate::linalg::symplectic_spectrum;
use crate::scalar::{Real, TOL};

/// Assignment of every mode of a state to OFF, ON or kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnOffPattern {
    pub off_modes: Vec<usize>,
    pub on_modes: Vec<usize>,
    pub kept_modes: Vec<usize>,
}

impl OnOffPattern {
    pub fn new(off_modes: Vec<usize>, on_modes: Vec<usize>, kept_modes: Vec<usize>) -> Self {
        Self {
            off_modes,
            on_modes,
            kept_modes,
        }
    }

    /// Checks that the three sets are disjoint and cover `0..total`.
    pub fn validate(&self, total: usize) -> Result<()> {
        let all: Vec<usize> = self
            .off_modes
            .iter()
            .chain(&self.on_modes)
            .chain(&self.kept_modes)
            .copied()
            .collect();
        validate_modes(&all, total)?;
        if all.len() != total {
            return Err(Error::InvalidModes(format!(
                "pattern covers {} of {} modes",
                all.len(),
                total
            )));
        }
        Ok(())
    }
}

/// One signed Gaussian term on the kept modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent<T: Real> {
    pub weight: T,
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
}

/// Signed Gaussian mixture representing an unnormalized heralded state.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGaussianMixture<T: Real> {
    pub components: Vec<MixtureComponent<T>>,
    pub total_weight: T,
}

impl<T: Real> SignedGaussianMixture<T> {
    pub fn from_components(components: Vec<MixtureComponent<T>>) -> Self {
        let total_weight = kahan_sum(components.iter().map(|c| c.weight));
        Self {
            components,
            total_weight,
        }
    }

    pub fn single(weight: T, state: &GaussianState<T>) -> Self {
        Self::from_components(vec![MixtureComponent {
            weight,
            mean: state.mean().clone(),
            cov: state.cov().clone(),
        }])
    }

    /// Concatenates component lists; used to combine heralding patterns.
    pub fn merge(mixtures: impl IntoIterator<Item = Self>) -> Self {
        let comps = mixtures.into_iter().flat_map(|m| m.components).collect();
        Self::from_components(comps)
    }

    pub fn dim(&self) -> usize {
        self.components.first().map(|c| c.mean.len()).unwrap_or(0)
    }

    /// Applies a displacement to every component.
    pub fn displaced(&self, d: &DVector<T>) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| MixtureComponent {
                weight: c.weight,
                mean: &c.mean + d,
                cov: c.cov.clone(),
            })
            .collect();
        Self {
            components,
            total_weight: self.total_weight,
        }
    }
}

/// Heralding probability together with the moments of the heralded state.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldResult<T: Real> {
    pub probability: T,
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
    pub mixture: SignedGaussianMixture<T>,
}

impl<T: Real> HeraldResult<T> {
    pub fn from_mixture(mixture: SignedGaussianMixture<T>) -> Result<Self> {
        let (mean, cov) = q_moments(&mixture)?;
        Ok(Self {
            probability: mixture.total_weight,
            mean,
            cov,
            mixture,
        })
    }

    pub fn state(&self) -> Result<GaussianState<T>> {
        GaussianState::new(self.mean.clone(), self.cov.clone())
    }
}

pub(crate) fn kahan_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Subsets of `0..n` as bit masks, ordered by size then value.
fn subsets_by_size(n: usize) -> Vec<u64> {
    assert!(n < 64, "too many ON modes");
    let mut masks: Vec<u64> = (0..(1u64 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
}

/// Inclusion–exclusion expansion of `pattern` applied to `state`.
pub fn herald_mixture<T: Real>(
    state: &GaussianState<T>,
    pattern: &OnOffPattern,
) -> Result<SignedGaussianMixture<T>> {
    pattern.validate(state.num_modes())?;
    let kept = &pattern.kept_modes;
    let mut components = Vec::with_capacity(1 << pattern.on_modes.len());
    for mask in subsets_by_size(pattern.on_modes.len()) {
        let mut vac = pattern.off_modes.clone();
        vac.extend(
            pattern
                .on_modes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &m)| m),
        );
        let sign = if mask.count_ones() % 2 == 0 {
            T::one()
        } else {
            -T::one()
        };
        let p0 = state.off_probability(&vac)?;
        let (mean, cov) = if kept.is_empty() {
            (DVector::zeros(0), DMatrix::zeros(0, 0))
        } else if vac.is_empty() {
            let s = state.partial_trace(kept)?;
            s.into_parts()
        } else {
            let order: Vec<usize> = kept.iter().chain(&vac).copied().collect();
            let marginal = state.partial_trace(&order)?;
            let local: Vec<usize> = (kept.len()..order.len()).collect();
            let cond = marginal.condition(&GaussianMeasurement::vacuum(local))?;
            cond.state
                .expect("kept modes survive conditioning")
                .into_parts()
        };
        components.push(MixtureComponent {
            weight: sign * p0,
            mean,
            cov,
        });
    }
    Ok(SignedGaussianMixture::from_components(components))
}

/// Heralding probability `Tr[(Π₀^{⊗off} ⊗ Π₁^{⊗on}) ρ]`.
pub fn herald_probability<T: Real>(state: &GaussianState<T>, pattern: &OnOffPattern) -> Result<T> {
    Ok(herald_mixture(state, pattern)?.total_weight)
}

/// Heralded state on the kept modes (in `pattern.kept_modes` order).
pub fn herald<T: Real>(state: &GaussianState<T>, pattern: &OnOffPattern) -> Result<HeraldResult<T>> {
    if pattern.kept_modes.is_empty() {
        return Err(Error::InvalidModes(
            "moment extraction needs at least one kept mode".into(),
        ));
    }
    HeraldResult::from_mixture(herald_mixture(state, pattern)?)
}

pub fn off_probability<T: Real>(state: &GaussianState<T>, modes: &[usize]) -> Result<T> {
    state.off_probability(modes)
}

/// Mean and covariance of a normalized signed Gaussian mixture.
///
/// Moments are taken from the Husimi Q distribution: each component
/// contributes a Q covariance `(V_k + I)/2`, and the state covariance is
/// `2·Cov_Q − I`.
pub fn q_moments<T: Real>(mixture: &SignedGaussianMixture<T>) -> Result<(DVector<T>, DMatrix<T>)> {
    let w = mixture.total_weight;
    if !(w.as_f64() > TOL.probability_floor) {
        return Err(Error::HeraldImpossible(w.as_f64()));
    }
    let n = mixture.dim();
    if n == 0 {
        return Err(Error::InvalidModes("mixture has no kept modes".into()));
    }
    let half = T::lit(0.5);
    let mut first = DVector::<T>::zeros(n);
    let mut second = DMatrix::<T>::zeros(n, n);
    for i in 0..n {
        first[i] = kahan_sum(mixture.components.iter().map(|c| c.weight * c.mean[i])) / w;
        for j in i..n {
            let v = kahan_sum(mixture.components.iter().map(|c| {
                let delta = if i == j { T::one() } else { T::zero() };
                c.weight * ((c.cov[(i, j)] + delta) * half + c.mean[i] * c.mean[j])
            })) / w;
            second[(i, j)] = v;
            second[(j, i)] = v;
        }
    }
    let central = second - &first * first.transpose();
    let cov = central * T::lit(2.0) - DMatrix::identity(n, n);
    if n % 2 == 0 {
        if let Ok(nu) = symplectic_spectrum(&cov) {
            let min = nu[0].as_f64();
            if !(min >= 1.0 - crate::linalg::physicality_tolerance(&cov)) {
                return Err(Error::MomentPrecisionLoss(format!(
                    "smallest symplectic eigenvalue {min:.6e} with total weight {:.3e} over {} components",
                    w.as_f64(),
                    mixture.components.len()
                )));
            }
        } else {
            return Err(Error::MomentPrecisionLoss("covariance not symmetric".into()));
        }
    }
    Ok((first, cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{coherent, thermal, tmsv, vacuum};
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_is_always_off() {
        let v = vacuum::<f64>(1).unwrap();
        let off = OnOffPattern::new(vec![0], vec![], vec![]);
        let on = OnOffPattern::new(vec![], vec![0], vec![]);
        assert_relative_eq!(herald_probability(&v, &off).unwrap(), 1.0);
        assert_relative_eq!(herald_probability(&v, &on).unwrap(), 0.0);
        let v3 = vacuum::<f64>(3).unwrap();
        for m in 0..3 {
            let p = OnOffPattern::new(vec![], vec![m], (0..3).filter(|&k| k != m).collect());
            assert_relative_eq!(herald_probability(&v3, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn thermal_on_probability() {
        for mu in [0.01, 0.3, 2.0] {
            let st = tmsv(mu).unwrap().partial_trace(&[1]).unwrap();
            let p = herald_probability(&st, &OnOffPattern::new(vec![], vec![0], vec![])).unwrap();
            assert_relative_eq!(p, mu / (mu + 1.0), epsilon = 1e-14);
            assert_relative_eq!(off_probability(&st, &[0]).unwrap(), 1.0 / (1.0 + mu), epsilon = 1e-14);
        }
    }

    #[test]
    fn coherent_off_probability() {
        let (ax, ap) = (0.3f64, -0.5f64);
        let st = coherent(2f64.sqrt() * ax, 2f64.sqrt() * ap);
        let p = off_probability(&st, &[0]).unwrap();
        assert_relative_eq!(p, (-(ax * ax + ap * ap)).exp(), epsilon = 1e-14);
    }

    #[test]
    fn product_states_factorize() {
        let a = thermal(0.4f64).unwrap();
        let b = coherent(0.5, 0.2);
        let prod = a.tensor(&b);
        let p_on_a = herald_probability(&a, &OnOffPattern::new(vec![], vec![0], vec![])).unwrap();
        let p_off_b = off_probability(&b, &[0]).unwrap();
        let joint = herald_probability(&prod, &OnOffPattern::new(vec![1], vec![0], vec![])).unwrap();
        assert_relative_eq!(joint, p_on_a * p_off_b, epsilon = 1e-14);
    }

    #[test]
    fn inclusion_exclusion_two_modes() {
        let st = tmsv(0.7f64).unwrap().pure_loss(0.6, 1).unwrap();
        let both_on = herald_probability(&st, &OnOffPattern::new(vec![], vec![0, 1], vec![])).unwrap();
        let expect = 1.0 - off_probability(&st, &[0]).unwrap() - off_probability(&st, &[1]).unwrap()
            + off_probability(&st, &[0, 1]).unwrap();
        assert_relative_eq!(both_on, expect, epsilon = 1e-12);
    }

    #[test]
    fn single_component_recovers_gaussian() {
        let st = tmsv(0.4f64).unwrap().displace(&DVector::from_vec(vec![0.1, 0.2, 0.3, -0.1])).unwrap();
        let mix = SignedGaussianMixture::single(0.37, &st);
        let (m, c) = q_moments(&mix).unwrap();
        assert!((m - st.mean()).amax() < 1e-14);
        assert!((c - st.cov()).amax() < 1e-13);
    }

    #[test]
    fn identical_components_collapse() {
        let st = tmsv(0.4f64).unwrap();
        let comps = (0..4)
            .map(|_| MixtureComponent {
                weight: 0.2,
                mean: st.mean().clone(),
                cov: st.cov().clone(),
            })
            .collect();
        let (m, c) = q_moments(&SignedGaussianMixture::from_components(comps)).unwrap();
        assert!(m.amax() < 1e-15);
        assert!((c - st.cov()).amax() < 1e-13);
    }

    #[test]
    fn empty_kept_set_refuses_moments() {
        let st = tmsv(0.4f64).unwrap();
        let p = OnOffPattern::new(vec![0], vec![1], vec![]);
        assert!(herald(&st, &p).is_err());
        assert!(herald_probability(&st, &p).is_ok());
    }

    #[test]
    fn impossible_herald_is_flagged() {
        let st = vacuum::<f64>(2).unwrap();
        let p = OnOffPattern::new(vec![], vec![1], vec![0]);
        assert!(matches!(herald(&st, &p), Err(Error::HeraldImpossible(_))));
    }

    #[test]
    fn pattern_must_cover_modes() {
        let st = vacuum::<f64>(3).unwrap();
        assert!(herald_probability(&st, &OnOffPattern::new(vec![0], vec![1], vec![])).is_err());
        assert!(herald_probability(&st, &OnOffPattern::new(vec![0], vec![0], vec![1, 2])).is_err());
    }

    #[test]
    fn on_heralded_tmsv_arm_matches_photon_sum() {
        // Clicking on one arm of a TMSV removes the n = 0 term of the other.
        let mu = 0.5f64;
        let st = tmsv(mu).unwrap();
        let r = herald(&st, &OnOffPattern::new(vec![], vec![1], vec![0])).unwrap();
        let x = mu / (1.0 + mu);
        let pn = |n: i32| (1.0 - x) * x.powi(n);
        let (mut w, mut nbar) = (0.0, 0.0);
        for n in 1..400 {
            w += pn(n);
            nbar += n as f64 * pn(n);
        }
        assert_relative_eq!(r.probability, w, epsilon = 1e-12);
        assert_relative_eq!(r.cov[(0, 0)], 2.0 * nbar / w + 1.0, epsilon = 1e-10);
    }
}
