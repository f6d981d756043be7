//! Weights, weighted means and variances of an initial distribution in the
//! ratio variables `amps_i / eta_i`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eta::EtaVector;
use crate::state::{MarkedSet, QuantumState};

/// Diffusion-vector entries at or below this modulus are treated as zero.
/// The iteration only changes the phase of such basis states, so their
/// probability mass is constant ("frozen"); they are excluded from the ratio
/// variables and carried as an additive offset instead.
pub const FROZEN_ETA_EPS: f64 = 1e-12;

/// First and second weighted moments of an initial amplitude distribution.
///
/// A mean is `None` when its class has no state with a non-vanishing
/// diffusion-vector entry; the closed-form pipeline refuses such inputs and
/// the class weight is reported as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    /// Squared projection of the diffusion vector onto the marked subspace.
    pub marked_weight: f64,
    /// Squared projection onto the unmarked subspace.
    pub unmarked_weight: f64,
    /// Weighted mean of `amps_i / eta_i` over active marked states.
    pub marked_mean: Option<Complex64>,
    /// Weighted mean over active unmarked states.
    pub unmarked_mean: Option<Complex64>,
    /// Weighted variance about the marked mean; a constant of motion.
    pub marked_variance: f64,
    /// Weighted variance about the unmarked mean; a constant of motion.
    pub unmarked_variance: f64,
    /// Probability mass on frozen marked states.
    pub frozen_marked_prob: f64,
    /// Probability mass on frozen unmarked states.
    pub frozen_unmarked_prob: f64,
}

impl MomentSummary {
    /// Both weighted means, or an error naming the class that lacks one.
    pub fn means(&self) -> Result<(Complex64, Complex64)> {
        let marked = self.marked_mean.ok_or(Error::UndefinedMean("marked"))?;
        let unmarked = self.unmarked_mean.ok_or(Error::UndefinedMean("unmarked"))?;
        Ok((marked, unmarked))
    }

    /// Total probability mass outside the ratio variables.
    pub fn frozen_prob(&self) -> f64 {
        self.frozen_marked_prob + self.frozen_unmarked_prob
    }
}

/// Squared projections of the diffusion vector onto the marked and unmarked
/// subspaces. Both sums run over all indices in ascending order; together
/// they exhaust the unit norm of the vector.
pub fn compute_weights(eta: &EtaVector, marked: &MarkedSet) -> Result<(f64, f64)> {
    marked.check_dim(eta.dim())?;
    let membership = marked.membership(eta.dim());
    let mut marked_weight = 0.0;
    let mut unmarked_weight = 0.0;
    for (i, e) in eta.entries().iter().enumerate() {
        if membership[i] {
            marked_weight += e.norm_sqr();
        } else {
            unmarked_weight += e.norm_sqr();
        }
    }
    Ok((marked_weight, unmarked_weight))
}

/// Computes the weighted means and variances of `state0` in the ratio
/// variables, plus the frozen probability masses. All sums run in ascending
/// index order.
pub fn compute_moments(
    state0: &QuantumState,
    eta: &EtaVector,
    marked: &MarkedSet,
) -> Result<MomentSummary> {
    if state0.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial state",
            got: state0.dim(),
            expected: eta.dim(),
        });
    }
    let (marked_weight, unmarked_weight) = compute_weights(eta, marked)?;
    let membership = marked.membership(eta.dim());

    let mut marked_sum = Complex64::new(0.0, 0.0);
    let mut unmarked_sum = Complex64::new(0.0, 0.0);
    let mut frozen_marked_prob = 0.0;
    let mut frozen_unmarked_prob = 0.0;
    let mut active_marked = false;
    let mut active_unmarked = false;
    for i in 0..eta.dim() {
        let e = eta.entries()[i];
        let a = state0.amplitudes()[i];
        if e.norm() <= FROZEN_ETA_EPS {
            if membership[i] {
                frozen_marked_prob += a.norm_sqr();
            } else {
                frozen_unmarked_prob += a.norm_sqr();
            }
        } else if membership[i] {
            marked_sum += e.conj() * a;
            active_marked = true;
        } else {
            unmarked_sum += e.conj() * a;
            active_unmarked = true;
        }
    }

    let marked_mean = active_marked.then(|| marked_sum / marked_weight);
    let unmarked_mean = active_unmarked.then(|| unmarked_sum / unmarked_weight);

    // Variances via |amps_i - eta_i * mean|^2 = |eta_i|^2 |amps_i/eta_i - mean|^2,
    // which avoids large intermediates for small eta entries.
    let mut marked_variance = 0.0;
    let mut unmarked_variance = 0.0;
    for i in 0..eta.dim() {
        let e = eta.entries()[i];
        let a = state0.amplitudes()[i];
        if e.norm() <= FROZEN_ETA_EPS {
            continue;
        }
        if membership[i] {
            if let Some(mean) = marked_mean {
                marked_variance += (a - e * mean).norm_sqr();
            }
        } else if let Some(mean) = unmarked_mean {
            unmarked_variance += (a - e * mean).norm_sqr();
        }
    }
    if active_marked {
        marked_variance = (marked_variance / marked_weight).max(0.0);
    }
    if active_unmarked {
        unmarked_variance = (unmarked_variance / unmarked_weight).max(0.0);
    }

    Ok(MomentSummary {
        // A class whose every state is frozen has no ratio variables at all;
        // its weight is reported as exactly zero.
        marked_weight: if active_marked { marked_weight } else { 0.0 },
        unmarked_weight: if active_unmarked { unmarked_weight } else { 0.0 },
        marked_mean,
        unmarked_mean,
        marked_variance,
        unmarked_variance,
        frozen_marked_prob,
        frozen_unmarked_prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, seeded_rng};
    use rand::Rng;

    fn uniform_case() -> (QuantumState, EtaVector, MarkedSet) {
        let eta = EtaVector::hadamard(2).unwrap();
        let state = QuantumState::uniform(4).unwrap();
        let marked = MarkedSet::new([0]).unwrap();
        (state, eta, marked)
    }

    #[test]
    fn uniform_weights() {
        let (_, eta, marked) = uniform_case();
        let (w_marked, w_unmarked) = compute_weights(&eta, &marked).unwrap();
        assert!((w_marked - 0.25).abs() < 1e-15);
        assert!((w_unmarked - 0.75).abs() < 1e-15);
    }

    #[test]
    fn basis_eta_puts_all_weight_on_marked() {
        let mut entries = vec![Complex64::new(0.0, 0.0); 4];
        entries[3] = Complex64::new(1.0, 0.0);
        let eta = EtaVector::from_vector(entries).unwrap();
        let marked = MarkedSet::new([3]).unwrap();
        let (w_marked, w_unmarked) = compute_weights(&eta, &marked).unwrap();
        assert_eq!(w_marked, 1.0);
        assert_eq!(w_unmarked, 0.0);
    }

    #[test]
    fn seeded_weights_match_direct_sum() {
        let eta = EtaVector::random(42, 8).unwrap();
        let marked = MarkedSet::new([0, 1]).unwrap();
        let (w_marked, _) = compute_weights(&eta, &marked).unwrap();
        let direct = eta.entries()[0].norm_sqr() + eta.entries()[1].norm_sqr();
        assert!((w_marked - direct).abs() < 1e-15);
    }

    #[test]
    fn uniform_moments_are_trivial() {
        let (state, eta, marked) = uniform_case();
        let m = compute_moments(&state, &eta, &marked).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!((m.marked_mean.unwrap() - one).norm() < 1e-14);
        assert!((m.unmarked_mean.unwrap() - one).norm() < 1e-14);
        assert!(m.marked_variance < 1e-14);
        assert!(m.unmarked_variance < 1e-14);
        assert_eq!(m.frozen_prob(), 0.0);
    }

    #[test]
    fn eta_image_moments_are_trivial_for_random_eta() {
        let eta = EtaVector::random(42, 8).unwrap();
        let state = eta.as_state();
        let marked = MarkedSet::new([2, 5]).unwrap();
        let m = compute_moments(&state, &eta, &marked).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!((m.marked_mean.unwrap() - one).norm() < 1e-12);
        assert!((m.unmarked_mean.unwrap() - one).norm() < 1e-12);
        assert!(m.marked_variance < 1e-12);
        assert!(m.unmarked_variance < 1e-12);
    }

    #[test]
    fn seeded_moments_match_independent_summation() {
        // Second implementation of the defining sums, written in the ratio
        // variables directly.
        let eta = EtaVector::random(42, 16).unwrap();
        let state = random_state(43, 16).unwrap();
        let marked = MarkedSet::new([0, 1, 2]).unwrap();
        let m = compute_moments(&state, &eta, &marked).unwrap();

        let mut w_marked = 0.0;
        let mut mean_marked = Complex64::new(0.0, 0.0);
        for &i in marked.indices() {
            w_marked += eta.entries()[i].norm_sqr();
        }
        for &i in marked.indices() {
            let ratio = state.amplitudes()[i] / eta.entries()[i];
            mean_marked += eta.entries()[i].norm_sqr() * ratio;
        }
        mean_marked /= w_marked;
        let mut var_marked = 0.0;
        for &i in marked.indices() {
            let ratio = state.amplitudes()[i] / eta.entries()[i];
            var_marked += eta.entries()[i].norm_sqr() * (ratio - mean_marked).norm_sqr();
        }
        var_marked /= w_marked;

        assert!((m.marked_weight - w_marked).abs() < 1e-14);
        assert!((m.marked_mean.unwrap() - mean_marked).norm() < 1e-12);
        assert!((m.marked_variance - var_marked).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_one_for_seeded_draws() {
        let mut rng = seeded_rng(9);
        for seed in 0..100 {
            let dim = 4 << (seed % 4);
            let eta = EtaVector::random(seed, dim).unwrap();
            let r = 1 + (rng.next_u64() as usize) % (dim / 2);
            let marked = MarkedSet::first(r).unwrap();
            let (w_marked, w_unmarked) = compute_weights(&eta, &marked).unwrap();
            assert!(
                (w_marked + w_unmarked - 1.0).abs() < 1e-12,
                "seed {seed}: weights sum to {}",
                w_marked + w_unmarked
            );
        }
    }

    #[test]
    fn eta_image_moments_trivial_across_seeds() {
        for seed in 0..100 {
            let eta = EtaVector::random(seed, 8).unwrap();
            if eta.entries().iter().any(|e| e.norm() <= 1e-6) {
                continue;
            }
            let m = compute_moments(&eta.as_state(), &eta, &MarkedSet::new([0]).unwrap()).unwrap();
            let one = Complex64::new(1.0, 0.0);
            assert!((m.marked_mean.unwrap() - one).norm() < 1e-10);
            assert!((m.unmarked_mean.unwrap() - one).norm() < 1e-10);
            assert!(m.marked_variance < 1e-10 && m.unmarked_variance < 1e-10);
        }
    }

    #[test]
    fn frozen_mass_is_split_by_class() {
        // eta vanishes on indices 0 (marked) and 2 (unmarked).
        let h = 1.0 / 2.0_f64.sqrt();
        let eta = EtaVector::from_vector(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, h),
        ])
        .unwrap();
        let state = QuantumState::uniform(4).unwrap();
        let marked = MarkedSet::new([0, 1]).unwrap();
        let m = compute_moments(&state, &eta, &marked).unwrap();
        assert!((m.frozen_marked_prob - 0.25).abs() < 1e-15);
        assert!((m.frozen_unmarked_prob - 0.25).abs() < 1e-15);
        assert!(m.marked_mean.is_some() && m.unmarked_mean.is_some());
    }

    #[test]
    fn fully_frozen_marked_class_reports_zero_weight() {
        let h = 1.0 / 2.0_f64.sqrt();
        let eta = EtaVector::from_vector(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let state = QuantumState::uniform(4).unwrap();
        let marked = MarkedSet::new([0]).unwrap();
        let m = compute_moments(&state, &eta, &marked).unwrap();
        assert_eq!(m.marked_weight, 0.0);
        assert!(m.marked_mean.is_none());
        assert!(m.means().is_err());
        assert!((m.frozen_marked_prob - 0.25).abs() < 1e-15);
    }
}
