//! Exact simulation and closed-form prediction of generalized
//! amplitude-amplification searches.
//!
//! A search iteration is the product of two unitaries on an `N`-dimensional
//! register: an oracle rotation that multiplies every marked amplitude by
//! `e^{i gamma}`, followed by the diffusion operator
//! `(1 - e^{i beta}) |eta><eta| - I` built from a unit vector `eta`.
//! The crate provides two independent engines for the resulting dynamics and
//! the machinery to cross-check them:
//!
//! * [`simulator`] evolves the full state vector step by step using the
//!   rank-one structure of the diffusion operator. This is the ground truth.
//! * [`recursion`] solves the same dynamics exactly in closed form. In the
//!   ratio variables `amps_i / eta_i` every marked state moves in unison with
//!   the weighted marked mean, and likewise for the unmarked states; the two
//!   means evolve under a fixed 2x2 matrix whose eigenstructure gives the
//!   full time dependence, while each state's deviation from its class mean
//!   is a constant of motion.
//! * [`analysis`] turns the closed-form solution into the success-probability
//!   sinusoid, optimal measurement times, peak probabilities, regime
//!   classification, a two-measurement hedging strategy and bounds on the
//!   initial means.
//!
//! All operations are pure functions of immutable inputs and safe to call
//! concurrently. Seeded constructions are bit-for-bit reproducible.

pub mod analysis;
pub mod error;
pub mod eta;
pub mod moments;
pub mod params;
pub mod random;
pub mod recursion;
pub mod simulator;
pub mod state;

pub use analysis::{
    classify_regime, initial_mean_bounds, optimal_time, oscillation_profile, p_max_closed_form,
    probability_at, two_point_strategy, ClosedFormPeak, MeanBoundReport, MeasurementPlan,
    OscillationProfile, Regime, TwoPointPlan,
};
pub use error::{Error, Result};
pub use eta::{EtaProvenance, EtaVector};
pub use moments::{compute_moments, compute_weights, MomentSummary, FROZEN_ETA_EPS};
pub use params::AlgorithmParams;
pub use recursion::{
    compute_deviations, eigen_decompose, evolution_matrix, means_at, means_by_power,
    reconstruct_state, solve_coefficients, DeviationTable, EigenStructure, EvolutionMatrix,
    FrozenAmplitude, SolutionCoefficients,
};
pub use simulator::{
    apply_diffusion, apply_diffusion_dense, apply_oracle_rotation, grover_step,
    marked_probability, run, run_with, Trajectory,
};
pub use state::{Amplitude, MarkedSet, QuantumState};
