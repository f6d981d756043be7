//! Brute-force evolution of the full state vector; the ground truth the
//! closed-form solution is checked against.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eta::EtaVector;
use crate::params::AlgorithmParams;
use crate::state::{MarkedSet, QuantumState};

/// Hard cap on requested iteration counts.
pub const MAX_ITERATIONS: u64 = 10_000_000;

/// Multiplies every marked amplitude by `e^{i gamma}`. O(r).
pub fn apply_oracle_rotation(state: &QuantumState, marked: &MarkedSet, gamma: f64) -> QuantumState {
    let phase = Complex64::from_polar(1.0, gamma);
    let mut amps = state.amplitudes().to_vec();
    for &i in marked.indices() {
        amps[i] *= phase;
    }
    QuantumState::from_amplitudes_unchecked(amps)
}

/// Applies the diffusion operator `(1 - e^{i beta}) |eta><eta| - I` through
/// its rank-one structure: one inner product and one axpy pass, O(N).
pub fn apply_diffusion(state: &QuantumState, eta: &EtaVector, beta: f64) -> QuantumState {
    debug_assert_eq!(state.dim(), eta.dim());
    let factor = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, beta);
    let overlap: Complex64 = eta
        .entries()
        .iter()
        .zip(state.amplitudes())
        .map(|(e, a)| e.conj() * a)
        .sum();
    let scaled = factor * overlap;
    let amps = eta
        .entries()
        .iter()
        .zip(state.amplitudes())
        .map(|(e, a)| scaled * e - a)
        .collect();
    QuantumState::from_amplitudes_unchecked(amps)
}

/// Dense-matrix form of the diffusion operator, kept as an independent
/// cross-check of the rank-one update. O(N^2).
pub fn apply_diffusion_dense(state: &QuantumState, eta: &EtaVector, beta: f64) -> QuantumState {
    debug_assert_eq!(state.dim(), eta.dim());
    let dim = eta.dim();
    let factor = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, beta);
    let matrix = Array2::from_shape_fn((dim, dim), |(i, j)| {
        let outer = factor * eta.entries()[i] * eta.entries()[j].conj();
        if i == j {
            outer - 1.0
        } else {
            outer
        }
    });
    let amps = Array1::from(state.amplitudes().to_vec());
    QuantumState::from_amplitudes_unchecked(matrix.dot(&amps).to_vec())
}

/// One full iteration: oracle rotation first, then diffusion.
pub fn grover_step(state: &QuantumState, params: &AlgorithmParams) -> QuantumState {
    let rotated = apply_oracle_rotation(state, params.marked(), params.gamma());
    apply_diffusion(&rotated, params.eta(), params.beta())
}

/// Probability of measuring any marked state, summed in ascending index
/// order.
pub fn marked_probability(state: &QuantumState, marked: &MarkedSet) -> f64 {
    marked
        .indices()
        .iter()
        .map(|&i| state.amplitudes()[i].norm_sqr())
        .sum()
}

/// The stored state history of a run, indexed by iteration number.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<QuantumState>,
    params: AlgorithmParams,
}

impl Trajectory {
    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }

    pub fn state(&self, t: usize) -> &QuantumState {
        &self.states[t]
    }

    pub fn params(&self) -> &AlgorithmParams {
        &self.params
    }

    /// The last iteration index, i.e. `states().len() - 1`.
    pub fn t_end(&self) -> u64 {
        (self.states.len() - 1) as u64
    }

    /// Marked-measurement probability at every stored time.
    pub fn marked_probabilities(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| marked_probability(s, self.params.marked()))
            .collect()
    }
}

/// Evolves `t_end` iterations, invoking `visit` at every time step
/// (including t = 0) without storing the history. Returns the final state.
pub fn run_with(
    state0: &QuantumState,
    params: &AlgorithmParams,
    t_end: u64,
    mut visit: impl FnMut(u64, &QuantumState),
) -> Result<QuantumState> {
    if t_end > MAX_ITERATIONS {
        return Err(Error::IterationGuard {
            got: t_end,
            guard: MAX_ITERATIONS,
        });
    }
    if state0.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial state",
            got: state0.dim(),
            expected: params.dim(),
        });
    }
    let mut current = state0.clone();
    visit(0, &current);
    for t in 1..=t_end {
        current = grover_step(&current, params);
        visit(t, &current);
    }
    Ok(current)
}

/// Evolves `t_end` iterations and stores every intermediate state.
pub fn run(state0: &QuantumState, params: &AlgorithmParams, t_end: u64) -> Result<Trajectory> {
    let mut states = Vec::new();
    run_with(state0, params, t_end, |_, s| states.push(s.clone()))?;
    Ok(Trajectory {
        states,
        params: params.clone(),
    })
}
