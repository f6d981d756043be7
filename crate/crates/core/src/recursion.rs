//! Exact closed-form solution of the iteration dynamics.
//!
//! In the ratio variables `amps_i / eta_i` all marked states share one
//! update rule and all unmarked states another, coupled only through the
//! weighted class means. The means evolve linearly under a fixed 2x2 matrix;
//! diagonalizing it gives the full time dependence. Each state's deviation
//! from its class mean is a constant of motion (up to a known phase), so the
//! complete state vector at any time can be rebuilt from the evolved means
//! and the initial deviations.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eta::EtaVector;
use crate::moments::{MomentSummary, FROZEN_ETA_EPS};
use crate::state::{MarkedSet, QuantumState};

/// Eigenvalue gap below which the spectrum is treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Off-diagonal magnitude below which the mean-evolution matrix is treated
/// as decoupled. A decoupled matrix (e.g. beta = 0) carries no oscillation
/// between the classes, so the mode decomposition is routed the same way as
/// a degenerate spectrum: through the matrix-power path.
pub const DECOUPLING_EPS: f64 = 1e-12;

/// The 2x2 matrix advancing the pair (marked mean, unmarked mean) by one
/// iteration. Row order matches that pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl EvolutionMatrix {
    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn apply(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Binary exponentiation; exact for any spectrum, degenerate included.
    pub fn pow(&self, mut t: u64) -> Self {
        let mut result = Self::identity();
        let mut base = *self;
        while t > 0 {
            if t & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            t >>= 1;
        }
        result
    }
}

/// Builds the mean-evolution matrix from the rotation angles and subspace
/// weights.
pub fn evolution_matrix(
    beta: f64,
    gamma: f64,
    marked_weight: f64,
    unmarked_weight: f64,
) -> EvolutionMatrix {
    let diffusion_factor = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, beta);
    let oracle_phase = Complex64::from_polar(1.0, gamma);
    EvolutionMatrix {
        a: diffusion_factor * oracle_phase * marked_weight - oracle_phase,
        b: diffusion_factor * unmarked_weight,
        c: diffusion_factor * oracle_phase * marked_weight,
        d: diffusion_factor * unmarked_weight - 1.0,
    }
}

/// Eigenstructure of the mean-evolution matrix. Both eigenvalues lie on the
/// unit circle; `omega` in [0, pi] splits their phases symmetrically about
/// pi + (beta + gamma) / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenStructure {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// Oscillation frequency of the measurement probability.
    pub omega: f64,
    /// Set when the eigenvalue gap is below [`DEGENERACY_GAP`] or the matrix
    /// is decoupled; consumers must then use the matrix-power path.
    pub degenerate: bool,
}

impl EigenStructure {
    pub fn gap(&self) -> f64 {
        (self.lambda_plus - self.lambda_minus).norm()
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % TAU;
    if d < 0.0 {
        d += TAU;
    }
    d.min(TAU - d)
}

/// Solves the characteristic polynomial of the matrix and recovers the
/// oscillation frequency from the angle/weight relation
/// `cos omega = W_marked cos((beta+gamma)/2) + W_unmarked cos((beta-gamma)/2)`,
/// labelling the eigenvalue nearest phase `pi + (beta+gamma)/2 + omega` as
/// the plus mode.
pub fn eigen_decompose(
    matrix: &EvolutionMatrix,
    beta: f64,
    gamma: f64,
    marked_weight: f64,
    unmarked_weight: f64,
) -> EigenStructure {
    let half_sum = 0.5 * (beta + gamma);
    let half_diff = 0.5 * (beta - gamma);
    let cos_omega =
        (marked_weight * half_sum.cos() + unmarked_weight * half_diff.cos()).clamp(-1.0, 1.0);
    let omega = cos_omega.acos();
    let omega_plus = PI + half_sum + omega;
    let omega_minus = PI + half_sum - omega;

    // Stable quadratic: take the larger-magnitude root first, then recover
    // the other from the determinant so neither suffers cancellation.
    let trace = matrix.trace();
    let det = matrix.determinant();
    let sq = (trace * trace - 4.0 * det).sqrt();
    let plus_branch = (trace + sq) / 2.0;
    let minus_branch = (trace - sq) / 2.0;
    let first = if plus_branch.norm() >= minus_branch.norm() {
        plus_branch
    } else {
        minus_branch
    };
    let second = if first.norm() > 0.0 { det / first } else { first };

    let (lambda_plus, lambda_minus) =
        if circular_distance(first.arg(), omega_plus) <= circular_distance(second.arg(), omega_plus)
        {
            (first, second)
        } else {
            (second, first)
        };

    let gap = (lambda_plus - lambda_minus).norm();
    let decoupled = matrix.b.norm() <= DECOUPLING_EPS && matrix.c.norm() <= DECOUPLING_EPS;
    EigenStructure {
        lambda_plus,
        lambda_minus,
        omega_plus,
        omega_minus,
        omega,
        degenerate: gap < DEGENERACY_GAP || decoupled,
    }
}

/// Mode coefficients of the closed-form mean evolution:
///
/// ```text
/// marked_mean(t)   = marked_plus   e^{i omega_plus t} - marked_minus   e^{i omega_minus t}
/// unmarked_mean(t) = unmarked_plus e^{i omega_plus t} - unmarked_minus e^{i omega_minus t}
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionCoefficients {
    pub marked_plus: Complex64,
    pub marked_minus: Complex64,
    pub unmarked_plus: Complex64,
    pub unmarked_minus: Complex64,
}

/// Projects the initial means onto the two eigenmodes.
///
/// The unmarked coefficients use the row form
/// `((lambda - d) unmarked_mean - c marked_mean) / (lambda_minus - lambda_plus)`,
/// which equals the eigenvector ratio `(lambda - a) / b` times the marked
/// coefficient whenever `b` is nonzero but stays finite as `b` vanishes.
pub fn solve_coefficients(
    moments: &MomentSummary,
    matrix: &EvolutionMatrix,
    eigen: &EigenStructure,
) -> Result<SolutionCoefficients> {
    if eigen.degenerate {
        return Err(Error::DegenerateSpectrum { gap: eigen.gap() });
    }
    let (marked_mean, unmarked_mean) = moments.means()?;
    let denom = eigen.lambda_minus - eigen.lambda_plus;
    Ok(SolutionCoefficients {
        marked_plus: ((eigen.lambda_minus - matrix.a) * marked_mean - matrix.b * unmarked_mean)
            / denom,
        marked_minus: ((eigen.lambda_plus - matrix.a) * marked_mean - matrix.b * unmarked_mean)
            / denom,
        unmarked_plus: ((eigen.lambda_minus - matrix.d) * unmarked_mean - matrix.c * marked_mean)
            / denom,
        unmarked_minus: ((eigen.lambda_plus - matrix.d) * unmarked_mean - matrix.c * marked_mean)
            / denom,
    })
}

/// Closed-form class means after `t` iterations.
pub fn means_at(
    coeffs: &SolutionCoefficients,
    eigen: &EigenStructure,
    t: u64,
) -> (Complex64, Complex64) {
    let tf = t as f64;
    let mode_plus = Complex64::from_polar(1.0, eigen.omega_plus * tf);
    let mode_minus = Complex64::from_polar(1.0, eigen.omega_minus * tf);
    (
        coeffs.marked_plus * mode_plus - coeffs.marked_minus * mode_minus,
        coeffs.unmarked_plus * mode_plus - coeffs.unmarked_minus * mode_minus,
    )
}

/// Class means after `t` iterations by repeated squaring of the evolution
/// matrix. Valid for any spectrum; the reference path in degenerate cases.
pub fn means_by_power(
    matrix: &EvolutionMatrix,
    moments: &MomentSummary,
    t: u64,
) -> Result<(Complex64, Complex64)> {
    Ok(matrix.pow(t).apply(moments.means()?))
}

/// Initial amplitude of a basis state whose diffusion-vector entry vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenAmplitude {
    pub amplitude: Complex64,
    pub marked: bool,
}

/// Per-state constants of motion: each active state's initial deviation from
/// its class mean in the ratio variables, plus the initial amplitudes of the
/// frozen states so a full state vector can be rebuilt at any time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeviationTable {
    pub marked: BTreeMap<usize, Complex64>,
    pub unmarked: BTreeMap<usize, Complex64>,
    pub frozen: BTreeMap<usize, FrozenAmplitude>,
}

/// Splits the initial state into per-state deviations from the class means.
pub fn compute_deviations(
    state0: &QuantumState,
    eta: &EtaVector,
    marked: &MarkedSet,
    moments: &MomentSummary,
) -> Result<DeviationTable> {
    if state0.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial state",
            got: state0.dim(),
            expected: eta.dim(),
        });
    }
    marked.check_dim(eta.dim())?;
    let membership = marked.membership(eta.dim());
    let mut table = DeviationTable::default();
    for i in 0..eta.dim() {
        let e = eta.entries()[i];
        let a = state0.amplitudes()[i];
        if e.norm() <= FROZEN_ETA_EPS {
            table.frozen.insert(
                i,
                FrozenAmplitude {
                    amplitude: a,
                    marked: membership[i],
                },
            );
        } else if membership[i] {
            let mean = moments.marked_mean.ok_or(Error::UndefinedMean("marked"))?;
            table.marked.insert(i, a / e - mean);
        } else {
            let mean = moments
                .unmarked_mean
                .ok_or(Error::UndefinedMean("unmarked"))?;
            table.unmarked.insert(i, a / e - mean);
        }
    }
    Ok(table)
}

/// Rebuilds the full state at time `t` from evolved class means and the
/// constants of motion. The deviation of an active marked state rides the
/// phase `(-1)^t e^{i gamma t}`, an active unmarked one rides `(-1)^t`;
/// frozen states keep their initial amplitude times the same diagonal
/// phases, matching the exact operators entry for entry.
pub fn reconstruct_state(
    marked_mean: Complex64,
    unmarked_mean: Complex64,
    deviations: &DeviationTable,
    eta: &EtaVector,
    gamma: f64,
    t: u64,
) -> QuantumState {
    let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
    let marked_twist = Complex64::from_polar(1.0, gamma * t as f64) * sign;
    let mut amps = vec![Complex64::new(0.0, 0.0); eta.dim()];
    for (&i, deviation) in &deviations.marked {
        amps[i] = eta.entries()[i] * (marked_mean + marked_twist * deviation);
    }
    for (&i, deviation) in &deviations.unmarked {
        amps[i] = eta.entries()[i] * (unmarked_mean + sign * deviation);
    }
    for (&i, frozen) in &deviations.frozen {
        amps[i] = if frozen.marked {
            marked_twist * frozen.amplitude
        } else {
            sign * frozen.amplitude
        };
    }
    QuantumState::from_amplitudes_unchecked(amps)
}
