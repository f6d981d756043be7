//! The diffusion vector and its constructions.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::random;
use crate::state::{check_finite, squared_norm, QuantumState};

/// Largest qubit count accepted by the uniform construction (2^24 entries).
pub const MAX_QUBITS: u32 = 24;

/// Entrywise tolerance on `U†U = I` for explicit unitaries.
pub const UNITARY_TOLERANCE: f64 = 1e-8;

/// Norm tolerance for diffusion vectors.
pub const ETA_NORM_TOLERANCE: f64 = 1e-10;

/// How a diffusion vector was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaProvenance {
    /// Uniform amplitudes from the Hadamard transform of the zero register.
    Hadamard,
    /// Column of an explicitly supplied unitary.
    ExplicitUnitary { column: usize },
    /// Supplied entry by entry, e.g. loaded from a file.
    ExplicitVector,
    /// Seeded Gaussian construction.
    SeededRandom { seed: u64 },
}

/// The unit vector around which the diffusion operator reflects: the image
/// of a predefined basis state under the preparation unitary. That unitary
/// enters the dynamics only through this vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaVector {
    eta: Vec<Complex64>,
    provenance: EtaProvenance,
}

impl EtaVector {
    /// Uniform-amplitude vector on `2^n_qubits` states.
    pub fn hadamard(n_qubits: u32) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCountOutOfRange {
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            eta: vec![amp; dim],
            provenance: EtaProvenance::Hadamard,
        })
    }

    /// Column `s` of an explicit unitary, i.e. the unitary applied to the
    /// basis state `|s>`. Unitarity is checked entrywise against
    /// [`UNITARY_TOLERANCE`].
    pub fn from_unitary(u: &Array2<Complex64>, s: usize) -> Result<Self> {
        let (rows, cols) = u.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::DimensionTooSmall(rows));
        }
        let mut max_deviation: f64 = 0.0;
        for j in 0..cols {
            for k in j..cols {
                let mut overlap = Complex64::new(0.0, 0.0);
                for i in 0..rows {
                    overlap += u[(i, j)].conj() * u[(i, k)];
                }
                if j == k {
                    overlap -= 1.0;
                }
                max_deviation = max_deviation.max(overlap.norm());
            }
        }
        if max_deviation > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary {
                max_deviation,
                tolerance: UNITARY_TOLERANCE,
            });
        }
        if s >= cols {
            return Err(Error::BasisIndexOutOfRange {
                index: s,
                dim: cols,
            });
        }
        Ok(Self {
            eta: (0..rows).map(|i| u[(i, s)]).collect(),
            provenance: EtaProvenance::ExplicitUnitary { column: s },
        })
    }

    /// Wraps an explicit unit vector.
    pub fn from_vector(eta: Vec<Complex64>) -> Result<Self> {
        if eta.len() < 2 {
            return Err(Error::DimensionTooSmall(eta.len()));
        }
        check_finite(&eta)?;
        let deviation = (squared_norm(&eta).sqrt() - 1.0).abs();
        if deviation > ETA_NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                deviation,
                tolerance: ETA_NORM_TOLERANCE,
            });
        }
        Ok(Self {
            eta,
            provenance: EtaProvenance::ExplicitVector,
        })
    }

    /// Deterministic pseudo-random unit vector: `2 * dim` standard normals
    /// from a seeded generator, paired into complex entries and normalized.
    pub fn random(seed: u64, dim: usize) -> Result<Self> {
        Ok(Self {
            eta: random::random_unit_vector(seed, dim)?,
            provenance: EtaProvenance::SeededRandom { seed },
        })
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.eta
    }

    pub fn provenance(&self) -> &EtaProvenance {
        &self.provenance
    }

    /// The register state whose amplitudes are the vector itself: the result
    /// of running the preparation unitary on the predefined basis state.
    pub fn as_state(&self) -> QuantumState {
        QuantumState::from_amplitudes_unchecked(self.eta.clone())
    }
}
