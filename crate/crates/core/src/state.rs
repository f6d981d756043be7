//! State vectors and marked sets.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex probability amplitude.
pub type Amplitude = Complex64;

/// Tolerance on the norm of validated state vectors.
pub const NORM_TOLERANCE: f64 = 1e-10;

pub(crate) fn check_finite(amps: &[Complex64]) -> Result<()> {
    for (i, a) in amps.iter().enumerate() {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(())
}

/// Sum of squared moduli, accumulated sequentially in ascending index order
/// so that repeated runs are bit-identical.
pub(crate) fn squared_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// A pure state of the N-dimensional search register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// Validates dimension, finiteness and unit norm.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        check_finite(&amps)?;
        let deviation = (squared_norm(&amps).sqrt() - 1.0).abs();
        if deviation > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                deviation,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(Self { amps })
    }

    /// Wraps amplitudes produced by a norm-preserving transformation.
    ///
    /// Evolution never renormalizes, so that numerical drift stays
    /// observable; this constructor keeps that drift intact.
    pub fn from_amplitudes_unchecked(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    /// The basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if index >= dim {
            return Err(Error::BasisIndexOutOfRange { index, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// The uniform superposition of all `dim` basis states.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            amps: vec![amp; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        squared_norm(&self.amps).sqrt()
    }

    /// `| norm - 1 |`, the accumulated numerical drift of an evolved state.
    pub fn norm_drift(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }
}

/// The set of marked (target) basis-state indices, kept sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSet {
    indices: Vec<usize>,
}

impl MarkedSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::EmptyMarkedSet);
        }
        Ok(Self { indices })
    }

    /// The `r` lowest indices `0..r`, the default layout for sweeps.
    pub fn first(r: usize) -> Result<Self> {
        Self::new(0..r)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of marked states.
    pub fn count(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn max_index(&self) -> usize {
        *self.indices.last().expect("marked set is never empty")
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.max_index() >= dim {
            return Err(Error::MarkedIndexOutOfRange {
                index: self.max_index(),
                dim,
            });
        }
        Ok(())
    }

    /// Membership table for O(1) lookups inside O(N) loops.
    pub fn membership(&self, dim: usize) -> Vec<bool> {
        let mut table = vec![false; dim];
        for &i in &self.indices {
            table[i] = true;
        }
        table
    }
}
