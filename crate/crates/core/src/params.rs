//! The full parameter set of one search experiment.

use crate::error::{Error, Result};
use crate::eta::EtaVector;
use crate::state::MarkedSet;

/// Rotation angles, diffusion vector and marked set; fully determines the
/// iteration unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmParams {
    beta: f64,
    gamma: f64,
    eta: EtaVector,
    marked: MarkedSet,
}

impl AlgorithmParams {
    pub fn new(beta: f64, gamma: f64, eta: EtaVector, marked: MarkedSet) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::NonFiniteAngle("beta"));
        }
        if !gamma.is_finite() {
            return Err(Error::NonFiniteAngle("gamma"));
        }
        marked.check_dim(eta.dim())?;
        Ok(Self {
            beta,
            gamma,
            eta,
            marked,
        })
    }

    /// Diffusion rotation angle, in radians.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Oracle rotation angle, in radians.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> &EtaVector {
        &self.eta
    }

    pub fn marked(&self) -> &MarkedSet {
        &self.marked
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }

    /// Non-fatal conditions worth surfacing to a user. A marked set covering
    /// more than half the space is legal and fully evaluated, but outside
    /// the assumptions behind the analytic discussion.
    pub fn warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let (dim, r) = (self.dim(), self.marked.count());
        if 2 * r > dim {
            warnings.push(format!(
                "marked set has {r} of {dim} states; more than half the space is marked"
            ));
        }
        warnings
    }
}
