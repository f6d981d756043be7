//! Deterministic seeded generation of vectors, states and unitaries.
//!
//! Every construction draws from a ChaCha12 stream seeded with a caller
//! supplied integer, so identical seeds give bit-identical output on every
//! run and platform.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::state::{squared_norm, QuantumState};

/// The generator behind every seeded construction in this crate.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// `2 * dim` standard normals paired into complex entries, in index order
/// (real part first, then imaginary part, entry by entry).
pub fn random_complex_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Normalized version of [`random_complex_vector`].
pub fn random_unit_vector_from<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> Result<Vec<Complex64>> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let mut v = random_complex_vector(rng, dim);
    let norm = squared_norm(&v).sqrt();
    for a in &mut v {
        *a /= norm;
    }
    Ok(v)
}

/// Seeded unit vector; same seed, same vector, bit for bit.
pub fn random_unit_vector(seed: u64, dim: usize) -> Result<Vec<Complex64>> {
    random_unit_vector_from(&mut seeded_rng(seed), dim)
}

/// Seeded random state of the register.
pub fn random_state(seed: u64, dim: usize) -> Result<QuantumState> {
    Ok(QuantumState::from_amplitudes_unchecked(random_unit_vector(
        seed, dim,
    )?))
}

/// Deterministic random unitary: a seeded complex Gaussian matrix
/// orthonormalized column by column, with the phase convention that the
/// triangular factor's diagonal stays real and positive.
pub fn random_unitary(seed: u64, dim: usize) -> Result<Array2<Complex64>> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let mut rng = seeded_rng(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| random_complex_vector(&mut rng, dim))
        .collect();
    for j in 0..dim {
        // Two Gram-Schmidt passes keep orthogonality near machine precision.
        for _ in 0..2 {
            for k in 0..j {
                let overlap: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..dim {
                    let basis = cols[k][i];
                    cols[j][i] -= overlap * basis;
                }
            }
        }
        let norm = squared_norm(&cols[j]).sqrt();
        for entry in &mut cols[j] {
            *entry /= norm;
        }
    }
    Ok(Array2::from_shape_fn((dim, dim), |(i, j)| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_vector() {
        let a = random_unit_vector(7, 4).unwrap();
        let b = random_unit_vector(7, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = random_unit_vector(7, 4).unwrap();
        let b = random_unit_vector(8, 4).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn unit_norm() {
        let v = random_unit_vector(7, 4).unwrap();
        assert!((squared_norm(&v).sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_small_rejected() {
        assert!(random_unit_vector(7, 1).is_err());
        assert!(random_unitary(7, 1).is_err());
    }

    #[test]
    fn unitary_columns_orthonormal() {
        let u = random_unitary(42, 8).unwrap();
        for j in 0..8 {
            for k in 0..8 {
                let overlap: Complex64 = (0..8).map(|i| u[(i, j)].conj() * u[(i, k)]).sum();
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (overlap - expected).norm() < 1e-12,
                    "column overlap ({j},{k}) = {overlap}"
                );
            }
        }
    }
}
