//! Haar-random unitaries.
//!
//! A complex Ginibre matrix is orthonormalized column by column (modified
//! Gram–Schmidt, applied twice). The implied triangular factor has a positive
//! real diagonal, which is exactly the phase fixing that makes the result
//! Haar distributed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Seed for every stochastic routine in the crate. Equal seeds give
/// bit-identical unitaries and samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    /// Generator for this seed.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Generator for one independent stream of this seed (e.g. one shot).
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(index);
        rng
    }

    /// A derived seed, for drawing families of independent objects.
    pub fn derive(self, index: u64) -> RandomSeed {
        RandomSeed(self.stream(index).random())
    }
}

/// `n x n` matrix of i.i.d. standard complex Gaussians, `E|z|² = 1`.
pub fn ginibre(n: usize, seed: RandomSeed) -> ComplexMatrix {
    let mut rng = seed.rng();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    ComplexMatrix::new(n, n, data).expect("n > 0")
}

/// Haar-distributed `dim x dim` unitary.
pub fn haar_unitary(dim: usize, seed: RandomSeed) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::Dimension("Haar unitary of dimension 0".into()));
    }
    let g = ginibre(dim, seed);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..dim {
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                let (done, rest) = cols.split_at_mut(j);
                for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            u[(i, j)] = v;
        }
    }
    Ok(u)
}
