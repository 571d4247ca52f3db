//! Matrix permanents.
//!
//! [`permanent_ryser`] is the production kernel: inclusion–exclusion over
//! column subsets visited in Gray-code order, so each step updates the row
//! sums with a single column add or subtract (O(2ⁿ·n) overall). The subset
//! index space is cut into a fixed number of contiguous chunks that depend on
//! `n` only; chunk sums are combined by a pairwise tree in chunk order, which
//! makes the result bit-identical regardless of the rayon worker count.
//!
//! [`permanent_naive`] sums over all permutations and is kept as the
//! independent oracle for small matrices.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest order accepted by the permutation-sum oracle.
pub const NAIVE_LIMIT: usize = 9;
/// Largest order accepted by Ryser's formula.
pub const RYSER_LIMIT: usize = 30;

/// Below this order everything runs in a single chunk.
const PARALLEL_THRESHOLD: usize = 14;
const CHUNK_BITS: usize = 6;

fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "permanent of a non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

/// Sum over all permutations σ of `∏ A[i, σ(i)]`.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<Complex64> {
    let n = check_square(a)?;
    if n > NAIVE_LIMIT {
        return Err(Error::SizeLimit {
            what: "naive permanent order",
            value: n,
            limit: NAIVE_LIMIT,
        });
    }
    let mut used = vec![false; n];
    Ok(permutation_sum(a, 0, &mut used, Complex64::new(1.0, 0.0)))
}

fn permutation_sum(a: &ComplexMatrix, row: usize, used: &mut [bool], acc: Complex64) -> Complex64 {
    let n = a.rows();
    if row == n {
        return acc;
    }
    let mut total = Complex64::new(0.0, 0.0);
    for col in 0..n {
        if !used[col] {
            used[col] = true;
            total += permutation_sum(a, row + 1, used, acc * a[(row, col)]);
            used[col] = false;
        }
    }
    total
}

/// Ryser's inclusion–exclusion formula with Gray-code row-sum updates.
pub fn permanent_ryser(a: &ComplexMatrix) -> Result<Complex64> {
    let n = check_square(a)?;
    if n > RYSER_LIMIT {
        return Err(Error::SizeLimit {
            what: "Ryser permanent order",
            value: n,
            limit: RYSER_LIMIT,
        });
    }
    let subsets: u64 = 1 << n;
    let chunks: u64 = if n < PARALLEL_THRESHOLD {
        1
    } else {
        1 << CHUNK_BITS
    };
    let per_chunk = subsets / chunks;

    let partial: Vec<Complex64> = if chunks == 1 {
        vec![ryser_range(a, 1, subsets)]
    } else {
        (0..chunks)
            .into_par_iter()
            .map(|c| ryser_range(a, (c * per_chunk).max(1), (c + 1) * per_chunk))
            .collect()
    };
    let sum = tree_sum(&partial);
    Ok(if n % 2 == 0 { sum } else { -sum })
}

/// Signed contribution of Gray-code steps `lo..hi` (`lo ≥ 1`).
///
/// Step `k` visits subset `g(k) = k ^ (k >> 1)`; it differs from `g(k-1)` in
/// bit `trailing_zeros(k)`.
fn ryser_range(a: &ComplexMatrix, lo: u64, hi: u64) -> Complex64 {
    let n = a.rows();
    let zero = Complex64::new(0.0, 0.0);
    let start = (lo - 1) ^ ((lo - 1) >> 1);
    let mut row_sums = vec![zero; n];
    for (i, s) in row_sums.iter_mut().enumerate() {
        let row = a.row(i);
        for (j, &v) in row.iter().enumerate() {
            if start >> j & 1 == 1 {
                *s += v;
            }
        }
    }
    let mut total = zero;
    for k in lo..hi {
        let j = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        if gray >> j & 1 == 1 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

fn tree_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        len => {
            let (l, r) = values.split_at(len / 2);
            tree_sum(l) + tree_sum(r)
        }
    }
}

/// Default permanent used by the models.
#[inline]
pub fn permanent(a: &ComplexMatrix) -> Result<Complex64> {
    if a.rows() == 1 && a.cols() == 1 {
        return Ok(a[(0, 0)]);
    }
    permanent_ryser(a)
}
