//! Independent reference computations shared by the integration tests.
//!
//! Fock-space states here come from truncated ladder operators and a dense
//! matrix exponential, never from the closed-form coefficient formulas or
//! recurrences used by the library.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;

use bosim::fock::{enumerate_patterns, OccupationPattern};
use bosim::matrix::ComplexMatrix;
use bosim::permanent::permanent_naive;
use bosim::Complex64;

/// Truncation used by the single-mode oracles.
pub const ORACLE_DIM: usize = 100;

type Dense = Vec<Vec<Complex64>>;

fn zeros(n: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn norm1(a: &Dense) -> f64 {
    (0..a.len())
        .map(|j| a.iter().map(|row| row[j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring with a Taylor series.
pub fn expm(a: &Dense) -> Dense {
    let n = a.len();
    let squarings = norm1(a).log2().ceil().max(0.0) as i32 + 1;
    let scale = 0.5f64.powi(squarings);
    let scaled: Dense = a
        .iter()
        .map(|row| row.iter().map(|z| z * scale).collect())
        .collect();
    let mut result = zeros(n);
    for (i, row) in result.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    let mut term = result.clone();
    for k in 1..40 {
        term = matmul(&term, &scaled);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// Annihilation operator truncated to `dim` levels.
pub fn annihilation(dim: usize) -> Dense {
    let mut b = zeros(dim);
    for n in 1..dim {
        b[n - 1][n] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    b
}

fn adjoint(a: &Dense) -> Dense {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

fn combine(terms: &[(Complex64, &Dense)]) -> Dense {
    let n = terms[0].1.len();
    let mut out = zeros(n);
    for (c, m) in terms {
        for i in 0..n {
            for j in 0..n {
                out[i][j] += c * m[i][j];
            }
        }
    }
    out
}

/// `S(ξ) = exp[ξ/2 (b†² − b²)]` on the truncated space.
pub fn squeeze_operator(xi: f64, dim: usize) -> Dense {
    let b = annihilation(dim);
    let bd = adjoint(&b);
    let b2 = matmul(&b, &b);
    let bd2 = matmul(&bd, &bd);
    let half = Complex64::new(xi / 2.0, 0.0);
    expm(&combine(&[(half, &bd2), (-half, &b2)]))
}

/// `D(α) = exp(α b† − α* b)` on the truncated space.
pub fn displacement_operator(alpha: Complex64, dim: usize) -> Dense {
    let b = annihilation(dim);
    let bd = adjoint(&b);
    expm(&combine(&[(alpha, &bd), (-alpha.conj(), &b)]))
}

/// First `count` Fock coefficients of `D(α)S(ξ)|0⟩`.
pub fn displaced_squeezed_oracle(alpha: Complex64, xi: f64, count: usize) -> Vec<Complex64> {
    let s = squeeze_operator(xi, ORACLE_DIM);
    let d = displacement_operator(alpha, ORACLE_DIM);
    let ds = matmul(&d, &s);
    (0..count).map(|n| ds[n][0]).collect()
}

/// First `count` Fock coefficients of `S(ξ)|0⟩`, memoized per `ξ`.
pub fn squeezed_vacuum_oracle(xi: f64, count: usize) -> Vec<f64> {
    thread_local! {
        static CACHE: RefCell<HashMap<u64, Vec<f64>>> = RefCell::new(HashMap::new());
    }
    CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        let column = cache.entry(xi.to_bits()).or_insert_with(|| {
            let s = squeeze_operator(xi, ORACLE_DIM);
            (0..ORACLE_DIM).map(|n| s[n][0].re).collect()
        });
        column[..count].to_vec()
    })
}

/// `⟨out|𝒰|in⟩` summed over all assignments of input photons to output
/// modes, with no use of the Ryser kernel or the row-repetition shortcut of
/// the library: each photon is a creation operator `a†_j → Σᵢ U[i,j] a†ᵢ`.
pub fn transition_amplitude_oracle(
    u: &ComplexMatrix,
    out: &OccupationPattern,
    input: &OccupationPattern,
) -> Complex64 {
    if out.total() != input.total() {
        return Complex64::new(0.0, 0.0);
    }
    // expand ∏ (Σᵢ U[i,j] a†ᵢ)^{n_j} into monomials over output modes
    let modes = u.rows();
    let mut terms: Vec<(Vec<usize>, Complex64)> = vec![(vec![0; modes], Complex64::new(1.0, 0.0))];
    for (j, &nj) in input.occupations().iter().enumerate() {
        for _ in 0..nj {
            let mut next: Vec<(Vec<usize>, Complex64)> = Vec::new();
            for (occ, c) in &terms {
                for i in 0..modes {
                    let mut o = occ.clone();
                    o[i] += 1;
                    next.push((o, c * u[(i, j)]));
                }
            }
            terms = next;
        }
    }
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    let target = out.occupations();
    let sum: Complex64 = terms
        .iter()
        .filter(|(o, _)| o.as_slice() == target)
        .map(|(_, c)| *c)
        .sum();
    let in_norm: f64 = input.occupations().iter().map(|&n| fact(n)).product();
    let out_norm: f64 = target.iter().map(|&n| fact(n)).product();
    sum * (out_norm / in_norm).sqrt()
}

/// `|⟨outcome| 𝒰 ⊗ᵢ S(ξᵢ)|0⟩|²`, with squeezed-vacuum coefficients from the
/// operator exponential and transition amplitudes from the naive permanent.
pub fn squeezed_fock_oracle(u: &ComplexMatrix, xi: &[f64], outcome: &OccupationPattern) -> f64 {
    let photons = outcome.total();
    let coeffs: Vec<Vec<f64>> = xi
        .iter()
        .map(|&x| squeezed_vacuum_oracle(x, photons + 1))
        .collect();
    let mut amp = Complex64::new(0.0, 0.0);
    for n in enumerate_patterns(xi.len(), photons) {
        let c: f64 = n
            .occupations()
            .iter()
            .zip(&coeffs)
            .map(|(&o, c)| c[o])
            .product();
        if c == 0.0 {
            continue;
        }
        amp += c * naive_amplitude(u, outcome, &n);
    }
    amp.norm_sqr()
}

/// `⟨out|𝒰|in⟩` from the naive permanent of the repeated-index submatrix.
pub fn naive_amplitude(u: &ComplexMatrix, out: &OccupationPattern, input: &OccupationPattern) -> Complex64 {
    if out.total() != input.total() {
        return Complex64::new(0.0, 0.0);
    }
    if out.total() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let rows: Vec<usize> = out
        .occupations()
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n))
        .collect();
    let cols: Vec<usize> = input
        .occupations()
        .iter()
        .enumerate()
        .flat_map(|(j, &n)| std::iter::repeat_n(j, n))
        .collect();
    let sub: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| u[(r, c)]).collect())
        .collect();
    let p = permanent_naive(&ComplexMatrix::from_rows(&sub).unwrap()).unwrap();
    p / (out.factorial_product() * input.factorial_product()).sqrt()
}

/// Two-sided scattershot joint `p(k ∩ m)` built from the two-mode squeezed
/// vacuum written out term by term with independent amplitudes on each side.
pub fn tsbs_joint_oracle(
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
    t: &[f64],
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> f64 {
    if k.total() != m.total() {
        return 0.0;
    }
    let modes = t.len();
    let mut amp = Complex64::new(0.0, 0.0);
    for n in enumerate_patterns(modes, k.total()) {
        let w: f64 = n
            .occupations()
            .iter()
            .zip(t)
            .map(|(&o, &tj)| (1.0 - tj * tj).sqrt() * tj.powi(o as i32))
            .product();
        amp += w * transition_amplitude_oracle(u_a, k, &n) * transition_amplitude_oracle(u_b, m, &n);
    }
    amp.norm_sqr()
}
