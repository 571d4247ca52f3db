//! Gaussian states in the Fock basis, and the interferometers that mix them.
//!
//! Operator conventions: `D(α) = exp(α b† − α* b)` and
//! `S(ξ) = exp[ξ/2 (b†² − b²)]` for real ξ. With these, mixing `S(ξ)|0⟩` and
//! `S(−ξ)|0⟩` on [`beamsplitter_unitary`] yields a two-mode squeezed vacuum
//! with `t = tanh ξ` (up to a sign `(−1)ⁿ` per photon-number sector).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{direct_sum, ComplexMatrix};

/// Tolerance used when a routine requires unitary input.
pub const UNITARY_TOL: f64 = 1e-12;

/// Discarded-probability threshold for adaptive truncation.
pub const TAIL_LIMIT: f64 = 1e-12;

fn check_t(t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "squeezing t = {t} outside [0, 1)"
        )));
    }
    Ok(())
}

/// Amplitude `√(1−t²)·tⁿ` of `|n⟩_A|n⟩_B` in a two-mode squeezed vacuum.
pub fn tmss_coefficient(t: f64, n: usize) -> Result<f64> {
    check_t(t)?;
    Ok((1.0 - t * t).sqrt() * t.powi(n as i32))
}

/// Occupation weight `(1−t²)·t^{2n}` of the thermal state left on one leg.
pub fn thermal_diagonal(t: f64, n: usize) -> Result<f64> {
    check_t(t)?;
    Ok((1.0 - t * t) * (t * t).powi(n as i32))
}

/// Fock coefficients `c₀ … c_{n_max}` of `S(ξ)|0⟩`.
///
/// `c_{2j} = tanhʲξ · √((2j)!) / (2ʲ j!) / √cosh ξ`, odd coefficients vanish.
/// The values are exact; no renormalization is applied to the truncated list.
pub fn squeezed_vacuum_coefficients(xi: f64, n_max: usize) -> Result<Vec<f64>> {
    if n_max % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "squeezed-vacuum truncation must be even, got {n_max}"
        )));
    }
    Ok(squeezed_vacuum_prefix(xi, n_max))
}

/// Same as [`squeezed_vacuum_coefficients`] for any length.
pub fn squeezed_vacuum_prefix(xi: f64, n_max: usize) -> Vec<f64> {
    let t = xi.tanh();
    let mut c = vec![0.0; n_max + 1];
    c[0] = 1.0 / xi.cosh().sqrt();
    let mut j = 0;
    while 2 * j + 2 <= n_max {
        let m = (2 * j) as f64;
        c[2 * j + 2] = c[2 * j] * t * ((m + 1.0) * (m + 2.0)).sqrt() / (2.0 * (j as f64 + 1.0));
        j += 1;
    }
    c
}

/// `⟨0|D(α)S(ξ)|0⟩ = exp(−|α|²/2 + tanh ξ · α*²/2) / √cosh ξ`.
pub fn displaced_squeezed_vacuum_amplitude(alpha: Complex64, xi: f64) -> Complex64 {
    let a_conj = alpha.conj();
    let exponent = -0.5 * alpha.norm_sqr() + 0.5 * xi.tanh() * a_conj * a_conj;
    exponent.exp() / xi.cosh().sqrt()
}

/// First `n_max + 1` Fock coefficients of `D(α)S(ξ)|0⟩`, with no tail check.
///
/// The state is the eigenvector of `cosh ξ · b − sinh ξ · b†` with eigenvalue
/// `cosh ξ · α − sinh ξ · α*`, which gives the three-term recurrence
/// `μ√(n+1) c_{n+1} = (μα − να*) c_n + ν√n c_{n−1}`.
pub fn displaced_squeezed_prefix(alpha: Complex64, xi: f64, n_max: usize) -> Vec<Complex64> {
    let (mu, nu) = (xi.cosh(), xi.sinh());
    let lambda = alpha * mu - alpha.conj() * nu;
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(displaced_squeezed_vacuum_amplitude(alpha, xi));
    for n in 0..n_max {
        let prev = if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            c[n - 1] * nu * (n as f64).sqrt()
        };
        let next = (lambda * c[n] + prev) / (mu * ((n + 1) as f64).sqrt());
        c.push(next);
    }
    c
}

/// Probability discarded by a truncated coefficient list.
pub fn tail_mass<T: Into<Complex64> + Copy>(coefficients: &[T]) -> f64 {
    let kept: f64 = coefficients.iter().map(|&c| c.into().norm_sqr()).sum();
    (1.0 - kept).max(0.0)
}

/// Fock coefficients of `D(α)S(ξ)|0⟩` up to `n_max`; fails if the discarded
/// probability exceeds [`TAIL_LIMIT`].
pub fn displaced_squeezed_coefficients(
    alpha: Complex64,
    xi: f64,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    let c = displaced_squeezed_prefix(alpha, xi, n_max);
    let tail = tail_mass(&c);
    if tail > TAIL_LIMIT {
        return Err(Error::TailMass {
            tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(c)
}

/// Coefficients of `D(α)S(ξ)|0⟩` with the truncation chosen so that the
/// discarded probability is below [`TAIL_LIMIT`]. Returns the tail too.
pub fn displaced_squeezed_adaptive(alpha: Complex64, xi: f64) -> Result<(Vec<Complex64>, f64)> {
    let mut n_max = 16;
    while n_max <= 1024 {
        let c = displaced_squeezed_prefix(alpha, xi, n_max);
        let tail = tail_mass(&c);
        if tail < TAIL_LIMIT {
            return Ok((c, tail));
        }
        n_max *= 2;
    }
    Err(Error::TailMass {
        tail: tail_mass(&displaced_squeezed_prefix(alpha, xi, 1024)),
        limit: TAIL_LIMIT,
    })
}

/// Per-mode squeezing parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeVector {
    xi: Vec<f64>,
}

impl SqueezeVector {
    pub fn new(xi: Vec<f64>) -> Self {
        Self { xi }
    }

    /// `{ξ, −ξ, …, ξ, −ξ}` over `2 * pairs` modes.
    pub fn alternating(xi: f64, pairs: usize) -> Self {
        Self {
            xi: (0..2 * pairs)
                .map(|i| if i % 2 == 0 { xi } else { -xi })
                .collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.xi
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// `Some(ξ)` when the vector reads `{ξ, −ξ, …, ξ, −ξ}`.
    pub fn alternating_value(&self) -> Option<f64> {
        if self.xi.is_empty() || self.xi.len() % 2 != 0 {
            return None;
        }
        let first = self.xi[0];
        let ok = self
            .xi
            .chunks(2)
            .all(|p| p[0] == first && p[1] == -first);
        ok.then_some(first)
    }

    /// `t = tanh ξ` for each mode.
    pub fn tanh(&self) -> Vec<f64> {
        self.xi.iter().map(|x| x.tanh()).collect()
    }
}

/// The balanced beam splitter `(1/√2)[[1, 1], [−1, 1]]`.
pub fn beamsplitter_unitary() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[vec![h, h], vec![-h, h]]).expect("2x2")
}

/// Permutation sending mode `2i` to `i` and mode `2i+1` to `M + i` (0-based):
/// the first port of every beam splitter feeds side A, the second side B.
pub fn routing_permutation(pairs: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2 * pairs, 2 * pairs);
    for i in 0..pairs {
        p[(i, 2 * i)] = Complex64::new(1.0, 0.0);
        p[(pairs + i, 2 * i + 1)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// `(U_A ⊕ U_B) · P · (⊕ᵢ U_BS)`: the 2M-mode network that turns alternating
/// squeezed vacua into M two-mode squeezed states and sends their legs
/// through `U_A` (output modes `0..M`) and `U_B` (modes `M..2M`).
pub fn build_tsbs_unitary(u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u_a.is_square() || !u_b.is_square() || u_a.rows() != u_b.rows() {
        return Err(Error::Dimension(format!(
            "U_A ({}x{}) and U_B ({}x{}) must be square of equal size",
            u_a.rows(),
            u_a.cols(),
            u_b.rows(),
            u_b.cols()
        )));
    }
    for u in [u_a, u_b] {
        let deviation = u.unitarity_deviation();
        if deviation >= UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
    }
    let pairs = u_a.rows();
    let bs = beamsplitter_unitary();
    let mut layer = bs.clone();
    for _ in 1..pairs {
        layer = direct_sum(&layer, &bs);
    }
    let routed = &routing_permutation(pairs) * &layer;
    Ok(&direct_sum(u_a, u_b) * &routed)
}

/// Singular values this close to one are treated as exactly one.
const UNIT_SINGULAR_TOL: f64 = 1e-13;

/// Operator norm `‖X‖₂` by power iteration on `X†X`.
pub fn spectral_norm(x: &ComplexMatrix) -> f64 {
    let gram = &x.adjoint() * x;
    let n = gram.rows();
    // fixed, generic start vector
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * (i as f64 + 1.0).sqrt()))
        .collect();
    let normalize = |v: &mut Vec<Complex64>| -> f64 {
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            v.iter_mut().for_each(|z| *z /= nrm);
        }
        nrm
    };
    normalize(&mut v);
    for _ in 0..100_000 {
        let mut w = gram.apply(&v).expect("square");
        if normalize(&mut w) == 0.0 {
            return 0.0;
        }
        let change = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        v = w;
        if change < 1e-12 {
            break;
        }
    }
    let av = gram.apply(&v).expect("square");
    let rayleigh: f64 = v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum();
    rayleigh.max(0.0).sqrt()
}

/// A unitary dilation of a scaled matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingResult {
    pub unitary: ComplexMatrix,
    pub epsilon: f64,
}

/// Embeds `εX` (with `ε = 1/‖X‖₂`) as the top-left block of a `2N x 2N`
/// unitary `[[εX, √(I − ε²XX†)], [√(I − ε²X†X), −εX†]]`.
///
/// Both defect operators come from one SVD of `εX`, so they share singular
/// values and the off-diagonal blocks cancel to rounding error.
pub fn embed_matrix(x: &ComplexMatrix) -> Result<EmbeddingResult> {
    if !x.is_square() {
        return Err(Error::Dimension("embedded matrix must be square".into()));
    }
    let norm = spectral_norm(x);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateNorm);
    }
    let epsilon = 1.0 / norm;
    let n = x.rows();
    let a = x.scale(Complex64::new(epsilon, 0.0));

    let dm = DMatrix::from_row_slice(n, n, a.as_slice());
    let svd = dm.svd(true, true);
    let w = svd.u.expect("left singular vectors");
    let v = svd.v_t.expect("right singular vectors").adjoint();
    // √(1 − s²) amplifies rounding near s = 1 to ~1e-8, so singular values
    // within rounding of one get an exactly vanishing defect
    let defect: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|s| {
            if (1.0 - s).abs() < UNIT_SINGULAR_TOL {
                0.0
            } else {
                (1.0 - s * s).max(0.0).sqrt()
            }
        })
        .collect();
    let sandwich = |basis: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let mut scaled = basis.clone();
        for (j, d) in defect.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*d);
        }
        scaled * basis.adjoint()
    };
    let top_right = sandwich(&w);
    let bottom_left = sandwich(&v);

    let mut u = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            u[(i, j)] = a[(i, j)];
            u[(i, n + j)] = top_right[(i, j)];
            u[(n + i, j)] = bottom_left[(i, j)];
            u[(n + i, n + j)] = -a[(j, i)].conj();
        }
    }
    Ok(EmbeddingResult {
        unitary: u,
        epsilon,
    })
}
