//! Single photons through `U_G` measured by eight-port homodyne detectors.
//!
//! Detector `i` mixes its mode with vacuum on a beam splitter of
//! transmissivity `τᵢ` and reflectivity `ρᵢ` and reads both quadratures. The
//! outcome `(qᵢ, pᵢ)` projects the mode onto `|α₀ᵢ, ξᵢ⟩ = D(α₀ᵢ)S(ξᵢ)|0⟩` with
//! `α₀ᵢ = (qᵢ + i pᵢ)/√2` and `ξᵢ = ln(τᵢ/ρᵢ)`. The density over
//! `∏ dqᵢ dpᵢ` is
//!
//! ```text
//! p(q, p) = (2π)^{−L} |⟨⊗ᵢ α₀ᵢ, ξᵢ| 𝒰(U_G) |input⟩|²
//! ```
//!
//! for `L` modes, which integrates to one because `π⁻¹∫d²α |α,ξ⟩⟨α,ξ| = I`
//! and `d²α = dq dp / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{apply_interferometer, OccupationPattern, SectorBasis, SectorState};
use crate::gaussian::{build_tsbs_unitary, displaced_squeezed_prefix, embed_matrix, SqueezeVector};
use crate::matrix::ComplexMatrix;
use crate::permanent::permanent;
use crate::quadrature::{integrate_box, integrate_rectangle_adaptive, AdaptiveIntegral};
use crate::tsbs::{squeezing_prefactor, unfolded_unitary};

/// Tolerance on `τ² + ρ² = 1`.
pub const SPLITTER_TOL: f64 = 1e-12;
/// Largest change allowed when the quadrature order is doubled.
pub const CONVERGENCE_GATE: f64 = 1e-8;
/// Smallest Gauss–Legendre order accepted for box integrals.
pub const MIN_BOX_ORDER: usize = 16;
/// Box integrals cover at most this many modes (a four-dimensional integral).
pub const MAX_BOX_MODES: usize = 2;

/// Beam-splitter parameters of a bank of eight-port detectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EightPortSpec {
    rho: Vec<f64>,
    tau: Vec<f64>,
}

impl EightPortSpec {
    pub fn new(rho: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        if rho.len() != tau.len() || rho.is_empty() {
            return Err(Error::Dimension(format!(
                "{} reflectivities and {} transmissivities",
                rho.len(),
                tau.len()
            )));
        }
        for (r, t) in rho.iter().zip(&tau) {
            if !(*r > 0.0 && *r < 1.0 && *t > 0.0 && *t < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "rho = {r}, tau = {t} must lie strictly inside (0, 1)"
                )));
            }
            if (r * r + t * t - 1.0).abs() > SPLITTER_TOL {
                return Err(Error::InvalidParameter(format!(
                    "rho² + tau² = {} differs from 1",
                    r * r + t * t
                )));
            }
        }
        Ok(Self { rho, tau })
    }

    /// Detectors realizing the given squeezing parameters.
    pub fn from_xi(xi: &[f64]) -> Result<Self> {
        let (rho, tau) = xi
            .iter()
            .map(|&x| {
                let norm = (1.0 + (2.0 * x).exp()).sqrt();
                (1.0 / norm, x.exp() / norm)
            })
            .unzip();
        Self::new(rho, tau)
    }

    /// Splitters chained by `ρᵢ = τᵢ₊₁` starting from `τ₀`, which alternates
    /// the sign of `ξ` from one detector to the next.
    pub fn chained(tau0: f64, modes: usize) -> Result<Self> {
        let rho0 = (1.0 - tau0 * tau0).sqrt();
        let mut tau = Vec::with_capacity(modes);
        let mut rho = Vec::with_capacity(modes);
        for i in 0..modes {
            let (t, r) = if i % 2 == 0 { (tau0, rho0) } else { (rho0, tau0) };
            tau.push(t);
            rho.push(r);
        }
        Self::new(rho, tau)
    }

    /// `{ξ, −ξ, …}` over `2 * pairs` detectors.
    pub fn alternating(xi: f64, pairs: usize) -> Result<Self> {
        Self::from_xi(SqueezeVector::alternating(xi, pairs).values())
    }

    pub fn modes(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// `ξᵢ = ln(τᵢ/ρᵢ)`.
    pub fn xi(&self) -> Vec<f64> {
        self.tau
            .iter()
            .zip(&self.rho)
            .map(|(t, r)| (t / r).ln())
            .collect()
    }
}

/// Rescaled quadrature readings of every detector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomodyneOutcome {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl HomodyneOutcome {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Dimension(format!(
                "{} q readings and {} p readings",
                q.len(),
                p.len()
            )));
        }
        Ok(Self { q, p })
    }

    pub fn origin(modes: usize) -> Self {
        Self {
            q: vec![0.0; modes],
            p: vec![0.0; modes],
        }
    }

    pub fn modes(&self) -> usize {
        self.q.len()
    }

    /// `α₀ᵢ = (qᵢ + i pᵢ)/√2`.
    pub fn alpha0(&self) -> Vec<Complex64> {
        self.q
            .iter()
            .zip(&self.p)
            .map(|(&q, &p)| Complex64::new(q, p) / 2f64.sqrt())
            .collect()
    }
}

/// Half-open interval `(lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Quadrature bin `w_j` of width `√η`: odd `j` covers `(j√η/2, (j+2)√η/2]`,
/// even `j` covers `((−j−1)√η/2, (−j+1)√η/2]`, so `j = 0, 1, 2, 3, …` walk
/// outwards from the origin alternating right and left.
pub fn segment(j: i64, eta: f64) -> Result<Segment> {
    if j < 0 {
        return Err(Error::InvalidParameter(format!("segment index {j} is negative")));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("eta = {eta} must be positive")));
    }
    let h = eta.sqrt() / 2.0;
    let j = j as f64;
    Ok(if j as i64 % 2 == 1 {
        Segment {
            lo: j * h,
            hi: (j + 2.0) * h,
        }
    } else {
        Segment {
            lo: (-j - 1.0) * h,
            hi: (-j + 1.0) * h,
        }
    })
}

/// A phase-space box: detector `i` reads `pᵢ ∈ w_{rᵢ}` and `qᵢ ∈ w_{sᵢ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxIndex {
    pub r: Vec<i64>,
    pub s: Vec<i64>,
    pub eta: f64,
}

impl BoxIndex {
    pub fn origin(modes: usize, eta: f64) -> Self {
        Self {
            r: vec![0; modes],
            s: vec![0; modes],
            eta,
        }
    }

    pub fn modes(&self) -> usize {
        self.r.len()
    }

    /// Integration bounds ordered `(q₀ … q_{L−1}, p₀ … p_{L−1})`.
    pub fn bounds(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.r.len() != self.s.len() {
            return Err(Error::Dimension("box index vectors differ in length".into()));
        }
        let segs = self
            .s
            .iter()
            .chain(&self.r)
            .map(|&j| segment(j, self.eta))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            segs.iter().map(|s| s.lo).collect(),
            segs.iter().map(|s| s.hi).collect(),
        ))
    }
}

/// Density evaluator for one input pattern, interferometer and detector bank.
///
/// `𝒰(U_G)|input⟩` is computed once. Each evaluation expands the measured
/// product state only up to the input's photon number: the overlap needs
/// nothing beyond that sector, so no truncation error is incurred.
#[derive(Clone, Debug)]
pub struct DensityEvaluator {
    xi: Vec<f64>,
    photons: usize,
    patterns: Vec<Vec<usize>>,
    state: Vec<Complex64>,
    norm: f64,
}

impl DensityEvaluator {
    pub fn new(spec: &EightPortSpec, u_g: &ComplexMatrix, input: &OccupationPattern) -> Result<Self> {
        let modes = spec.modes();
        if !u_g.is_square() || u_g.rows() != modes || input.modes() != modes {
            return Err(Error::Dimension(format!(
                "{} detectors, {}x{} interferometer, {}-mode input",
                modes,
                u_g.rows(),
                u_g.cols(),
                input.modes()
            )));
        }
        let out = apply_interferometer(&SectorState::basis(input)?, u_g)?;
        let basis = SectorBasis::new(modes, input.total());
        Ok(Self {
            xi: spec.xi(),
            photons: input.total(),
            patterns: basis
                .patterns()
                .iter()
                .map(|p| p.occupations().to_vec())
                .collect(),
            state: out.amplitudes().to_vec(),
            norm: (2.0 * PI).powi(-(modes as i32)),
        })
    }

    pub fn modes(&self) -> usize {
        self.xi.len()
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    /// Per-mode Fock cutoff of the bra expansion (exact, see type docs).
    pub fn fock_cutoff(&self) -> usize {
        self.photons
    }

    /// `⟨⊗ᵢ α₀ᵢ, ξᵢ| 𝒰(U_G) |input⟩`.
    pub fn overlap(&self, alpha: &[Complex64]) -> Complex64 {
        let coeffs: Vec<Vec<Complex64>> = alpha
            .iter()
            .zip(&self.xi)
            .map(|(&a, &x)| displaced_squeezed_prefix(a, x, self.photons))
            .collect();
        self.patterns
            .iter()
            .zip(&self.state)
            .map(|(n, psi)| {
                let bra: Complex64 = n.iter().zip(&coeffs).map(|(&k, c)| c[k]).product();
                bra.conj() * psi
            })
            .sum()
    }

    /// Density at a point laid out as `(q₀ … q_{L−1}, p₀ … p_{L−1})`.
    pub fn density_at(&self, point: &[f64]) -> f64 {
        let l = self.modes();
        let alpha: Vec<Complex64> = (0..l)
            .map(|i| Complex64::new(point[i], point[l + i]) / 2f64.sqrt())
            .collect();
        self.norm * self.overlap(&alpha).norm_sqr()
    }

    pub fn density(&self, outcome: &HomodyneOutcome) -> Result<f64> {
        if outcome.modes() != self.modes() {
            return Err(Error::Dimension(format!(
                "{}-mode outcome for {} detectors",
                outcome.modes(),
                self.modes()
            )));
        }
        Ok(self.norm * self.overlap(&outcome.alpha0()).norm_sqr())
    }
}

/// Outcome density per unit `∏ dqᵢ dpᵢ`.
pub fn outcome_density(
    spec: &EightPortSpec,
    u_g: &ComplexMatrix,
    input: &OccupationPattern,
    outcome: &HomodyneOutcome,
) -> Result<f64> {
    DensityEvaluator::new(spec, u_g, input)?.density(outcome)
}

/// `(2π)^{−2M}`, the proportionality constant between the origin density and
/// `(1−t²)^M t^{2N} |Perm U_{k,m}|² / (∏kᵢ! ∏mᵢ!)`.
pub fn origin_constant(pairs: usize) -> f64 {
    (2.0 * PI).powi(-2 * pairs as i32)
}

/// The time-reversed squeezed-vacuum setup: detectors alternating `±ξ`,
/// `U_G` the adjoint of the 2M-mode network built from `U_A` and `U_B`, and
/// input `k` on modes `0..M`, `m` on modes `M..2M`.
pub fn origin_evaluator(
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
    xi: f64,
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> Result<DensityEvaluator> {
    let pairs = u_a.rows();
    if k.modes() != pairs || m.modes() != pairs {
        return Err(Error::Pattern(format!(
            "patterns {k} and {m} must each cover {pairs} modes"
        )));
    }
    let u_g = build_tsbs_unitary(u_a, u_b)?.adjoint();
    let spec = EightPortSpec::alternating(xi, pairs)?;
    DensityEvaluator::new(&spec, &u_g, &k.concat(m))
}

/// Density at `q = p = 0` in the setup of [`origin_evaluator`].
pub fn origin_density(
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
    xi: f64,
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> Result<f64> {
    let eval = origin_evaluator(u_a, u_b, xi, k, m)?;
    eval.density(&HomodyneOutcome::origin(eval.modes()))
}

/// `(1−t²)^M t^{2N} |Perm U_{k,m}|² / (∏kᵢ! ∏mᵢ!)` with `U = U_A U_Bᵀ` and
/// `t = tanh ξ`; zero when `k` and `m` carry different photon numbers.
pub fn origin_reference(
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
    xi: f64,
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> Result<f64> {
    if k.total() != m.total() {
        return Ok(0.0);
    }
    let u = unfolded_unitary(u_a, u_b);
    let amp = crate::fock::transition_amplitude(&u, k, m)?;
    Ok(squeezing_prefactor(xi.tanh(), u_a.rows(), k.total()) * amp.norm_sqr())
}

/// A box integral and its convergence diagnostics.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxProbability {
    pub value: f64,
    /// Difference between the results at `order` and `2 * order`.
    pub change: f64,
    pub order: usize,
}

/// Integral of the density over a box at one quadrature order, no gate.
pub fn box_integral(eval: &DensityEvaluator, bx: &BoxIndex, order: usize) -> Result<f64> {
    if bx.modes() != eval.modes() {
        return Err(Error::Dimension(format!(
            "{}-mode box for {} detectors",
            bx.modes(),
            eval.modes()
        )));
    }
    if eval.modes() > MAX_BOX_MODES {
        return Err(Error::Feasibility(format!(
            "box integration over {} modes needs a {}-dimensional integral; at most {} modes are supported",
            eval.modes(),
            2 * eval.modes(),
            MAX_BOX_MODES
        )));
    }
    let (lo, hi) = bx.bounds()?;
    integrate_box(|x| eval.density_at(x), &lo, &hi, order)
}

/// Box probability by tensor Gauss–Legendre at `order` and `2 * order` per
/// axis; fails unless the two agree within [`CONVERGENCE_GATE`]. The value at
/// the higher order is returned.
pub fn box_probability(eval: &DensityEvaluator, bx: &BoxIndex, order: usize) -> Result<BoxProbability> {
    if order < MIN_BOX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "box quadrature order {order} is below {MIN_BOX_ORDER}"
        )));
    }
    let coarse = box_integral(eval, bx, order)?;
    let fine = box_integral(eval, bx, 2 * order)?;
    let change = (fine - coarse).abs();
    if !(change < CONVERGENCE_GATE) {
        return Err(Error::Accuracy { change });
    }
    Ok(BoxProbability {
        value: fine,
        change,
        order,
    })
}

/// Sum of unmixed second derivatives of the density at the origin over all
/// `2L` quadratures, by central differences with one Richardson step.
pub fn laplacian_at_origin(eval: &DensityEvaluator, h: f64) -> f64 {
    let dim = 2 * eval.modes();
    let f0 = eval.density_at(&vec![0.0; dim]);
    let second = |step: f64| -> f64 {
        (0..dim)
            .map(|d| {
                let mut x = vec![0.0; dim];
                x[d] = step;
                let plus = eval.density_at(&x);
                x[d] = -step;
                let minus = eval.density_at(&x);
                (plus - 2.0 * f0 + minus) / (step * step)
            })
            .sum()
    };
    (4.0 * second(h / 2.0) - second(h)) / 3.0
}

/// Second-order Taylor estimate of the origin box over `modes` detectors:
/// `η^L f(0) + η^{L+1}/24 · ∇²f(0)`.
///
/// The box is a cube of side `√η` in `2L` quadratures centred on the origin,
/// so odd and mixed terms integrate to zero and each unmixed second
/// derivative contributes `(√η)^{2L+2}/24`.
pub fn origin_box_expansion(eta: f64, modes: usize, density0: f64, laplacian: f64) -> f64 {
    let l = modes as i32;
    eta.powi(l) * density0 + eta.powi(l + 1) / 24.0 * laplacian
}

/// One row of an η sweep of the origin box.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpansionRow {
    pub eta: f64,
    pub box_value: f64,
    pub expansion: f64,
    /// `|box − expansion| / (η^L f(0))`.
    pub relative_error: f64,
    pub quadrature_change: f64,
}

/// Origin-box integrals against [`origin_box_expansion`] for each `η`.
pub fn expansion_sweep(eval: &DensityEvaluator, etas: &[f64], order: usize) -> Result<Vec<ExpansionRow>> {
    let l = eval.modes();
    let f0 = eval.density_at(&vec![0.0; 2 * l]);
    let lap = laplacian_at_origin(eval, 1e-2);
    etas.iter()
        .map(|&eta| {
            let b = box_probability(eval, &BoxIndex::origin(l, eta), order)?;
            let expansion = origin_box_expansion(eta, l, f0, lap);
            let leading = eta.powi(l as i32) * f0;
            Ok(ExpansionRow {
                eta,
                box_value: b.value,
                expansion,
                relative_error: (b.value - expansion).abs() / leading,
                quadrature_change: b.change,
            })
        })
        .collect()
}

/// `log₂` of successive error ratios in a sweep where each `η` halves the last.
pub fn empirical_orders(rows: &[ExpansionRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|w| (w[0].relative_error / w[1].relative_error).ln() / (w[0].eta / w[1].eta).ln())
        .collect()
}

/// Total mass of the single-mode density for `photons` photons through the
/// identity, by adaptive quadrature over `[−R, R]²`.
pub fn single_mode_normalization(xi: f64, photons: usize, tol: f64) -> Result<AdaptiveIntegral> {
    let spec = EightPortSpec::from_xi(&[xi])?;
    let eval = DensityEvaluator::new(
        &spec,
        &ComplexMatrix::identity(1),
        &OccupationPattern::new(vec![photons]),
    )?;
    let r = 16.0 * xi.abs().exp();
    integrate_rectangle_adaptive(&|x: &[f64]| eval.density_at(x), [-r, -r], [r, r], tol)
}

/// Outcome of [`embedded_origin_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmbeddedCheck {
    /// Origin density divided by `(2π)^{−2M}(1−t²)^M t^{2N}`.
    pub p0: f64,
    /// `ε^{2N} Perm(X)²`.
    pub reference: f64,
    pub epsilon: f64,
    pub density: f64,
    pub constant: f64,
}

/// Largest matrix accepted by [`embedded_origin_check`].
pub const MAX_EMBED_SIZE: usize = 3;

/// Embeds a real `N x N` matrix `X` into `U_A`, takes `U_B = I` on
/// `M = 2N` modes and `k = m = (1, …, 1, 0, …, 0)` with `N` ones, and
/// compares the scaled origin density with `ε^{2N} Perm(X)²`.
pub fn embedded_origin_check(x: &ComplexMatrix, xi: f64) -> Result<EmbeddedCheck> {
    let n = x.rows();
    if n > MAX_EMBED_SIZE {
        return Err(Error::Feasibility(format!(
            "embedding a {n}x{n} matrix needs {} detectors; at most {MAX_EMBED_SIZE}x{MAX_EMBED_SIZE} is supported",
            4 * n
        )));
    }
    if x.as_slice().iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidParameter("embedded matrix must be real".into()));
    }
    let emb = embed_matrix(x)?;
    let pairs = 2 * n;
    let pattern = OccupationPattern::leading_ones(pairs, n);
    let density = origin_density(
        &emb.unitary,
        &ComplexMatrix::identity(pairs),
        xi,
        &pattern,
        &pattern,
    )?;
    let constant = origin_constant(pairs);
    let p0 = density / (constant * squeezing_prefactor(xi.tanh(), pairs, n));
    let perm = permanent(x)?;
    let reference = emb.epsilon.powi(2 * n as i32) * perm.norm_sqr();
    Ok(EmbeddedCheck {
        p0,
        reference,
        epsilon: emb.epsilon,
        density,
        constant,
    })
}
