//! Twofold scattershot boson sampling and its squeezed-vacuum form.
//!
//! M two-mode squeezed vacua `√(1−t_j²) Σ t_jⁿ |n⟩_A|n⟩_B` feed `U_A` with
//! their A legs and `U_B` with their B legs; photons are counted on both
//! sides. The joint probability of output `k` on A and herald `m` on B is
//!
//! ```text
//! p(k ∩ m) = ∏(1−t_j²) · |Σ_{Σn=N} ∏ t_j^{n_j} ⟨k|𝒰_A|n⟩⟨m|𝒰_B|n⟩|²
//! ```
//!
//! With equal squeezing the weight factors out and the sum collapses to
//! `⟨k|𝒰_A 𝒰_Bᵀ|m⟩`, where the Fock-space transpose of `𝒰_B` is the
//! interferometer of the transposed matrix `U_Bᵀ`. The time-unfolded circuit
//! is therefore `U_A · U_Bᵀ` (see [`unfolded_unitary`]), which coincides with
//! `U_A · U_B†` only when `U_B` is real.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_patterns, transition_amplitude, OccupationPattern, SectorBasis};
use crate::gaussian::{build_tsbs_unitary, squeezed_vacuum_prefix, SqueezeVector, UNITARY_TOL};
use crate::matrix::ComplexMatrix;
use crate::table::{DistributionTable, TableMetadata};

/// Above this mode count squeezing weights are accumulated in log space.
const LOG_SPACE_MODES: usize = 16;

/// Interferometers and per-mode squeezing of a twofold scattershot setup.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TsbsConfig {
    u_a: ComplexMatrix,
    u_b: ComplexMatrix,
    t: Vec<f64>,
}

impl TsbsConfig {
    pub fn new(u_a: ComplexMatrix, u_b: ComplexMatrix, t: Vec<f64>) -> Result<Self> {
        if !u_a.is_square() || !u_b.is_square() || u_a.rows() != u_b.rows() {
            return Err(Error::Dimension(
                "U_A and U_B must be square matrices of equal size".into(),
            ));
        }
        if t.len() != u_a.rows() {
            return Err(Error::Dimension(format!(
                "{} squeezing values for {} modes",
                t.len(),
                u_a.rows()
            )));
        }
        if let Some(bad) = t.iter().find(|t| !(0.0..1.0).contains(*t)) {
            return Err(Error::InvalidParameter(format!(
                "squeezing t = {bad} outside [0, 1)"
            )));
        }
        for u in [&u_a, &u_b] {
            let deviation = u.unitarity_deviation();
            if deviation >= UNITARY_TOL {
                return Err(Error::NotUnitary { deviation });
            }
        }
        Ok(Self { u_a, u_b, t })
    }

    /// All modes squeezed with the same `t`.
    pub fn equal(u_a: ComplexMatrix, u_b: ComplexMatrix, t: f64) -> Result<Self> {
        let m = u_a.rows();
        Self::new(u_a, u_b, vec![t; m])
    }

    pub fn modes(&self) -> usize {
        self.t.len()
    }

    pub fn u_a(&self) -> &ComplexMatrix {
        &self.u_a
    }

    pub fn u_b(&self) -> &ComplexMatrix {
        &self.u_b
    }

    pub fn squeezing(&self) -> &[f64] {
        &self.t
    }

    /// The common `t` when all modes are equally squeezed.
    pub fn equal_squeezing(&self) -> Option<f64> {
        let first = self.t[0];
        self.t.iter().all(|&t| t == first).then_some(first)
    }

    fn require_equal(&self) -> Result<f64> {
        self.equal_squeezing().ok_or_else(|| {
            Error::ClosedFormInapplicable("squeezing parameters differ between modes".into())
        })
    }

    fn check_pattern(&self, p: &OccupationPattern) -> Result<()> {
        if p.modes() != self.modes() {
            return Err(Error::Pattern(format!(
                "pattern {p} has {} modes, setup has {}",
                p.modes(),
                self.modes()
            )));
        }
        Ok(())
    }

    /// Combined circuit of the time-unfolded setup.
    pub fn unfolded_unitary(&self) -> ComplexMatrix {
        unfolded_unitary(&self.u_a, &self.u_b)
    }
}

/// `(1−t²)^M t^{2N}`, in log space for large `M`.
pub fn squeezing_prefactor(t: f64, modes: usize, photons: usize) -> f64 {
    if photons > 0 && t == 0.0 {
        return 0.0;
    }
    let t2 = t * t;
    if modes <= LOG_SPACE_MODES {
        (1.0 - t2).powi(modes as i32) * t2.powi(photons as i32)
    } else {
        let ln = modes as f64 * (-t2).ln_1p() + if photons > 0 { photons as f64 * t2.ln() } else { 0.0 };
        ln.exp()
    }
}

/// `p(k ∩ m)` by the explicit sum over intermediate patterns `n`; any
/// squeezing profile. Different photon numbers on the two sides give exactly 0.
pub fn joint_probability_general(
    cfg: &TsbsConfig,
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> Result<f64> {
    cfg.check_pattern(k)?;
    cfg.check_pattern(m)?;
    if k.total() != m.total() {
        return Ok(0.0);
    }
    let photons = k.total();
    let modes = cfg.modes();
    let intermediates = enumerate_patterns(modes, photons);

    // log-weights ln ∏ t_j^{n_j}; -inf marks a vanishing term
    let log_weight = |n: &OccupationPattern| -> f64 {
        n.occupations()
            .iter()
            .zip(&cfg.t)
            .filter(|(&nj, _)| nj > 0)
            .map(|(&nj, &t)| nj as f64 * t.ln())
            .sum()
    };
    let log_pref: f64 = cfg.t.iter().map(|t| (-t * t).ln_1p()).sum();

    if modes <= LOG_SPACE_MODES {
        let mut sum = Complex64::new(0.0, 0.0);
        for n in &intermediates {
            let w: f64 = n
                .occupations()
                .iter()
                .zip(&cfg.t)
                .map(|(&nj, &t)| t.powi(nj as i32))
                .product();
            if w == 0.0 {
                continue;
            }
            sum += w
                * transition_amplitude(&cfg.u_a, k, n)?
                * transition_amplitude(&cfg.u_b, m, n)?;
        }
        let pref: f64 = cfg.t.iter().map(|t| 1.0 - t * t).product();
        return Ok(pref * sum.norm_sqr());
    }

    let logs: Vec<f64> = intermediates.iter().map(log_weight).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, &lw) in intermediates.iter().zip(&logs) {
        if lw == f64::NEG_INFINITY {
            continue;
        }
        sum += (lw - max).exp()
            * transition_amplitude(&cfg.u_a, k, n)?
            * transition_amplitude(&cfg.u_b, m, n)?;
    }
    if sum.norm_sqr() == 0.0 {
        return Ok(0.0);
    }
    Ok((log_pref + 2.0 * max + sum.norm_sqr().ln()).exp())
}

/// `p(m) = (1−t²)^M t^{2N}` for a binary herald pattern with equal squeezing.
pub fn marginal_probability(cfg: &TsbsConfig, m: &OccupationPattern) -> Result<f64> {
    let t = cfg.require_equal()?;
    cfg.check_pattern(m)?;
    if !m.is_binary() {
        return Err(Error::Pattern(format!(
            "herald pattern {m} must hold single photons"
        )));
    }
    Ok(squeezing_prefactor(t, cfg.modes(), m.total()))
}

/// `p(k | m) = p(k ∩ m) / p(m)`; independent of the (equal) squeezing.
pub fn conditional_probability(
    cfg: &TsbsConfig,
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> Result<f64> {
    let marginal = marginal_probability(cfg, m)?;
    if marginal == 0.0 {
        return Err(Error::ZeroProbabilityCondition);
    }
    Ok(joint_probability_general(cfg, k, m)? / marginal)
}

/// `U_A · U_Bᵀ`: heralding on the B side acts as preparing the herald
/// pattern and sending it backwards through `U_B`, i.e. through `U_B†`
/// followed by complex conjugation.
pub fn unfolded_unitary(u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> ComplexMatrix {
    u_a * &u_b.transpose()
}

/// `p̃(k | m) = |Perm U_{k,m}|² / (∏kᵢ! ∏mᵢ!)` for `U = U_A U_Bᵀ`.
pub fn unfolded_probability(
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> Result<f64> {
    let u = unfolded_unitary(u_a, u_b);
    Ok(transition_amplitude(&u, k, m)?.norm_sqr())
}

/// The 2M-mode squeezed-vacuum realization: 2M single-mode squeezed vacua
/// mixed pairwise and sent through `U_A` and `U_B`.
#[derive(Clone, Debug)]
pub struct SqueezedSetup {
    u_a: ComplexMatrix,
    u_b: ComplexMatrix,
    xi: SqueezeVector,
    network: ComplexMatrix,
}

impl SqueezedSetup {
    pub fn new(u_a: ComplexMatrix, u_b: ComplexMatrix, xi: SqueezeVector) -> Result<Self> {
        let network = build_tsbs_unitary(&u_a, &u_b)?;
        if xi.len() != network.rows() {
            return Err(Error::Dimension(format!(
                "{} squeezing values for {} modes",
                xi.len(),
                network.rows()
            )));
        }
        Ok(Self {
            u_a,
            u_b,
            xi,
            network,
        })
    }

    /// Equal magnitude, alternating sign: `{ξ, −ξ, …}`.
    pub fn alternating(u_a: ComplexMatrix, u_b: ComplexMatrix, xi: f64) -> Result<Self> {
        let pairs = u_a.rows();
        Self::new(u_a, u_b, SqueezeVector::alternating(xi, pairs))
    }

    pub fn pairs(&self) -> usize {
        self.u_a.rows()
    }

    pub fn squeezing(&self) -> &SqueezeVector {
        &self.xi
    }

    /// The full 2M-mode interferometer.
    pub fn network(&self) -> &ComplexMatrix {
        &self.network
    }

    pub fn unfolded_unitary(&self) -> ComplexMatrix {
        unfolded_unitary(&self.u_a, &self.u_b)
    }
}

/// Closed form `(1−t²)^M t^{2N} |Perm U_{k,m}|² / (∏kᵢ! ∏mᵢ!)` with `t = tanh ξ`.
pub fn squeezed_joint_probability(
    setup: &SqueezedSetup,
    k: &OccupationPattern,
    m: &OccupationPattern,
) -> Result<f64> {
    let xi = setup.xi.alternating_value().ok_or_else(|| {
        Error::ClosedFormInapplicable("squeezing vector is not of the form {ξ, −ξ, …}".into())
    })?;
    let pairs = setup.pairs();
    if k.modes() != pairs || m.modes() != pairs {
        return Err(Error::Pattern(format!(
            "patterns {k} and {m} must each cover {pairs} modes"
        )));
    }
    if k.total() != m.total() {
        return Ok(0.0);
    }
    let t = xi.tanh();
    let amp = transition_amplitude(&setup.unfolded_unitary(), k, m)?;
    Ok(squeezing_prefactor(t, pairs, k.total()) * amp.norm_sqr())
}

/// `|⟨outcome| 𝒰 ⊗ᵢ S(ξᵢ)|0⟩|²` for any interferometer and squeezing profile.
///
/// The product of squeezed vacua is projected onto the photon-number sector of
/// `outcome` (only even occupations contribute), which is exact: no other
/// sector can reach the outcome.
pub fn squeezed_input_probability(
    u: &ComplexMatrix,
    xi: &SqueezeVector,
    outcome: &OccupationPattern,
) -> Result<f64> {
    if !u.is_square() || u.rows() != xi.len() || outcome.modes() != xi.len() {
        return Err(Error::Dimension(format!(
            "{}x{} interferometer, {} squeezers and a {}-mode outcome",
            u.rows(),
            u.cols(),
            xi.len(),
            outcome.modes()
        )));
    }
    let total = outcome.total();
    if total % 2 == 1 {
        return Ok(0.0);
    }
    let coeffs: Vec<Vec<f64>> = xi
        .values()
        .iter()
        .map(|&x| squeezed_vacuum_prefix(x, total))
        .collect();
    let basis = SectorBasis::new(xi.len(), total);
    let amp = basis
        .patterns()
        .par_iter()
        .filter(|n| n.occupations().iter().all(|o| o % 2 == 0))
        .map(|n| {
            let c: f64 = n
                .occupations()
                .iter()
                .zip(&coeffs)
                .map(|(&o, c)| c[o])
                .product();
            Ok(transition_amplitude(u, outcome, n)? * c)
        })
        .collect::<Result<Vec<Complex64>>>()?
        .into_iter()
        .sum::<Complex64>();
    Ok(amp.norm_sqr())
}

/// One heralded event: pattern `m` on side B and `k` on side A.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeraldedOutcome {
    pub herald: OccupationPattern,
    pub output: OccupationPattern,
}

impl fmt::Display for HeraldedOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.herald, self.output)
    }
}

/// `p(k ∩ m)` over all `(m, k)` with up to `max_photons` photons per side;
/// the rest of the mass is the table's residual.
pub fn joint_table(
    cfg: &TsbsConfig,
    max_photons: usize,
) -> Result<DistributionTable<HeraldedOutcome>> {
    let mut support = Vec::new();
    for n in 0..=max_photons {
        let pats = enumerate_patterns(cfg.modes(), n);
        for m in &pats {
            for k in &pats {
                support.push(HeraldedOutcome {
                    herald: m.clone(),
                    output: k.clone(),
                });
            }
        }
    }
    let probs = support
        .par_iter()
        .map(|o| joint_probability_general(cfg, &o.output, &o.herald))
        .collect::<Result<Vec<_>>>()?;
    let mut meta = TableMetadata::new("tsbs-joint")
        .with("M", cfg.modes() as f64)
        .with("N", max_photons as f64);
    if let Some(t) = cfg.equal_squeezing() {
        meta = meta.with("t", t);
    }
    DistributionTable::truncated(support, probs, meta)
}

/// `p(k | m)` over every output pattern `k`, by the time-unfolded circuit.
/// Works for any herald pattern, including bunched ones.
pub fn conditional_table(
    cfg: &TsbsConfig,
    m: &OccupationPattern,
) -> Result<DistributionTable<OccupationPattern>> {
    cfg.check_pattern(m)?;
    let u = cfg.unfolded_unitary();
    let support = enumerate_patterns(cfg.modes(), m.total());
    let probs = support
        .par_iter()
        .map(|k| Ok(transition_amplitude(&u, k, m)?.norm_sqr()))
        .collect::<Result<Vec<_>>>()?;
    let mut meta = TableMetadata::new("tsbs-conditional")
        .with("M", cfg.modes() as f64)
        .with("N", m.total() as f64);
    if let Some(t) = cfg.equal_squeezing() {
        meta = meta.with("t", t);
    }
    // renormalize away rounding so the sampler accepts the table
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized { total });
    }
    let probs = probs.into_iter().map(|p| p / total).collect();
    DistributionTable::normalized(support, probs, meta)
}

/// Conditional tables keyed by herald pattern, built on demand.
#[derive(Debug, Default)]
pub struct ConditionalCache {
    tables: HashMap<OccupationPattern, DistributionTable<OccupationPattern>>,
}

impl ConditionalCache {
    pub fn get(
        &mut self,
        cfg: &TsbsConfig,
        m: &OccupationPattern,
    ) -> Result<&DistributionTable<OccupationPattern>> {
        if !self.tables.contains_key(m) {
            let table = conditional_table(cfg, m)?;
            self.tables.insert(m.clone(), table);
        }
        Ok(&self.tables[m])
    }
}
