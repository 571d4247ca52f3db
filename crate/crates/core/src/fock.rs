//! Fixed photon-number sectors of the multimode Fock space.
//!
//! Nothing here represents the full Fock space. A linear interferometer
//! conserves the total photon number, so every computation lives in one sector
//! `{n : Σ nᵢ = N}` of dimension `C(N+M−1, M−1)` and is exact there.
//!
//! Patterns in a sector are ordered lexicographically from the largest first
//! occupation down, e.g. `(1,0), (0,1)` for two modes and one photon.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::permanent::permanent;

/// Per-mode photon occupations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationPattern(Vec<usize>);

impl OccupationPattern {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// Binary pattern with ones in the first `photons` modes.
    pub fn leading_ones(modes: usize, photons: usize) -> Self {
        Self((0..modes).map(|i| usize::from(i < photons)).collect())
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&n| n <= 1)
    }

    /// `∏ nᵢ!`
    pub fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| (1..=n).map(|k| k as f64).product::<f64>())
            .product()
    }

    /// Concatenation `(self, other)`, the pattern `k ∩ m` over `2M` modes.
    pub fn concat(&self, other: &OccupationPattern) -> OccupationPattern {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// Splits into the first `at` modes and the rest.
    pub fn split_at(&self, at: usize) -> (OccupationPattern, OccupationPattern) {
        let (a, b) = self.0.split_at(at);
        (Self(a.to_vec()), Self(b.to_vec()))
    }
}

impl From<Vec<usize>> for OccupationPattern {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for OccupationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// `C(n, k)` as f64-exact integer arithmetic on u128.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of patterns with `photons` photons in `modes` modes.
pub fn sector_dimension(modes: usize, photons: usize) -> usize {
    if modes == 0 {
        return usize::from(photons == 0);
    }
    binomial(photons + modes - 1, modes - 1)
}

/// All compositions of `photons` into `modes` nonnegative parts, ordered.
pub fn enumerate_patterns(modes: usize, photons: usize) -> Vec<OccupationPattern> {
    let mut out = Vec::with_capacity(sector_dimension(modes, photons));
    let mut current = vec![0; modes];
    fill(&mut current, 0, photons, &mut out);
    out
}

fn fill(current: &mut [usize], pos: usize, remaining: usize, out: &mut Vec<OccupationPattern>) {
    if pos + 1 >= current.len() {
        if let Some(last) = current.last_mut() {
            *last = remaining;
        } else if remaining > 0 {
            return;
        }
        out.push(OccupationPattern(current.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(current, pos + 1, remaining - v, out);
    }
    current[pos] = 0;
}

/// Ordered basis of one photon-number sector with O(M) rank/unrank.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    modes: usize,
    photons: usize,
    patterns: Vec<OccupationPattern>,
    /// `table[p][q] = C(p + q, q)`: compositions of `p` into `q + 1` parts.
    table: Vec<Vec<usize>>,
}

impl SectorBasis {
    pub fn new(modes: usize, photons: usize) -> Self {
        let table = (0..=photons + 1)
            .map(|p| (0..modes.max(1)).map(|q| binomial(p + q, q)).collect())
            .collect();
        Self {
            modes,
            photons,
            patterns: enumerate_patterns(modes, photons),
            table,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[OccupationPattern] {
        &self.patterns
    }

    pub fn pattern(&self, index: usize) -> &OccupationPattern {
        &self.patterns[index]
    }

    /// Position of `pattern` in the sector ordering.
    pub fn rank(&self, pattern: &OccupationPattern) -> Result<usize> {
        if pattern.modes() != self.modes || pattern.total() != self.photons {
            return Err(Error::Pattern(format!(
                "{pattern} is not in the ({} modes, {} photons) sector",
                self.modes, self.photons
            )));
        }
        let mut rank = 0;
        let mut remaining = self.photons;
        let occ = pattern.occupations();
        for (i, &v) in occ.iter().enumerate().take(self.modes.saturating_sub(1)) {
            // patterns whose entry i exceeds v come first; counting them is a
            // hockey-stick sum over compositions of the remaining modes
            let rest = self.modes - i - 1;
            if remaining > v {
                rank += self.table[remaining - v - 1][rest];
            }
            remaining -= v;
        }
        Ok(rank)
    }
}

/// Copies of the rows of `u` (row `j` repeated `rows[j]` times) crossed with
/// copies of its columns (column `i` repeated `cols[i]` times).
pub fn reduced_matrix(
    u: &ComplexMatrix,
    rows: &OccupationPattern,
    cols: &OccupationPattern,
) -> Result<ComplexMatrix> {
    if rows.modes() != u.rows() || cols.modes() != u.cols() {
        return Err(Error::Pattern(format!(
            "patterns of length {} and {} do not fit a {}x{} matrix",
            rows.modes(),
            cols.modes(),
            u.rows(),
            u.cols()
        )));
    }
    if rows.total() != cols.total() {
        return Err(Error::Pattern(format!(
            "row pattern {rows} and column pattern {cols} carry different photon numbers"
        )));
    }
    let n = rows.total();
    if n == 0 {
        return Err(Error::Pattern("reduced matrix of an empty pattern".into()));
    }
    let expand = |p: &OccupationPattern| -> Vec<usize> {
        p.occupations()
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
            .collect()
    };
    let (ri, ci) = (expand(rows), expand(cols));
    let data = ri
        .iter()
        .flat_map(|&r| ci.iter().map(move |&c| (r, c)))
        .map(|(r, c)| u[(r, c)])
        .collect();
    ComplexMatrix::new(n, n, data)
}

/// `⟨out|𝒰|in⟩ = Perm(U[out, in]) / √(∏ outᵢ! ∏ inⱼ!)`.
///
/// `U[k, l]` is the single-photon amplitude from input mode `l` to output
/// mode `k`, so `U ↦ 𝒰` is a group homomorphism.
pub fn transition_amplitude(
    u: &ComplexMatrix,
    out: &OccupationPattern,
    input: &OccupationPattern,
) -> Result<Complex64> {
    if !u.is_square() {
        return Err(Error::Dimension("interferometer must be square".into()));
    }
    if out.modes() != u.rows() || input.modes() != u.rows() {
        return Err(Error::Pattern(format!(
            "patterns {out} and {input} do not match {} modes",
            u.rows()
        )));
    }
    if out.total() != input.total() {
        return Err(Error::Conservation {
            output: out.total(),
            input: input.total(),
        });
    }
    if out.total() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let perm = permanent(&reduced_matrix(u, out, input)?)?;
    Ok(perm / (out.factorial_product() * input.factorial_product()).sqrt())
}

/// Amplitude vector over one photon-number sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SectorJson", into = "SectorJson")]
pub struct SectorState {
    modes: usize,
    photons: usize,
    amplitudes: Vec<Complex64>,
}

/// Wire format `{"modes": M, "photons": N, "re": [...], "im": [...]}`.
#[derive(Serialize, Deserialize)]
struct SectorJson {
    modes: usize,
    photons: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<SectorJson> for SectorState {
    type Error = Error;

    fn try_from(j: SectorJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::Dimension("re and im lengths differ".into()));
        }
        let amps = j
            .re
            .iter()
            .zip(&j.im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        SectorState::new(j.modes, j.photons, amps)
    }
}

impl From<SectorState> for SectorJson {
    fn from(s: SectorState) -> Self {
        SectorJson {
            modes: s.modes,
            photons: s.photons,
            re: s.amplitudes.iter().map(|z| z.re).collect(),
            im: s.amplitudes.iter().map(|z| z.im).collect(),
        }
    }
}

impl SectorState {
    pub fn new(modes: usize, photons: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Dimension("sector state needs at least one mode".into()));
        }
        let dim = sector_dimension(modes, photons);
        if amplitudes.len() != dim {
            return Err(Error::Dimension(format!(
                "sector ({modes} modes, {photons} photons) has dimension {dim}, got {} amplitudes",
                amplitudes.len()
            )));
        }
        Ok(Self {
            modes,
            photons,
            amplitudes,
        })
    }

    pub fn zeros(modes: usize, photons: usize) -> Self {
        let dim = sector_dimension(modes, photons);
        Self {
            modes,
            photons,
            amplitudes: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// `|pattern⟩`.
    pub fn basis(pattern: &OccupationPattern) -> Result<Self> {
        let basis = SectorBasis::new(pattern.modes(), pattern.total());
        let mut s = Self::zeros(pattern.modes(), pattern.total());
        s.amplitudes[basis.rank(pattern)?] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize the zero state".into()));
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(self)
    }

    pub fn amplitude(&self, pattern: &OccupationPattern) -> Result<Complex64> {
        let basis = SectorBasis::new(self.modes, self.photons);
        Ok(self.amplitudes[basis.rank(pattern)?])
    }
}

/// Dense matrix of `𝒰` restricted to the `photons` sector, indexed in
/// sector order: entry `[k, n] = ⟨k|𝒰|n⟩`.
pub fn sector_unitary(u: &ComplexMatrix, photons: usize) -> Result<ComplexMatrix> {
    if !u.is_square() {
        return Err(Error::Dimension("interferometer must be square".into()));
    }
    let basis = SectorBasis::new(u.rows(), photons);
    let d = basis.len();
    let rows: Vec<Vec<Complex64>> = basis
        .patterns()
        .par_iter()
        .map(|k| {
            basis
                .patterns()
                .iter()
                .map(|n| transition_amplitude(u, k, n))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    ComplexMatrix::new(d, d, rows.concat())
}

/// `𝒰|state⟩`, computed densely over all pattern pairs.
pub fn apply_interferometer(state: &SectorState, u: &ComplexMatrix) -> Result<SectorState> {
    if !u.is_square() || u.rows() != state.modes {
        return Err(Error::Dimension(format!(
            "{}-mode state cannot pass a {}x{} interferometer",
            state.modes,
            u.rows(),
            u.cols()
        )));
    }
    let basis = SectorBasis::new(state.modes, state.photons);
    let inputs: Vec<(&OccupationPattern, Complex64)> = basis
        .patterns()
        .iter()
        .zip(&state.amplitudes)
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(p, &a)| (p, a))
        .collect();
    let amplitudes = basis
        .patterns()
        .par_iter()
        .map(|k| {
            inputs.iter().try_fold(Complex64::new(0.0, 0.0), |acc, (n, a)| {
                Ok(acc + transition_amplitude(u, k, n)? * a)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SectorState::new(state.modes, state.photons, amplitudes)
}

/// `⟨a|b⟩`.
pub fn sector_overlap(a: &SectorState, b: &SectorState) -> Result<Complex64> {
    if a.modes != b.modes || a.photons != b.photons {
        return Err(Error::Dimension(format!(
            "sector mismatch: ({}, {}) vs ({}, {})",
            a.modes, a.photons, b.modes, b.photons
        )));
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::beamsplitter_unitary;
    use crate::haar::{haar_unitary, RandomSeed};
    use rand::Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pat(v: &[usize]) -> OccupationPattern {
        OccupationPattern::new(v.to_vec())
    }

    fn random_state(modes: usize, photons: usize, seed: u64) -> SectorState {
        let mut rng = RandomSeed(seed).rng();
        let d = sector_dimension(modes, photons);
        let amps = (0..d)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        SectorState::new(modes, photons, amps)
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_patterns(2, 1), vec![pat(&[1, 0]), pat(&[0, 1])]);
        assert_eq!(enumerate_patterns(3, 0), vec![pat(&[0, 0, 0])]);
        assert_eq!(enumerate_patterns(4, 2).len(), 10);
    }

    #[test]
    fn enumeration_is_sorted_and_complete() {
        for m in 1..=5 {
            for n in 0..=4 {
                let pats = enumerate_patterns(m, n);
                assert_eq!(pats.len(), sector_dimension(m, n));
                assert!(pats.windows(2).all(|w| w[0] > w[1]));
                assert!(pats.iter().all(|p| p.total() == n && p.modes() == m));
            }
        }
    }

    #[test]
    fn rank_inverts_enumeration() {
        for m in 1..=5 {
            for n in 0..=4 {
                let basis = SectorBasis::new(m, n);
                for (i, p) in basis.patterns().iter().enumerate() {
                    assert_eq!(basis.rank(p).unwrap(), i);
                }
            }
        }
        assert!(SectorBasis::new(2, 2).rank(&pat(&[1, 0])).is_err());
    }

    #[test]
    fn reduced_matrix_examples() {
        let u = haar_unitary(2, RandomSeed(1)).unwrap();
        assert_eq!(reduced_matrix(&u, &pat(&[1, 1]), &pat(&[1, 1])).unwrap(), u);
        let single = reduced_matrix(&u, &pat(&[0, 1]), &pat(&[1, 0])).unwrap();
        assert_eq!(single.as_slice(), &[u[(1, 0)]]);
        let doubled = reduced_matrix(&u, &pat(&[2, 0]), &pat(&[1, 1])).unwrap();
        assert_eq!(
            doubled.as_slice(),
            &[u[(0, 0)], u[(0, 1)], u[(0, 0)], u[(0, 1)]]
        );
        assert!(matches!(
            reduced_matrix(&u, &pat(&[2, 0]), &pat(&[1, 0])),
            Err(Error::Pattern(_))
        ));
    }

    #[test]
    fn hong_ou_mandel() {
        let bs = beamsplitter_unitary();
        let a = transition_amplitude(&bs, &pat(&[1, 1]), &pat(&[1, 1])).unwrap();
        assert!(a.norm() < 1e-16);
        let b = transition_amplitude(&bs, &pat(&[2, 0]), &pat(&[1, 1])).unwrap();
        assert!((b.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn identity_circuit_amplitudes() {
        let id = ComplexMatrix::identity(3);
        for a in enumerate_patterns(3, 2) {
            for b in enumerate_patterns(3, 2) {
                let amp = transition_amplitude(&id, &a, &b).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((amp - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn vacuum_amplitude_is_one_and_conservation_enforced() {
        let u = haar_unitary(3, RandomSeed(2)).unwrap();
        assert_eq!(
            transition_amplitude(&u, &pat(&[0, 0, 0]), &pat(&[0, 0, 0])).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(matches!(
            transition_amplitude(&u, &pat(&[1, 0, 0]), &pat(&[1, 1, 0])),
            Err(Error::Conservation { output: 1, input: 2 })
        ));
    }

    #[test]
    fn sector_level_unitarity() {
        for m in 1..=4 {
            let u = haar_unitary(m, RandomSeed(40 + m as u64)).unwrap();
            for n in 0..=3 {
                for input in enumerate_patterns(m, n) {
                    let total: f64 = enumerate_patterns(m, n)
                        .iter()
                        .map(|k| transition_amplitude(&u, k, &input).unwrap().norm_sqr())
                        .sum();
                    assert!((total - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn transposition_identity() {
        let u = haar_unitary(3, RandomSeed(8)).unwrap();
        let ut = u.transpose();
        for n in enumerate_patterns(3, 2) {
            for m in enumerate_patterns(3, 2) {
                let lhs = transition_amplitude(&ut, &n, &m).unwrap();
                let rhs = transition_amplitude(&u, &m, &n).unwrap();
                assert!((lhs - rhs).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn apply_identity_leaves_state_unchanged() {
        let s = random_state(3, 2, 5);
        let out = apply_interferometer(&s, &ComplexMatrix::identity(3)).unwrap();
        for (a, b) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_preserves_norm() {
        let s = random_state(4, 2, 6);
        let u = haar_unitary(4, RandomSeed(7)).unwrap();
        let out = apply_interferometer(&s, &u).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn composition_matches_product() {
        let s = random_state(4, 2, 9);
        let ua = haar_unitary(4, RandomSeed(10)).unwrap();
        let ub = haar_unitary(4, RandomSeed(11)).unwrap();
        let ub_dag = ub.adjoint();
        let sequential =
            apply_interferometer(&apply_interferometer(&s, &ub_dag).unwrap(), &ua).unwrap();
        let combined = apply_interferometer(&s, &(&ua * &ub_dag)).unwrap();
        let dev = sequential
            .amplitudes()
            .iter()
            .zip(combined.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn overlap_properties() {
        let a = random_state(3, 2, 12);
        let b = random_state(3, 2, 13);
        assert!((sector_overlap(&a, &a).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let ab = sector_overlap(&a, &b).unwrap();
        let ba = sector_overlap(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
        let e0 = SectorState::basis(&pat(&[2, 0, 0])).unwrap();
        let e1 = SectorState::basis(&pat(&[1, 1, 0])).unwrap();
        assert_eq!(sector_overlap(&e0, &e1).unwrap(), Complex64::new(0.0, 0.0));
        assert!(sector_overlap(&a, &SectorState::zeros(3, 1)).is_err());
    }

    #[test]
    fn sector_json_layout() {
        let s = SectorState::basis(&pat(&[0, 1])).unwrap();
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(
            j,
            serde_json::json!({"modes": 2, "photons": 1, "re": [0.0, 1.0], "im": [0.0, 0.0]})
        );
        assert_eq!(serde_json::to_string(&pat(&[1, 0, 2])).unwrap(), "[1,0,2]");
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let s = random_state(3, 1, 1);
        assert!(apply_interferometer(&s, &ComplexMatrix::identity(2)).is_err());
    }
}
