//! Exact samplers, heralded scattershot simulation and goodness-of-fit tests.
//!
//! Every shot draws from its own ChaCha stream (`seed`, stream = shot index),
//! so the output is identical no matter how shots are spread over threads.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::fock::{binomial, OccupationPattern};
use crate::haar::RandomSeed;
use crate::table::DistributionTable;
use crate::tsbs::{conditional_table, squeezing_prefactor, HeraldedOutcome, TsbsConfig};

/// Cells with fewer expected counts are pooled before the chi-square test.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

fn uniform(rng: &mut impl Rng) -> f64 {
    rng.random::<f64>()
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Index of the first cell whose cumulative probability exceeds `u`.
fn invert(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

/// `count` i.i.d. support indices drawn from a normalized table.
pub fn exact_sampler<S: Sync>(
    table: &DistributionTable<S>,
    seed: RandomSeed,
    count: usize,
) -> Result<Vec<usize>> {
    if !table.is_normalized() || table.residual() > 0.0 {
        return Err(Error::Unnormalized {
            total: table.total(),
        });
    }
    let cdf = cumulative(table.probs());
    Ok((0..count as u64)
        .into_par_iter()
        .map(|shot| invert(&cdf, uniform(&mut seed.stream(shot))))
        .collect())
}

/// Number of photons drawn from `P(n) = (1−t²) t^{2n}`.
fn thermal_draw(t: f64, u: f64) -> usize {
    if t == 0.0 {
        return 0;
    }
    // P(n ≥ j) = t^{2j}; 1 − u lies in (0, 1]
    ((1.0 - u).ln() / (2.0 * t.ln())).floor() as usize
}

/// Heralded scattershot shots: each herald mode fires a thermally
/// distributed number of photons, then the output is drawn from the
/// conditional table of that herald pattern.
pub fn heralded_sampler(
    cfg: &TsbsConfig,
    seed: RandomSeed,
    count: usize,
) -> Result<Vec<HeraldedOutcome>> {
    let t = cfg.equal_squeezing().ok_or_else(|| {
        Error::ClosedFormInapplicable("heralded sampling needs equal squeezing".into())
    })?;
    let modes = cfg.modes();
    let draws: Vec<(OccupationPattern, f64)> = (0..count as u64)
        .into_par_iter()
        .map(|shot| {
            let mut rng = seed.stream(shot);
            let herald: Vec<usize> = (0..modes).map(|_| thermal_draw(t, uniform(&mut rng))).collect();
            (OccupationPattern::new(herald), uniform(&mut rng))
        })
        .collect();

    let heralds: BTreeSet<&OccupationPattern> = draws.iter().map(|(m, _)| m).collect();
    let built = heralds
        .into_par_iter()
        .map(|m| Ok((m.clone(), conditional_table(cfg, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let built: BTreeMap<_, _> = built
        .into_iter()
        .map(|(m, table)| {
            let cdf = cumulative(table.probs());
            (m, (table, cdf))
        })
        .collect();

    Ok(draws
        .into_par_iter()
        .map(|(herald, u)| {
            let (table, cdf) = &built[&herald];
            let output = table.support()[invert(cdf, u)].clone();
            HeraldedOutcome { herald, output }
        })
        .collect())
}

/// Probability that exactly `N` of `M` heralds fire once and the rest stay
/// dark: `C(M,N) (1−t²)^M t^{2N}`.
pub fn herald_success_probability(modes: usize, photons: usize, t: f64) -> Result<f64> {
    if photons > modes {
        return Err(Error::InvalidParameter(format!(
            "N = {photons} exceeds M = {modes}"
        )));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1)")));
    }
    Ok(binomial(modes, photons) as f64 * squeezing_prefactor(t, modes, photons))
}

/// Maximizer of [`herald_success_probability`] over `t`, by golden-section
/// search on its logarithm.
pub fn optimal_herald_squeezing(modes: usize, photons: usize) -> Result<f64> {
    if photons > modes || modes == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 0 ≤ N ≤ M with M > 0, got N = {photons}, M = {modes}"
        )));
    }
    if photons == 0 {
        return Ok(0.0);
    }
    let log_f = |t: f64| 2.0 * photons as f64 * t.ln() + modes as f64 * (-t * t).ln_1p();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (log_f(c), log_f(d));
    while b - a > 1e-13 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = log_f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = log_f(d);
        }
    }
    Ok(0.5 * (a + b))
}

/// Closed-form maximizer `t = √(N/(N+M))`.
pub fn analytic_optimal_squeezing(modes: usize, photons: usize) -> f64 {
    (photons as f64 / (photons + modes) as f64).sqrt()
}

/// `½ Σ |aᵢ − bᵢ|` over the support and residual cells.
pub fn total_variation<S: PartialEq>(a: &DistributionTable<S>, b: &DistributionTable<S>) -> Result<f64> {
    if a.support() != b.support() {
        return Err(Error::SupportMismatch);
    }
    let cells: f64 = a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).sum();
    Ok(0.5 * (cells + (a.residual() - b.residual()).abs()))
}

/// Histogram of support indices; shots outside the support are passed as
/// `None` and counted in a final residual cell.
pub fn histogram(indices: impl IntoIterator<Item = Option<usize>>, support_len: usize) -> Vec<u64> {
    let mut counts = vec![0u64; support_len + 1];
    for i in indices {
        counts[i.unwrap_or(support_len)] += 1;
    }
    counts
}

/// Empirical table with the same support as `reference`, from a histogram
/// laid out as in [`histogram`].
pub fn empirical_table<S: Clone>(
    reference: &DistributionTable<S>,
    counts: &[u64],
) -> Result<DistributionTable<S>> {
    if counts.len() != reference.len() + 1 {
        return Err(Error::Dimension(format!(
            "{} counts for {} support points plus residual",
            counts.len(),
            reference.len()
        )));
    }
    let shots: u64 = counts.iter().sum();
    if shots == 0 {
        return Err(Error::DegenerateTable("no shots".into()));
    }
    let probs = counts[..reference.len()]
        .iter()
        .map(|&c| c as f64 / shots as f64)
        .collect();
    DistributionTable::truncated(
        reference.support().to_vec(),
        probs,
        reference.metadata().clone(),
    )
}

/// Chi-square goodness-of-fit result.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Cells left after pooling.
    pub cells: usize,
}

/// Pearson goodness-of-fit of `counts` (support cells then residual, as in
/// [`histogram`]) against `table`. Cells expected to hold fewer than five
/// counts are pooled, smallest first.
pub fn chi_square_gof<S>(table: &DistributionTable<S>, counts: &[u64]) -> Result<ChiSquareResult> {
    if counts.len() != table.len() + 1 {
        return Err(Error::Dimension(format!(
            "{} counts for {} support points plus residual",
            counts.len(),
            table.len()
        )));
    }
    let shots: u64 = counts.iter().sum();
    let n = shots as f64;
    let mut cells: Vec<(f64, u64)> = table
        .probs()
        .iter()
        .chain(std::iter::once(&table.residual()))
        .zip(counts)
        .map(|(p, &c)| (p * n, c))
        .collect();
    // observations in a zero-probability cell are impossible under the table
    if cells.iter().any(|&(e, c)| e == 0.0 && c > 0) {
        return Ok(ChiSquareResult {
            statistic: f64::INFINITY,
            degrees_of_freedom: cells.iter().filter(|c| c.0 > 0.0).count().saturating_sub(1),
            p_value: 0.0,
            cells: cells.len(),
        });
    }
    cells.retain(|&(e, _)| e > 0.0);
    // stable sort keeps ties in support order
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    while cells.len() >= 2 && cells[0].0 < MIN_EXPECTED_COUNT {
        let (e0, c0) = cells.remove(0);
        let (e1, c1) = cells.remove(0);
        let merged = (e0 + e1, c0 + c1);
        let at = cells.partition_point(|c| c.0 <= merged.0);
        cells.insert(at, merged);
    }
    if cells.len() < 2 {
        return Err(Error::DegenerateTable(format!(
            "{} cell(s) after pooling",
            cells.len()
        )));
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(e, c)| (c as f64 - e).powi(2) / e)
        .sum();
    let df = cells.len() - 1;
    let dist = ChiSquared::new(df as f64)
        .map_err(|e| Error::InvalidParameter(format!("chi-square distribution: {e}")))?;
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom: df,
        p_value: dist.sf(statistic),
        cells: cells.len(),
    })
}

/// Writes shots as CSV (`shot,herald_pattern,output_pattern`) preceded by
/// `# key=value` metadata lines.
pub fn write_samples_csv<W: Write>(
    mut out: W,
    samples: &[HeraldedOutcome],
    metadata: &[(String, String)],
) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["shot", "herald_pattern", "output_pattern"])?;
    for (i, s) in samples.iter().enumerate() {
        w.write_record([i.to_string(), s.herald.to_string(), s.output.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
