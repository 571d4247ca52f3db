use std::fs::File;
use std::io::{self, BufWriter, Write};

use bosim::fock::{binomial, enumerate_patterns, sector_dimension};
use bosim::gaussian::SqueezeVector;
use bosim::haar::{ginibre, haar_unitary};
use bosim::homodyne::{
    box_probability, embedded_origin_check, empirical_orders, expansion_sweep, origin_constant,
    origin_density, origin_evaluator, origin_reference, BoxIndex, DensityEvaluator, MAX_BOX_MODES,
    MAX_EMBED_SIZE,
};
use bosim::sampling::{
    analytic_optimal_squeezing, heralded_sampler, herald_success_probability,
    optimal_herald_squeezing, write_samples_csv,
};
use bosim::table::format_float;
use bosim::tsbs::{
    conditional_probability, squeezed_input_probability, squeezed_joint_probability,
    unfolded_probability, SqueezedSetup, TsbsConfig,
};
use bosim::{ComplexMatrix, Complex64, OccupationPattern, RandomSeed};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format, Model};
use crate::CliError;

/// Largest M accepted for exhaustive checks.
const MAX_VERIFY_MODES: usize = 16;
/// Largest photon-number sector accepted for exhaustive checks.
const MAX_SECTOR: usize = 2000;
/// Largest number of (pattern, pattern) evaluations per check.
const MAX_EVALUATIONS: usize = 200_000;

const TSBS_TOL: f64 = 1e-10;
const SQUEEZED_TOL: f64 = 1e-8;
const ORIGIN_TOL: f64 = 1e-10;
const EMBED_TOL: f64 = 1e-8;
const HERALD_TOL: f64 = 1e-6;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report {
    identity: &'static str,
    max_deviation: f64,
    tolerance: f64,
    pass: bool,
    config: Value,
    #[serde(flatten)]
    extra: Value,
}

impl Report {
    fn new(identity: &'static str, max_deviation: f64, tolerance: f64, cfg: &ExperimentConfig) -> Self {
        Report {
            identity,
            max_deviation,
            tolerance,
            pass: max_deviation <= tolerance,
            config: json!(cfg),
            extra: json!({}),
        }
    }

    fn with(mut self, extra: Value) -> Self {
        self.extra = extra;
        self
    }
}

fn open_output(cfg: &ExperimentConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Output(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(cfg: &ExperimentConfig, value: &impl Serialize) -> Result<(), CliError> {
    let mut out = open_output(cfg)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn haar_pair(cfg: &ExperimentConfig) -> Result<(ComplexMatrix, ComplexMatrix), CliError> {
    let seed = RandomSeed(cfg.seed);
    Ok((
        haar_unitary(cfg.modes, seed.derive(0))?,
        haar_unitary(cfg.modes, seed.derive(1))?,
    ))
}

fn require(ok: bool, message: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Invalid(message()))
    }
}

fn check_budget(cfg: &ExperimentConfig, sector: usize, evaluations: usize) -> Result<(), CliError> {
    require(cfg.modes <= MAX_VERIFY_MODES, || {
        format!("M = {} exceeds {MAX_VERIFY_MODES} for exhaustive checks", cfg.modes)
    })?;
    require(sector <= MAX_SECTOR, || {
        format!("photon-number sector of {sector} states exceeds {MAX_SECTOR}")
    })?;
    require(evaluations <= MAX_EVALUATIONS, || {
        format!("{evaluations} probability evaluations exceed {MAX_EVALUATIONS}")
    })
}

fn finish(cfg: &ExperimentConfig, report: Report) -> Result<(), CliError> {
    write_json(cfg, &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Violated(format!(
            "{}: deviation {:.3e} above {:.1e}",
            report.identity, report.max_deviation, report.tolerance
        )))
    }
}

pub fn verify(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let report = match cfg.model {
        Model::Tsbs => verify_tsbs(cfg)?,
        Model::Squeezed => verify_squeezed(cfg)?,
        Model::Homodyne => verify_homodyne(cfg)?,
        Model::Embed => verify_embed(cfg)?,
        Model::Herald => verify_herald(cfg)?,
    };
    finish(cfg, report)
}

/// Conditional from the two-sided joint against the unfolded single circuit,
/// over every binary herald pattern and every output pattern.
fn verify_tsbs(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (m, n) = (cfg.modes, cfg.photons);
    let sector = sector_dimension(m, n);
    check_budget(cfg, sector, binomial(m, n).saturating_mul(sector))?;
    let (u_a, u_b) = haar_pair(cfg)?;
    let tsbs = TsbsConfig::equal(u_a.clone(), u_b.clone(), cfg.squeezing)?;
    let outputs = enumerate_patterns(m, n);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for herald in enumerate_patterns(m, n).into_iter().filter(|p| p.is_binary()) {
        for k in &outputs {
            let two_sided = conditional_probability(&tsbs, k, &herald)?;
            let unfolded = unfolded_probability(&u_a, &u_b, k, &herald)?;
            worst = worst.max((two_sided - unfolded).abs());
            checked += 1;
        }
    }
    Ok(Report::new("conditional=unfolded", worst, TSBS_TOL, cfg).with(json!({ "pairs": checked })))
}

/// Closed-form squeezed-vacuum joint against the direct Fock-sector sum
/// through the 2M-mode network.
fn verify_squeezed(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (m, n) = (cfg.modes, cfg.photons);
    let binary = binomial(m, n);
    let sector = sector_dimension(2 * m, 2 * n);
    check_budget(cfg, sector_dimension(m, n), binary.saturating_mul(binary).saturating_mul(sector))?;
    let (u_a, u_b) = haar_pair(cfg)?;
    let setup = SqueezedSetup::alternating(u_a, u_b, cfg.squeezing)?;
    let squeezing = SqueezeVector::alternating(cfg.squeezing, m);
    let patterns: Vec<OccupationPattern> =
        enumerate_patterns(m, n).into_iter().filter(|p| p.is_binary()).collect();
    let mut worst: f64 = 0.0;
    for k in &patterns {
        for h in &patterns {
            let closed = squeezed_joint_probability(&setup, k, h)?;
            let direct = squeezed_input_probability(setup.network(), &squeezing, &k.concat(h))?;
            let scale = closed.abs().max(direct.abs());
            if scale > 0.0 {
                worst = worst.max((closed - direct).abs() / scale);
            }
        }
    }
    Ok(Report::new("squeezed-closed-form", worst, SQUEEZED_TOL, cfg)
        .with(json!({ "pairs": patterns.len() * patterns.len() })))
}

fn homodyne_evaluator(cfg: &ExperimentConfig) -> Result<(DensityEvaluator, f64, f64), CliError> {
    require(2 * cfg.modes <= MAX_BOX_MODES, || {
        format!(
            "homodyne boxes need 2M ≤ {MAX_BOX_MODES} measured modes, got M = {}",
            cfg.modes
        )
    })?;
    let (u_a, u_b) = haar_pair(cfg)?;
    let k = OccupationPattern::leading_ones(cfg.modes, cfg.photons);
    let eval = origin_evaluator(&u_a, &u_b, cfg.squeezing, &k, &k)?;
    let density = origin_density(&u_a, &u_b, cfg.squeezing, &k, &k)?;
    let reference = origin_constant(cfg.modes) * origin_reference(&u_a, &u_b, cfg.squeezing, &k, &k)?;
    Ok((eval, density, reference))
}

/// Origin density against the permanent formula, plus the origin-box
/// expansion at η, η/2 and η/4 under the quadrature gate.
fn verify_homodyne(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let (eval, density, reference) = homodyne_evaluator(cfg)?;
    let deviation = (density - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
    // the gate: the requested box must converge at the chosen order
    box_probability(&eval, &BoxIndex::origin(eval.modes(), cfg.eta), cfg.order)?;
    let etas = [cfg.eta, cfg.eta / 2.0, cfg.eta / 4.0];
    let rows = expansion_sweep(&eval, &etas, cfg.order)?;
    let orders = empirical_orders(&rows);
    Ok(Report::new("origin-density", deviation, ORIGIN_TOL, cfg).with(json!({
        "model": "homodyne",
        "M": cfg.modes,
        "N": cfg.photons,
        "xi": cfg.squeezing,
        "eta": cfg.eta,
        "value": density,
        "reference": reference,
        "tailMass": 0.0,
        "quadratureOrder": cfg.order,
        "nMax": eval.fock_cutoff(),
        "convergence": rows,
        "empiricalOrders": orders,
    })))
}

/// Scaled origin density of an embedded random real matrix against
/// `ε^{2N} Perm(X)²`.
fn verify_embed(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let n = cfg.photons;
    require((1..=MAX_EMBED_SIZE).contains(&n), || {
        format!("embedding needs 1 ≤ N ≤ {MAX_EMBED_SIZE}, got N = {n}")
    })?;
    let x = ginibre(n, RandomSeed(cfg.seed).derive(0)).map(|z| Complex64::new(z.re, 0.0));
    let check = embedded_origin_check(&x, cfg.squeezing)?;
    let deviation = (check.p0 - check.reference).abs() / check.reference.abs().max(f64::MIN_POSITIVE);
    Ok(Report::new("embedded-permanent", deviation, EMBED_TOL, cfg).with(json!({
        "p0": check.p0,
        "reference": check.reference,
        "epsilon": check.epsilon,
    })))
}

/// Numerical maximizer of the herald success probability against
/// `√(N/(N+M))`.
fn verify_herald(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let numeric = optimal_herald_squeezing(cfg.modes, cfg.photons)?;
    let analytic = analytic_optimal_squeezing(cfg.modes, cfg.photons);
    let deviation = (numeric - analytic).abs();
    Ok(Report::new("herald-optimum", deviation, HERALD_TOL, cfg).with(json!({
        "tOpt": numeric,
        "analytic": analytic,
        "successProbability": herald_success_probability(cfg.modes, cfg.photons, numeric)?,
    })))
}

pub fn sample(cfg: &ExperimentConfig) -> Result<(), CliError> {
    require(matches!(cfg.model, Model::Tsbs | Model::Herald), || {
        format!("sampling is available for tsbs and herald, not {}", cfg.model)
    })?;
    require(cfg.modes <= MAX_VERIFY_MODES, || {
        format!("M = {} exceeds {MAX_VERIFY_MODES} for sampling", cfg.modes)
    })?;
    let (u_a, u_b) = haar_pair(cfg)?;
    let tsbs = TsbsConfig::equal(u_a, u_b, cfg.squeezing)?;
    let shots = heralded_sampler(&tsbs, RandomSeed(cfg.seed).derive(2), cfg.shots)?;
    let mut out = open_output(cfg)?;
    match cfg.format {
        Format::Csv => {
            let meta: Vec<(String, String)> = [
                ("model", cfg.model.to_string()),
                ("M", cfg.modes.to_string()),
                ("t", format_float(cfg.squeezing)),
                ("seed", cfg.seed.to_string()),
                ("shots", cfg.shots.to_string()),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
            write_samples_csv(&mut out, &shots, &meta)?;
        }
        Format::Json => {
            let samples: Vec<Value> = shots
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "shot": i,
                        "herald": s.herald.occupations(),
                        "output": s.output.occupations(),
                    })
                })
                .collect();
            let doc = json!({ "config": cfg, "samples": samples });
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

struct ScanRow {
    parameter: f64,
    value: f64,
    ratio: f64,
}

pub fn scan(cfg: &ExperimentConfig) -> Result<(), CliError> {
    require(!cfg.grid.is_empty(), || "scan needs a non-empty --grid".into())?;
    let (rows, extra) = match cfg.model {
        Model::Herald => scan_herald(cfg)?,
        Model::Homodyne => scan_homodyne(cfg)?,
        other => return Err(CliError::Invalid(format!("no scan is defined for {other}"))),
    };
    match cfg.format {
        Format::Csv => {
            let mut out = open_output(cfg)?;
            writeln!(out, "parameter,value,ratio")?;
            for r in &rows {
                let ratio = if r.ratio.is_finite() { format_float(r.ratio) } else { String::new() };
                writeln!(out, "{},{},{}", format_float(r.parameter), format_float(r.value), ratio)?;
            }
            out.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "parameter": r.parameter, "value": r.value, "ratio": r.ratio }))
                .collect();
            let mut doc = json!({ "config": cfg, "rows": rows });
            if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
                doc.extend(extra);
            }
            write_json(cfg, &doc)?;
        }
    }
    Ok(())
}

/// Herald success probability over a grid of `t`, relative to its maximum.
fn scan_herald(cfg: &ExperimentConfig) -> Result<(Vec<ScanRow>, Value), CliError> {
    for &t in &cfg.grid {
        require((0.0..1.0).contains(&t), || format!("t = {t} outside [0, 1)"))?;
    }
    let t_opt = optimal_herald_squeezing(cfg.modes, cfg.photons)?;
    let best = herald_success_probability(cfg.modes, cfg.photons, t_opt)?;
    let rows = cfg
        .grid
        .iter()
        .map(|&t| {
            let value = herald_success_probability(cfg.modes, cfg.photons, t)?;
            Ok(ScanRow {
                parameter: t,
                value,
                ratio: value / best,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((rows, json!({ "tOpt": t_opt, "maxProbability": best })))
}

/// Relative error of the origin-box expansion over a grid of `η`; the ratio
/// is the previous row's error over this one's.
fn scan_homodyne(cfg: &ExperimentConfig) -> Result<(Vec<ScanRow>, Value), CliError> {
    for &eta in &cfg.grid {
        require(eta > 0.0 && eta.is_finite(), || format!("eta = {eta} must be positive"))?;
    }
    let (eval, _, _) = homodyne_evaluator(cfg)?;
    let sweep = expansion_sweep(&eval, &cfg.grid, cfg.order)?;
    let rows = sweep
        .iter()
        .enumerate()
        .map(|(i, r)| ScanRow {
            parameter: r.eta,
            value: r.relative_error,
            ratio: if i == 0 { f64::NAN } else { sweep[i - 1].relative_error / r.relative_error },
        })
        .collect();
    Ok((rows, json!({})))
}
