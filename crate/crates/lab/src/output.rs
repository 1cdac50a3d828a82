//! CSV results, the per-trial JSONL sidecar, and re-validation of both.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subquery_core::oracle::HASH_ID;
use subquery_core::{PatternGraph, StrategyParams};

use crate::error::{LabError, Result};
use crate::harness::{Experiment, PointResult, ResultRow, TrialRecord};
use crate::stats::{fit_exponent, Fit, FitPoint};

/// Fixed CSV columns.
pub const COLUMNS: [&str; 14] = [
    "p",
    "b",
    "trials",
    "successes",
    "rate",
    "rate_lo",
    "rate_hi",
    "q_min",
    "q25",
    "q50",
    "q75",
    "q_max",
    "restarts_mean",
    "clamped",
];

/// Grid results plus the exponent fit, when there are enough points.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<PointResult>,
    /// `None` below three points.
    pub fit: Option<std::result::Result<Fit, String>>,
}

impl ScalingReport {
    pub fn rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.points.iter().map(|p| &p.row)
    }
}

pub fn fit_rows<'a>(rows: impl IntoIterator<Item = &'a ResultRow>) -> Result<Fit> {
    let pts: Vec<FitPoint> = rows
        .into_iter()
        .map(|r| FitPoint {
            b: r.b,
            median: r.median(),
            rate: r.rate,
        })
        .collect();
    fit_exponent(&pts)
}

/// Runs the grid and fits the exponent.
pub fn scaling_experiment(exp: &Experiment) -> Result<ScalingReport> {
    let points = exp.estimate_success()?;
    let fit = (points.len() >= 3)
        .then(|| fit_rows(points.iter().map(|p| &p.row)).map_err(|e| e.to_string()));
    Ok(ScalingReport { points, fit })
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn params_line(p: &StrategyParams) -> String {
    format!(
        "# params ell_floor={} pool_multiplier={} cloud_scale={} max_restarts={} budget={}",
        p.ell_floor, p.pool_multiplier, p.cloud_scale, p.max_restarts, p.budget
    )
}

/// The CSV document: `#` metadata lines, one header line, one row per grid
/// point, then `# slope=<v> se=<v>` when a fit exists.
pub fn render_csv(exp: &Experiment, report: &ScalingReport) -> Result<String> {
    let cfg = &exp.config;
    let mut out = String::new();
    out.push_str(&format!(
        "# strategy={} graph={} seed={} trials={} hash={}\n",
        cfg.strategy,
        cfg.graph_label(),
        cfg.seed,
        cfg.trials,
        HASH_ID
    ));
    out.push_str(&params_line(&cfg.params));
    out.push('\n');
    out.push_str(
        "# rate_lo/rate_hi: Wilson score interval at 95%; quantiles over successful trials\n",
    );

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| LabError::Runtime(e.to_string());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for row in report.rows() {
        let q = |f: fn(&crate::stats::Quantiles) -> f64| {
            row.queries.as_ref().map(f).map(num).unwrap_or_default()
        };
        w.write_record([
            num(row.p),
            num(row.b),
            row.trials.to_string(),
            row.successes.to_string(),
            num(row.rate),
            num(row.rate_lo),
            num(row.rate_hi),
            q(|q| q.min),
            q(|q| q.q25),
            q(|q| q.q50),
            q(|q| q.q75),
            q(|q| q.max),
            num(row.restarts_mean),
            row.clamped.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| LabError::Runtime(e.to_string()))?;
    out.push_str(&String::from_utf8(body).map_err(|e| LabError::Runtime(e.to_string()))?);
    match &report.fit {
        Some(Ok(fit)) => out.push_str(&format!("# slope={} se={}\n", fit.slope, fit.se)),
        Some(Err(e)) => out.push_str(&format!("# fit-error: {e}\n")),
        None => {}
    }
    Ok(out)
}

/// First line of the sidecar: enough to re-check every stored embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarHeader {
    pub strategy: String,
    pub seed: u64,
    pub hash: String,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub params: StrategyParams,
}

/// `results.csv` -> `results.trials.jsonl`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("trials.jsonl")
}

pub fn render_sidecar(exp: &Experiment, points: &[PointResult]) -> Result<String> {
    let header = SidecarHeader {
        strategy: exp.config.strategy.clone(),
        seed: exp.config.seed,
        hash: HASH_ID.to_string(),
        n: exp.graph.n(),
        edges: exp.graph.edges().to_vec(),
        params: exp.config.params,
    };
    let mut out = json_line(&header)?;
    for t in points.iter().flat_map(|p| &p.trials) {
        out.push_str(&json_line(t)?);
    }
    Ok(out)
}

fn json_line<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string(v).map_err(|e| LabError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes the CSV to `path` and the sidecar next to it.
pub fn write_report(exp: &Experiment, report: &ScalingReport, path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(exp, report)?)?;
    std::fs::write(sidecar_path(path), render_sidecar(exp, &report.points)?)?;
    Ok(())
}

/// `q50` of `strategy` over `q50` of `baseline`, per shared `p`.
pub fn ratio_table(
    strategy: &ScalingReport,
    baseline: &ScalingReport,
) -> Vec<(f64, Option<f64>, Option<f64>, Option<f64>)> {
    strategy
        .rows()
        .filter_map(|r| {
            let base = baseline.rows().find(|b| b.p == r.p)?;
            let (a, c) = (r.median(), base.median());
            let ratio = a.zip(c).map(|(a, c)| a / c);
            Some((r.p, a, c, ratio))
        })
        .collect()
}

pub fn render_ratio_table(
    name: &str,
    baseline: &str,
    rows: &[(f64, Option<f64>, Option<f64>, Option<f64>)],
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| LabError::Runtime(e.to_string());
    w.write_record([
        "p",
        "b",
        &format!("q50_{name}"),
        &format!("q50_{baseline}"),
        "ratio",
    ])
    .map_err(csv_err)?;
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for &(p, a, c, r) in rows {
        w.write_record([num(p), num(1.0 / p), opt(a), opt(c), opt(r)])
            .map_err(csv_err)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| LabError::Runtime(e.to_string()))?;
    String::from_utf8(body).map_err(|e| LabError::Runtime(e.to_string()))
}

/// Result of re-checking a stored run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub trials: u64,
    pub successes: u64,
    /// `(p, trial)` of stored successes that fail the hash check.
    pub invalid: Vec<(f64, u64)>,
    /// Grid points whose CSV success count disagrees with the sidecar.
    pub count_mismatches: Vec<f64>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.invalid.is_empty() && self.count_mismatches.is_empty()
    }
}

/// Re-validates every success in a sidecar, and, if the CSV is given,
/// checks its success counts against the sidecar.
pub fn verify(sidecar: &str, csv: Option<&str>) -> Result<VerifyReport> {
    let mut lines = sidecar.lines().filter(|l| !l.trim().is_empty());
    let bad = |e: serde_json::Error| LabError::Config(format!("sidecar: {e}"));
    let header: SidecarHeader =
        serde_json::from_str(lines.next().unwrap_or_default()).map_err(bad)?;
    if header.hash != HASH_ID {
        return Err(LabError::Config(format!(
            "sidecar uses hash `{}`, this build has `{HASH_ID}`",
            header.hash
        )));
    }
    let h = PatternGraph::new(header.n, header.edges.iter().copied())
        .map_err(|e| LabError::Config(format!("sidecar graph: {e}")))?;
    let mut report = VerifyReport::default();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for line in lines {
        let rec: TrialRecord = serde_json::from_str(line).map_err(bad)?;
        report.trials += 1;
        if rec.success {
            report.successes += 1;
            *counts.entry(rec.p.to_bits()).or_default() += 1;
            if !rec.revalidate(&h, header.seed) {
                report.invalid.push((rec.p, rec.trial));
            }
        }
    }
    if let Some(text) = csv {
        let mut rd = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        for rec in rd.records() {
            let rec = rec.map_err(|e| LabError::Config(format!("csv: {e}")))?;
            let field = |i: usize| rec.get(i).unwrap_or_default();
            let p: f64 = field(0)
                .parse()
                .map_err(|_| LabError::Config(format!("csv: bad p `{}`", field(0))))?;
            let s: u64 = field(3)
                .parse()
                .map_err(|_| LabError::Config(format!("csv: bad successes `{}`", field(3))))?;
            if counts.get(&p.to_bits()).copied().unwrap_or(0) != s {
                report.count_mismatches.push(p);
            }
        }
    }
    Ok(report)
}
