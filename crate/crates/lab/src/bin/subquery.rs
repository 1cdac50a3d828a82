use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subquery_core::clique::TranscriptStrategy;
use subquery_core::graph::{builtin_from_spec, parse_graph};
use subquery_lab::analysis;
use subquery_lab::config::parse_probability;
use subquery_lab::harness::bisect_budget;
use subquery_lab::output::{
    ratio_table, render_csv, render_ratio_table, scaling_experiment, sidecar_path, verify,
    write_report, ScalingReport,
};
use subquery_lab::{Experiment, ExperimentConfig, LabError, Result};

/// Adaptive subgraph queries on lazily revealed random graphs.
#[derive(Parser, Debug)]
#[command(name = "subquery", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scaling experiment over a p grid: CSV with a fitted exponent
    Run {
        #[command(flatten)]
        exp: ExpArgs,
        /// Also run this strategy on the same grid and write a q50 ratio table
        #[arg(long)]
        baseline: Option<String>,
        /// Exit with code 3 unless every point has success rate >= 1/2
        #[arg(long)]
        require_half: bool,
        /// Exit with code 3 unless the fitted slope is at least this
        #[arg(long)]
        slope_min: Option<f64>,
        /// Exit with code 3 unless the fitted slope is at most this
        #[arg(long)]
        slope_max: Option<f64>,
    },
    /// Success rates and query quantiles per grid point
    Success {
        #[command(flatten)]
        exp: ExpArgs,
        /// Search for the smallest per-attempt budget reaching rate 1/2
        #[arg(long)]
        bisect: bool,
        /// First budget tried by --bisect
        #[arg(long, default_value_t = 1024)]
        bisect_start: u64,
    },
    /// Largest k not ruled out by the weight bound, per (n, delta)
    CliqueTable {
        #[arg(long = "n", required = true)]
        n: Vec<u64>,
        #[arg(long = "delta", required = true)]
        delta: Vec<f64>,
        /// Exit with code 3 if any row exceeds alpha_plus + 2/lg n
        #[arg(long)]
        check: bool,
    },
    /// Exact weight series along one sampled transcript on G(n, 1/2)
    Weights {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// Transcript length
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "random")]
        transcript: Transcript,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Degeneracy, depth and tree-partition report of a pattern
    Params {
        #[arg(long, conflicts_with = "graph_file")]
        graph: Option<String>,
        #[arg(long)]
        graph_file: Option<PathBuf>,
    },
    /// Re-validate a stored result file against the keyed hash
    Verify {
        /// CSV written by `run` or `success`
        csv: PathBuf,
        /// Per-trial sidecar; defaults to the CSV path with `.trials.jsonl`
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Transcript {
    Random,
    Greedy,
    Star,
}

impl From<Transcript> for TranscriptStrategy {
    fn from(t: Transcript) -> Self {
        match t {
            Transcript::Random => TranscriptStrategy::Random,
            Transcript::Greedy => TranscriptStrategy::Greedy,
            Transcript::Star => TranscriptStrategy::Star,
        }
    }
}

/// Experiment flags; each overrides the matching key of `--config`.
#[derive(Args, Debug)]
struct ExpArgs {
    /// TOML file with the same keys as these flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    strategy: Option<String>,
    /// Builtin graph such as `triforce`, `path:4`, `book:2,2`
    #[arg(long)]
    graph: Option<String>,
    /// Edge-list file: `n m` then `m` lines `u v`
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// Edge probability; repeatable. Accepts `0.01`, `1/128`, `2^-7`
    #[arg(long = "p", value_parser = parse_probability)]
    p: Vec<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Distinct queries per attempt; 0 means no extra limit
    #[arg(long)]
    budget: Option<u64>,
    /// Attempts per trial
    #[arg(long)]
    restarts: Option<u32>,
    #[arg(long)]
    pool_multiplier: Option<f64>,
    #[arg(long)]
    cloud_scale: Option<f64>,
    #[arg(long)]
    ell_floor: Option<f64>,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    jobs: Option<usize>,
    /// Output CSV; the per-trial sidecar goes next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExpArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::new("", "", Vec::new(), 100, 0),
        };
        if self.config.is_none() {
            cfg.graph = None;
        }
        if let Some(s) = &self.strategy {
            cfg.strategy = s.clone();
        }
        if let Some(g) = &self.graph {
            cfg.graph = Some(g.clone());
            cfg.graph_file = None;
        }
        if let Some(g) = &self.graph_file {
            cfg.graph_file = Some(g.clone());
        }
        if !self.p.is_empty() {
            cfg.p = self.p.clone();
        }
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),*) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$($field).+ = v; })*
            };
        }
        set!(trials => trials, seed => seed, jobs => jobs,
             budget => params.budget, restarts => params.max_restarts,
             pool_multiplier => params.pool_multiplier, cloud_scale => params.cloud_scale,
             ell_floor => params.ell_floor);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        Ok(cfg)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("results");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn write_or_print(exp: &Experiment, report: &ScalingReport, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_report(exp, report, path),
        None => emit(None, &render_csv(exp, report)?),
    }
}

fn run(
    exp: ExpArgs,
    baseline: Option<String>,
    require_half: bool,
    slope: (Option<f64>, Option<f64>),
) -> Result<()> {
    let cfg = exp.config()?;
    let out = cfg.out.clone();
    let experiment = Experiment::new(cfg)?;
    let report = scaling_experiment(&experiment)?;
    write_or_print(&experiment, &report, out.as_deref())?;

    if let Some(base) = baseline {
        let mut cfg = experiment.config.clone();
        cfg.strategy = base.clone();
        let base_exp = Experiment::new(cfg)?;
        let base_report = scaling_experiment(&base_exp)?;
        let table = render_ratio_table(
            &experiment.config.strategy,
            &base,
            &ratio_table(&report, &base_report),
        )?;
        match &out {
            Some(path) => {
                write_report(&base_exp, &base_report, &with_suffix(path, &base))?;
                emit(Some(&with_suffix(path, "ratio")), &table)?;
            }
            None => {
                emit(None, &render_csv(&base_exp, &base_report)?)?;
                emit(None, &table)?;
            }
        }
    }

    if require_half {
        if let Some(r) = report.rows().find(|r| r.rate < 0.5) {
            return Err(LabError::Assertion(format!(
                "success rate {} < 1/2 at p={}",
                r.rate, r.p
            )));
        }
    }
    if slope.0.is_some() || slope.1.is_some() {
        let fit = match &report.fit {
            Some(Ok(fit)) => fit,
            Some(Err(e)) => return Err(LabError::Assertion(e.clone())),
            None => return Err(LabError::Assertion("fewer than 3 grid points".into())),
        };
        let lo = slope.0.unwrap_or(f64::NEG_INFINITY);
        let hi = slope.1.unwrap_or(f64::INFINITY);
        if !(lo..=hi).contains(&fit.slope) {
            return Err(LabError::Assertion(format!(
                "slope {} outside [{lo}, {hi}]",
                fit.slope
            )));
        }
    }
    if let Some(Err(e)) = &report.fit {
        return Err(LabError::Runtime(e.clone()));
    }
    Ok(())
}

fn success(exp: ExpArgs, bisect: bool, start: u64) -> Result<()> {
    let cfg = exp.config()?;
    let out = cfg.out.clone();
    let experiment = Experiment::new(cfg)?;
    if bisect {
        let mut text = String::new();
        for &p in &experiment.config.p {
            let r = bisect_budget(&experiment, p, start, 40)?;
            text.push_str(
                &serde_json::to_string(&r).map_err(|e| LabError::Runtime(e.to_string()))?,
            );
            text.push('\n');
        }
        return emit(out.as_deref(), &text);
    }
    let points = experiment.estimate_success()?;
    let report = ScalingReport { points, fit: None };
    write_or_print(&experiment, &report, out.as_deref())
}

fn clique_table(n: &[u64], delta: &[f64], check: bool) -> Result<()> {
    let rows = analysis::clique_feasibility_table(n, delta)?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    let csv_err = |e: csv::Error| LabError::Runtime(e.to_string());
    w.write_record([
        "n",
        "delta",
        "t",
        "k_max",
        "k_over_lg_n",
        "alpha_plus",
        "lower_line",
    ])
    .map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            r.n.to_string(),
            r.delta.to_string(),
            r.t.to_string(),
            r.k_max_feasible.to_string(),
            r.k_over_lg_n.to_string(),
            r.alpha_plus.map(|a| a.to_string()).unwrap_or_default(),
            r.lower_line.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    if check {
        if let Some(r) = rows.iter().find(|r| !r.within_slack) {
            return Err(LabError::Assertion(format!(
                "n={} delta={}: k/lg n = {} above alpha_plus + 2/lg n",
                r.n, r.delta, r.k_over_lg_n
            )));
        }
    }
    Ok(())
}

fn params(graph: Option<String>, graph_file: Option<PathBuf>) -> Result<()> {
    let h = match (graph, graph_file) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
            parse_graph(&text)
                .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?
                .graph
        }
        (Some(spec), None) => builtin_from_spec(&spec)
            .map_err(|e| LabError::Config(format!("graph `{spec}`: {e}")))?,
        (None, None) => return Err(LabError::Config("give --graph or --graph-file".into())),
    };
    let report = analysis::params_report(&h)?;
    let text =
        serde_json::to_string_pretty(&report).map_err(|e| LabError::Runtime(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn verify_cmd(csv: &Path, sidecar: Option<PathBuf>) -> Result<()> {
    let side = sidecar.unwrap_or_else(|| sidecar_path(csv));
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|e| LabError::Config(format!("{}: {e}", p.display())))
    };
    let report = verify(&read(&side)?, Some(&read(csv)?))?;
    println!(
        "trials={} successes={} invalid={} count_mismatches={}",
        report.trials,
        report.successes,
        report.invalid.len(),
        report.count_mismatches.len()
    );
    if report.ok() {
        Ok(())
    } else {
        Err(LabError::Assertion(format!(
            "invalid embeddings at {:?}; count mismatches at p={:?}",
            report.invalid, report.count_mismatches
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run {
            exp,
            baseline,
            require_half,
            slope_min,
            slope_max,
        } => run(exp, baseline, require_half, (slope_min, slope_max)),
        Command::Success {
            exp,
            bisect,
            bisect_start,
        } => success(exp, bisect, bisect_start),
        Command::CliqueTable { n, delta, check } => clique_table(&n, &delta, check),
        Command::Weights {
            n,
            k,
            m,
            t,
            transcript,
            seed,
            trial,
        } => analysis::weight_series(transcript.into(), n, k, m, t, seed, trial)
            .and_then(|s| emit(None, &s)),
        Command::Params { graph, graph_file } => params(graph, graph_file),
        Command::Verify { csv, sidecar } => verify_cmd(&csv, sidecar),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("subquery: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
