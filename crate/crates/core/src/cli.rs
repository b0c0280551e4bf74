//! Command-line front end. Every command writes machine-readable output to
//! the given sink and returns a process exit code:
//! 0 success, 1 validation failure, 2 invalid parameters, parse or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analytics::{comparison_table, threshold_alpha, HYBRID_FOOTNOTE};
use crate::branching::{symmetric_matrix, tail_curve, GwConfig, StartType, DEFAULT_CAP};
use crate::dimacs::export_dimacs;
use crate::error::{Error, Result};
use crate::projection::ProjectionPolicy;
use crate::harness::{
    empirical_threshold, generate_formula, run_trials, summarize, sweep_alpha, ExperimentConfig, DEFAULT_PROBE_TRIALS,
};
use crate::report::{round_num, round_threshold, write_csv, write_json, Cell, Precision};
use crate::rules::{RuleKind, RuleSpec};
use crate::validate::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "achlioptas", version, about = "Achlioptas k-SAT processes, 2-SAT certificates and threshold analytics")]
struct Cli {
    /// Number formatting: 6 significant digits and 3-decimal thresholds, or full precision.
    #[arg(long, global = true, value_enum, default_value_t = PrecisionArg::Rounded)]
    precision: PrecisionArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Rounded,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certified threshold 1/Q for one rule (JSON).
    Thresholds {
        #[arg(long, value_parser = parse_rule)]
        rule: RuleKind,
        #[arg(long)]
        k: usize,
        /// Number of candidate clauses per step.
        #[arg(long)]
        l: usize,
    },
    /// Threshold comparison table over a (k, l) grid (CSV).
    Table {
        #[arg(long, default_value_t = 3)]
        k_min: usize,
        #[arg(long, default_value_t = 7)]
        k_max: usize,
        #[arg(long, default_value_t = 2)]
        l_min: usize,
        #[arg(long, default_value_t = 5)]
        l_max: usize,
    },
    /// Run full processes at one density (JSON: per-trial records and summary).
    Simulate {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long)]
        alpha: f64,
        /// Also report the largest reachable set of each implication digraph.
        #[arg(long)]
        reach: bool,
    },
    /// Certified-SAT fraction over a uniform density grid (CSV).
    Sweep {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long)]
        alpha_from: f64,
        #[arg(long)]
        alpha_to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Bisection for the 0.5-crossing of the certified-SAT fraction (JSON).
    FindThreshold {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long)]
        alpha_lo: f64,
        #[arg(long)]
        alpha_hi: f64,
        #[arg(long)]
        tol: f64,
    },
    /// Galton-Watson total-progeny tail beside the exponential bound (CSV).
    ///
    /// The mean matrix has every entry equal to rho / 2, so its spectral radius is rho.
    GwTail {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        l_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StartArg::Positive)]
        start: StartArg,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Built-in self-checks (CSV); exit code 1 if any check fails.
    Validate {
        #[arg(long, value_parser = parse_suite, default_value = "all")]
        suite: Suite,
    },
    /// Write one generated formula, or its 2-SAT projection, as DIMACS CNF.
    ExportDimacs {
        #[arg(long)]
        out: PathBuf,
        /// Export the projected 2-CNF instead of the k-CNF.
        #[arg(long)]
        projected: bool,
        #[arg(long, value_parser = parse_rule, default_value = "middle-heavy")]
        rule: RuleKind,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        l: usize,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial index whose formula is exported.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        #[arg(long, value_enum, default_value_t = ProjectionArg::Uniform)]
        projection: ProjectionArg,
    },
}

#[derive(Debug, Args)]
struct ProcessArgs {
    #[arg(long, value_parser = parse_rule)]
    rule: RuleKind,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Trials per density (default 30 for find-threshold, 50 otherwise).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Which qualifying literals the 2-SAT projection keeps.
    #[arg(long, value_enum, default_value_t = ProjectionArg::Uniform)]
    projection: ProjectionArg,
}

impl ProcessArgs {
    fn config(&self, default_trials: usize) -> Result<ExperimentConfig> {
        let rule = RuleSpec::new(self.rule, self.l)?;
        let mut cfg = ExperimentConfig::new(rule, self.k, self.n, 0.0, self.trials.unwrap_or(default_trials), self.seed);
        cfg.projection = self.projection.into();
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProjectionArg {
    Uniform,
    Smallest,
}

impl From<ProjectionArg> for ProjectionPolicy {
    fn from(p: ProjectionArg) -> Self {
        match p {
            ProjectionArg::Uniform => ProjectionPolicy::Uniform,
            ProjectionArg::Smallest => ProjectionPolicy::Smallest,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StartArg {
    Positive,
    Negative,
}

fn parse_rule(s: &str) -> std::result::Result<RuleKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = RuleKind::ALL.iter().map(|r| r.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|_| "expected one of oracle, symmetry, spectral, all".to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let precision = match cli.precision {
        PrecisionArg::Rounded => Precision::Rounded,
        PrecisionArg::Full => Precision::Full,
    };
    match dispatch(cli.command, precision, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(command: Command, p: Precision, out: &mut dyn Write) -> Result<i32> {
    let num = |x: f64| round_num(x, p);
    let thr = |x: f64| round_threshold(x, p);
    match command {
        Command::Thresholds { rule, k, l } => {
            let r = threshold_alpha(&RuleSpec::new(rule, l)?, k)?;
            let alpha = if r.degenerate { Value::Null } else { json!(thr(r.alpha)) };
            let v = json!({
                "rule": r.rule.name(),
                "k": r.k,
                "l": r.ell,
                "p0": num(r.frequencies[0]),
                "p1": num(r.frequencies[1]),
                "p2": num(r.frequencies[2]),
                "q": num(r.q),
                "alpha": alpha,
                "first_moment": thr(r.first_moment),
                "beats_first_moment": r.beats_bound,
                "degenerate": r.degenerate,
            });
            write_json(&v, out)?;
        }
        Command::Table { k_min, k_max, l_min, l_max } => {
            if k_min < 2 || k_min > k_max || l_min < 2 || l_min > l_max {
                return Err(crate::error::invalid("need 2 <= k-min <= k-max and 2 <= l-min <= l-max"));
            }
            let rows = comparison_table(k_min..=k_max, l_min..=l_max)?;
            let opt = |x: Option<f64>| x.map_or(Cell::Missing, Cell::Threshold);
            let cells: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.k as i64),
                        Cell::Int(r.ell as i64),
                        Cell::Threshold(r.first_moment),
                        Cell::Threshold(r.alpha_perkins),
                        opt(r.alpha_middle_heavy),
                        opt(r.alpha_hybrid_formula),
                        opt(r.alpha_hybrid_printed),
                        Cell::Threshold(r.alpha_max_positives),
                        Cell::Text(if r.hybrid_discrepancy { HYBRID_FOOTNOTE.into() } else { String::new() }),
                    ]
                })
                .collect();
            let header = [
                "k",
                "l",
                "first_moment",
                "alpha_per",
                "alpha_sym",
                "alpha_hyb_unbiased",
                "alpha_hyb_unbiased_printed",
                "alpha_hyb_biased",
                "footnote",
            ];
            write_csv(&header, &cells, p, out)?;
        }
        Command::Simulate { process, alpha, reach } => {
            let mut cfg = process.config(50)?.with_alpha(alpha);
            cfg.validate()?;
            cfg.track_reach = reach;
            let trials = run_trials(&cfg)?;
            let s = summarize(&trials);
            let v = json!({
                "config": {
                    "rule": cfg.rule.kind().name(), "k": cfg.k, "l": cfg.rule.ell(), "n": cfg.n,
                    "alpha": num(cfg.alpha), "m": cfg.m(), "trials": cfg.trials, "seed": cfg.seed,
                    "projection": cfg.projection,
                },
                "trials": trials,
                "summary": {
                    "certified_sat": s.successes,
                    "trials": s.trials,
                    "sat_fraction": num(s.estimate),
                    "ci_lo": num(s.ci_lo),
                    "ci_hi": num(s.ci_hi),
                    "witnesses_verified": trials.iter().filter(|t| t.witness_verified).count(),
                },
            });
            write_json(&v, out)?;
        }
        Command::Sweep { process, alpha_from, alpha_to, steps } => {
            let rows = sweep_alpha(&process.config(50)?, alpha_from, alpha_to, steps)?;
            let cells: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![Cell::Num(r.alpha), Cell::Num(r.sat_fraction), Cell::Num(r.ci_lo), Cell::Num(r.ci_hi), Cell::Int(r.trials as i64)]
                })
                .collect();
            write_csv(&["alpha", "sat_fraction", "ci_lo", "ci_hi", "trials"], &cells, p, out)?;
        }
        Command::FindThreshold { process, alpha_lo, alpha_hi, tol } => {
            let cfg = process.config(DEFAULT_PROBE_TRIALS)?;
            let e = empirical_threshold(&cfg, alpha_lo, alpha_hi, tol)?;
            let certified = threshold_alpha(&cfg.rule, cfg.k).ok().filter(|r| !r.degenerate).map(|r| thr(r.alpha));
            let probes: Vec<Value> = e.probes.iter().map(|&(a, f)| json!({"alpha": num(a), "sat_fraction": num(f)})).collect();
            let v = json!({
                "rule": cfg.rule.kind().name(), "k": cfg.k, "l": cfg.rule.ell(), "n": cfg.n, "seed": cfg.seed,
                "alpha": thr(e.alpha),
                "bracket": [thr(e.lo), thr(e.hi)],
                "iterations": e.iterations,
                "trials_per_probe": e.trials_per_probe,
                "certified_alpha": certified,
                "probes": probes,
            });
            write_json(&v, out)?;
        }
        Command::GwTail { rho, runs, l_max, seed, start, cap } => {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::Supercritical(rho));
            }
            let mut cfg = GwConfig::new(symmetric_matrix(rho)?, runs, seed);
            cfg.start = match start {
                StartArg::Positive => StartType::Positive,
                StartArg::Negative => StartType::Negative,
            };
            cfg.cap = cap;
            let curve = tail_curve(&cfg, l_max)?;
            let cells: Vec<Vec<Cell>> = curve
                .iter()
                .map(|t| vec![Cell::Int(t.l as i64), Cell::Num(t.empirical_sf), Cell::Num(t.bound), Cell::Num(t.stderr)])
                .collect();
            write_csv(&["L", "empirical_sf", "bound", "stderr"], &cells, p, out)?;
        }
        Command::Validate { suite } => {
            let checks = run_suite(suite);
            let cells: Vec<Vec<Cell>> = checks
                .iter()
                .map(|c| {
                    vec![
                        Cell::Text(c.suite.into()),
                        Cell::Text(c.name.into()),
                        Cell::Int(c.cases as i64),
                        Cell::Int(c.failures as i64),
                        Cell::Text(if c.passed() { "pass" } else { "fail" }.into()),
                    ]
                })
                .collect();
            write_csv(&["suite", "check", "cases", "failures", "status"], &cells, p, out)?;
            if checks.iter().any(|c| !c.passed()) {
                return Ok(EXIT_VALIDATION);
            }
        }
        Command::ExportDimacs { out: path, projected, rule, k, l, n, alpha, seed, trial, projection } => {
            let mut cfg = ExperimentConfig::new(RuleSpec::new(rule, l)?, k, n, alpha, 1, seed);
            cfg.projection = projection.into();
            let f = generate_formula(&cfg, trial)?;
            let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            if projected {
                export_dimacs(&f.projected, n, &mut file)?;
            } else {
                export_dimacs(&f.clauses, n, &mut file)?;
            }
            file.flush()?;
        }
    }
    Ok(EXIT_OK)
}
