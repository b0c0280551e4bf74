//! Full Achlioptas processes: generate, project, certify, aggregate.

use rand::Rng;
use serde::Serialize;

use crate::clause::{sample_clause_unchecked, Clause};
use crate::error::{invalid, Result};
use crate::oracle::Assignment;
use crate::projection::{
    build_digraph, extract_assignment, max_reachable_set_size, project_with, strongly_connected_components,
    ProjectionPolicy, TwoClause,
};
use crate::rng::trial_rng;
use crate::rules::{init_run_state, select, RuleSpec, RunState};

/// Default number of trials per bisection probe.
pub const DEFAULT_PROBE_TRIALS: usize = 30;

/// 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959964;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k: usize,
    pub n: usize,
    pub rule: RuleSpec,
    /// Clause density; the process runs `m = floor(alpha n)` steps.
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    /// Also compute the largest reachable set of the implication digraph.
    pub track_reach: bool,
    pub projection: ProjectionPolicy,
}

impl ExperimentConfig {
    pub fn new(rule: RuleSpec, k: usize, n: usize, alpha: f64, trials: usize, seed: u64) -> Self {
        Self { k, n, rule, alpha, trials, seed, track_reach: false, projection: ProjectionPolicy::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.n < self.k {
            return Err(invalid(format!("need n >= k >= 2, got k = {}, n = {}", self.k, self.n)));
        }
        if self.n > u32::MAX as usize / 2 {
            return Err(invalid(format!("n = {} is too large", self.n)));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha = {}, need a finite alpha >= 0", self.alpha)));
        }
        Ok(())
    }

    /// `floor(alpha n)`, with a relative nudge so that decimal densities such
    /// as `2.55` at `n = 100` give 255 rather than 254.
    pub fn m(&self) -> usize {
        (self.alpha * self.n as f64 * (1.0 + 1e-12)).floor() as usize
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..self.clone() }
    }
}

/// The selected k-clauses and their projections for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub clauses: Vec<Clause>,
    pub projected: Vec<TwoClause>,
}

fn run_steps<R: Rng + ?Sized>(cfg: &ExperimentConfig, state: &RunState, steps: usize, rng: &mut R) -> Result<Formula> {
    let ell = cfg.rule.ell();
    let n = cfg.n as u32;
    let mut candidates: Vec<Clause> = Vec::with_capacity(ell);
    let mut clauses = Vec::with_capacity(steps);
    let mut projected = Vec::with_capacity(steps);
    for _ in 0..steps {
        candidates.clear();
        candidates.extend((0..ell).map(|_| sample_clause_unchecked(cfg.k, n, rng)));
        let chosen = select(&cfg.rule, state, &candidates)?.clause;
        projected.push(project_with(chosen, cfg.projection, rng));
        clauses.push(chosen.clone());
    }
    Ok(Formula { clauses, projected })
}

/// The formula built by trial `index`. A prefix of the steps at a larger
/// `alpha` reproduces the formula at a smaller one.
pub fn generate_formula(cfg: &ExperimentConfig, index: u64) -> Result<Formula> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, index);
    let state = init_run_state(&cfg.rule, &mut rng);
    run_steps(cfg, &state, cfg.m(), &mut rng)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub index: u64,
    pub m: usize,
    /// Projected 2-CNF satisfiable. `false` means the certificate failed,
    /// not that the k-CNF is unsatisfiable.
    pub certified_sat: bool,
    /// Selected projections of type `--`, `+-`, `++`.
    pub tally: [u64; 3],
    pub max_reach: Option<usize>,
    /// The extracted witness satisfies every original k-clause.
    pub witness_verified: bool,
}

pub fn tally(projected: &[TwoClause]) -> [u64; 3] {
    let mut t = [0u64; 3];
    for c in projected {
        t[c.pair_type().index()] += 1;
    }
    t
}

pub fn run_trial(cfg: &ExperimentConfig, index: u64) -> Result<TrialOutcome> {
    let f = generate_formula(cfg, index)?;
    let g = build_digraph(&f.projected, cfg.n)?;
    let scc = strongly_connected_components(&g);
    let witness: Option<Assignment> = extract_assignment(&g, &scc);
    let witness_verified = witness.as_ref().is_some_and(|w| w.satisfies_all(&f.clauses));
    Ok(TrialOutcome {
        index,
        m: f.clauses.len(),
        certified_sat: witness.is_some(),
        tally: tally(&f.projected),
        max_reach: cfg.track_reach.then(|| max_reachable_set_size(&g)),
        witness_verified,
    })
}

/// All trials `0..cfg.trials`, in index order.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let one = |i: usize| run_trial(cfg, i as u64);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..cfg.trials).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.trials).map(one).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Wilson score interval at 95%.
pub fn wilson(successes: usize, trials: usize) -> Estimate {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let mut ci_lo = (centre - half).max(0.0).min(p);
    let mut ci_hi = (centre + half).min(1.0).max(p);
    if successes == 0 {
        ci_lo = 0.0;
    }
    if successes == trials {
        ci_hi = 1.0;
    }
    Estimate { successes, trials, estimate: p, ci_lo, ci_hi }
}

pub fn summarize(outcomes: &[TrialOutcome]) -> Estimate {
    wilson(outcomes.iter().filter(|o| o.certified_sat).count(), outcomes.len())
}

pub fn estimate_sat_probability(cfg: &ExperimentConfig) -> Result<Estimate> {
    Ok(summarize(&run_trials(cfg)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub sat_fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: usize,
}

/// Uniform grid of `steps` densities, endpoints included. Trial `i` uses
/// the same stream at every density.
pub fn sweep_alpha(cfg: &ExperimentConfig, alpha_from: f64, alpha_to: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if !(alpha_from < alpha_to) || steps < 2 {
        return Err(invalid(format!(
            "need alpha_from < alpha_to and steps >= 2, got {alpha_from}, {alpha_to}, {steps}"
        )));
    }
    (0..steps)
        .map(|i| {
            let alpha = if i + 1 == steps {
                alpha_to
            } else {
                alpha_from + (alpha_to - alpha_from) * i as f64 / (steps - 1) as f64
            };
            let e = estimate_sat_probability(&cfg.with_alpha(alpha))?;
            Ok(SweepRow { alpha, sat_fraction: e.estimate, ci_lo: e.ci_lo, ci_hi: e.ci_hi, trials: e.trials })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    /// Midpoint of the final bracket.
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: u32,
    pub trials_per_probe: usize,
    /// `(alpha, certified-SAT fraction)` per probe, in probe order.
    pub probes: Vec<(f64, f64)>,
}

/// `ceil(log2((hi - lo) / tol))`, at least 0.
pub fn bisection_iterations(lo: f64, hi: f64, tol: f64) -> u32 {
    let r = (hi - lo) / tol;
    if r <= 1.0 {
        0
    } else {
        r.log2().ceil() as u32
    }
}

/// Bisection on the 0.5-crossing of the certified-SAT fraction, `cfg.trials`
/// trials per probe.
pub fn empirical_threshold(cfg: &ExperimentConfig, alpha_lo: f64, alpha_hi: f64, tol: f64) -> Result<ThresholdEstimate> {
    if !(alpha_lo < alpha_hi) || !(tol > 0.0) || alpha_lo < 0.0 || !alpha_hi.is_finite() {
        return Err(invalid(format!("bad bracket [{alpha_lo}, {alpha_hi}] or tolerance {tol}")));
    }
    let frac = |alpha: f64| estimate_sat_probability(&cfg.with_alpha(alpha)).map(|e| e.estimate);
    let mut probes = Vec::new();
    let f_lo = frac(alpha_lo)?;
    probes.push((alpha_lo, f_lo));
    let f_hi = frac(alpha_hi)?;
    probes.push((alpha_hi, f_hi));
    if f_lo < 0.5 || f_hi > 0.5 {
        return Err(invalid(format!(
            "bracket invalid: fraction {f_lo} at {alpha_lo} and {f_hi} at {alpha_hi}"
        )));
    }
    let iterations = bisection_iterations(alpha_lo, alpha_hi, tol);
    let (mut lo, mut hi) = (alpha_lo, alpha_hi);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let f = frac(mid)?;
        probes.push((mid, f));
        if f >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdEstimate { alpha: 0.5 * (lo + hi), lo, hi, iterations, trials_per_probe: cfg.trials, probes })
}

/// Selected-type tally over `steps` independent one-step runs, each with its
/// own run state, so that pooled counts are i.i.d. draws from the
/// coin-averaged law.
pub fn one_step_tally(rule: RuleSpec, k: usize, n: usize, steps: usize, seed: u64) -> Result<[u64; 3]> {
    let cfg = ExperimentConfig::new(rule, k, n, 0.0, 1, seed);
    cfg.validate()?;
    let mut rng = trial_rng(seed, 0);
    let mut t = [0u64; 3];
    for _ in 0..steps {
        let state = init_run_state(&rule, &mut rng);
        let f = run_steps(&cfg, &state, 1, &mut rng)?;
        t[f.projected[0].pair_type().index()] += 1;
    }
    Ok(t)
}
