//! Two-type Galton–Watson exploration with Poisson offspring.
//!
//! A type-`i` individual begets `Poisson(M[i][j])` children of type `j`.
//! A generation of `Z_i` type-`i` individuals therefore begets
//! `Poisson(Z_i M[i][j])` type-`j` children in total, which is what is sampled.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::analytics::{mean_matrix, tail_constants, MeanMatrix, TypeFrequencies};
use crate::error::{invalid, Error, Result};
use crate::rng::trial_rng;

/// Literal type of the root. Index 0 is positive, 1 negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartType {
    #[default]
    Positive,
    Negative,
}

impl StartType {
    pub fn index(self) -> usize {
        match self {
            StartType::Positive => 0,
            StartType::Negative => 1,
        }
    }
}

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GwConfig {
    pub matrix: MeanMatrix,
    pub start: StartType,
    pub runs: usize,
    pub cap: u64,
    pub seed: u64,
}

impl GwConfig {
    pub fn new(matrix: MeanMatrix, runs: usize, seed: u64) -> Self {
        Self { matrix, start: StartType::Positive, runs, cap: DEFAULT_CAP, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(invalid("progeny cap must be at least 1"));
        }
        if self.runs == 0 {
            return Err(invalid("run count must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GwOutcome {
    /// Total progeny including the root.
    pub total: u64,
    /// Index of the last non-empty generation; 0 when the root is childless.
    pub generations: u32,
    pub capped: bool,
}

fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("finite positive mean").sample(rng) as u64
}

/// One exploration from a single root of `cfg.start`.
pub fn simulate_gw<R: Rng + ?Sized>(cfg: &GwConfig, rng: &mut R) -> GwOutcome {
    let m = cfg.matrix.entries();
    let mut z = [0u64; 2];
    z[cfg.start.index()] = 1;
    let mut total = 1u64;
    let mut generations = 0u32;
    if total >= cfg.cap {
        return GwOutcome { total: cfg.cap, generations, capped: true };
    }
    loop {
        let mut next = [0u64; 2];
        for i in 0..2 {
            if z[i] == 0 {
                continue;
            }
            for j in 0..2 {
                next[j] += poisson(z[i] as f64 * m[i][j], rng);
            }
        }
        let born = next[0] + next[1];
        if born == 0 {
            return GwOutcome { total, generations, capped: false };
        }
        generations += 1;
        total += born;
        if total >= cfg.cap {
            return GwOutcome { total: cfg.cap, generations, capped: true };
        }
        z = next;
    }
}

/// `cfg.runs` explorations; run `i` draws from stream `(cfg.seed, i)`.
pub fn simulate_batch(cfg: &GwConfig) -> Result<Vec<GwOutcome>> {
    cfg.validate()?;
    let one = |i: usize| simulate_gw(cfg, &mut trial_rng(cfg.seed, i as u64));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..cfg.runs).into_par_iter().map(one).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..cfg.runs).map(one).collect())
    }
}

/// Start-type entry of `(I - M)^-1 1`, solving `t_i = 1 + sum_j M[i][j] t_j`.
pub fn expected_total_progeny(m: &MeanMatrix, start: StartType) -> Result<f64> {
    let rho = m.spectral_radius();
    if rho >= 1.0 {
        return Err(Error::Supercritical(rho));
    }
    let [[a, b], [c, d]] = m.entries();
    let (a, d) = (1.0 - a, 1.0 - d);
    let det = a * d - b * c;
    let t = [(d + b) / det, (a + c) / det];
    Ok(t[start.index()])
}

/// Mean matrix with frequencies `(1/4, 1/2, 1/4)` at `alpha = rho`, so that
/// every row sums to `rho` and `rho(M) = rho`.
pub fn symmetric_matrix(rho: f64) -> Result<MeanMatrix> {
    mean_matrix(rho, &TypeFrequencies::from_probabilities(0.25, 0.5, 0.25)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    #[serde(rename = "L")]
    pub l: u64,
    pub empirical_sf: f64,
    pub bound: f64,
    /// Binomial standard error of `empirical_sf`.
    pub stderr: f64,
}

/// Empirical `Pr[T >= L]` for `L = 1..=l_max` beside `zeta exp(-delta L)`.
pub fn tail_curve(cfg: &GwConfig, l_max: u64) -> Result<Vec<TailPoint>> {
    let tc = tail_constants(cfg.matrix.spectral_radius())?;
    let outcomes = simulate_batch(cfg)?;
    Ok(tail_from_runs(&outcomes, l_max, |l| tc.bound(l as f64)))
}

/// Survival curve of precomputed runs beside an arbitrary bound.
pub fn tail_from_runs(outcomes: &[GwOutcome], l_max: u64, bound: impl Fn(u64) -> f64) -> Vec<TailPoint> {
    let runs = outcomes.len() as f64;
    let mut hist = vec![0u64; l_max as usize + 2];
    for o in outcomes {
        hist[o.total.min(l_max + 1) as usize] += 1;
    }
    let mut at_least = outcomes.len() as u64;
    let mut points = Vec::with_capacity(l_max as usize);
    for l in 1..=l_max {
        at_least -= hist[l as usize - 1];
        let p = at_least as f64 / runs;
        points.push(TailPoint { l, empirical_sf: p, bound: bound(l), stderr: (p * (1.0 - p) / runs).sqrt() });
    }
    points
}
