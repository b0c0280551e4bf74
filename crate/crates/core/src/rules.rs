//! Per-step selection of one clause out of `ell` candidates.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clause::{classify_unchecked, positive_count, Clause};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    /// MID first, then EDGE, then AS; lowest index within a class.
    MiddleHeavy,
    /// MID first; otherwise max or min `X` according to a per-run coin.
    Hybrid,
    MaxPositives,
    MinPositives,
    /// First of the first `ell - 1` candidates with `X >= 2`, else the last one.
    Perkins,
    /// Always the first candidate.
    Uniform,
}

impl RuleKind {
    pub const ALL: [RuleKind; 6] = [
        RuleKind::MiddleHeavy,
        RuleKind::Hybrid,
        RuleKind::MaxPositives,
        RuleKind::MinPositives,
        RuleKind::Perkins,
        RuleKind::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::MiddleHeavy => "middle-heavy",
            RuleKind::Hybrid => "hybrid",
            RuleKind::MaxPositives => "max-pos",
            RuleKind::MinPositives => "min-pos",
            RuleKind::Perkins => "perkins",
            RuleKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| invalid(format!("unknown rule '{s}'")))
    }
}

/// A rule together with its number of candidates per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSpec {
    kind: RuleKind,
    ell: usize,
}

impl RuleSpec {
    pub fn new(kind: RuleKind, ell: usize) -> Result<Self> {
        let min = if kind == RuleKind::Uniform { 1 } else { 2 };
        if ell < min {
            return Err(invalid(format!("rule {kind} needs ell >= {min}, got {ell}")));
        }
        Ok(Self { kind, ell })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn ell(&self) -> usize {
        self.ell
    }
}

/// Per-run rule state. Only the hybrid rule carries anything: the coin `b`,
/// drawn once before the first step. `Some(false)` is `b = 0` (maximise `X`
/// on the fallback), `Some(true)` is `b = 1` (minimise `X`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunState {
    coin_b: Option<bool>,
}

impl RunState {
    pub fn coin_b(&self) -> Option<bool> {
        self.coin_b
    }

    /// State with a fixed hybrid coin, for conditioning on `b`.
    pub fn with_coin(coin_b: bool) -> Self {
        Self { coin_b: Some(coin_b) }
    }
}

pub fn init_run_state<R: Rng + ?Sized>(rule: &RuleSpec, rng: &mut R) -> RunState {
    match rule.kind {
        RuleKind::Hybrid => RunState { coin_b: Some(rng.random_bool(0.5)) },
        _ => RunState::default(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection<'a> {
    /// 1-based position among the candidates.
    pub index: usize,
    pub clause: &'a Clause,
}

pub fn select<'a>(rule: &RuleSpec, state: &RunState, candidates: &'a [Clause]) -> Result<Selection<'a>> {
    if candidates.len() != rule.ell {
        return Err(invalid(format!(
            "rule expects {} candidates, got {}",
            rule.ell,
            candidates.len()
        )));
    }
    let k = candidates[0].k();
    if candidates.iter().any(|c| c.k() != k) {
        return Err(invalid("candidates have different clause widths"));
    }
    let xs: Vec<usize> = candidates.iter().map(positive_count).collect();
    let pos = select_position(rule.kind, state, &xs, k)?;
    Ok(Selection { index: pos + 1, clause: &candidates[pos] })
}

/// Rule logic on the sign profiles alone. Returns a 0-based position.
pub(crate) fn select_position(kind: RuleKind, state: &RunState, xs: &[usize], k: usize) -> Result<usize> {
    let first_max_by = |key: &dyn Fn(usize) -> i64| {
        // strict comparison keeps the lowest index on ties
        let mut best = 0;
        for (i, &x) in xs.iter().enumerate().skip(1) {
            if key(x) > key(xs[best]) {
                best = i;
            }
        }
        best
    };
    let first_mid = || xs.iter().position(|&x| x >= 2 && x + 2 <= k);
    Ok(match kind {
        RuleKind::MiddleHeavy => first_max_by(&|x| classify_unchecked(x, k).priority() as i64),
        RuleKind::Hybrid => {
            let coin = state
                .coin_b
                .ok_or_else(|| invalid("hybrid rule needs a run state with its coin"))?;
            match first_mid() {
                Some(i) => i,
                None if coin => first_max_by(&|x| -(x as i64)),
                None => first_max_by(&|x| x as i64),
            }
        }
        RuleKind::MaxPositives => first_max_by(&|x| x as i64),
        RuleKind::MinPositives => first_max_by(&|x| -(x as i64)),
        RuleKind::Perkins => {
            let last = xs.len() - 1;
            xs[..last].iter().position(|&x| x >= 2).unwrap_or(last)
        }
        RuleKind::Uniform => 0,
    })
}

/// Negates every literal sign of every candidate; variables are unchanged.
pub fn flip_all_signs(candidates: &[Clause]) -> Vec<Clause> {
    candidates.iter().map(Clause::flipped).collect()
}
