//! Exhaustive ground truth for small instances.

use crate::clause::Clause;
use crate::error::{invalid, Error, Result};
use crate::projection::TwoClause;

/// Largest `n` the exhaustive search accepts.
pub const MAX_ORACLE_VARS: usize = 24;

/// Truth values for variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self(values)
    }

    pub fn all_false(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Bit `i` of `mask` is the value of variable `i + 1`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value of 1-based variable `var`.
    pub fn value(&self, var: u32) -> bool {
        self.0[var as usize - 1]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn satisfies_clause(&self, c: &Clause) -> bool {
        c.literals().any(|(v, s)| self.value(v) == s)
    }

    pub fn satisfies_two_clause(&self, c: &TwoClause) -> bool {
        c.literals().iter().any(|l| self.value(l.var()) == l.is_positive())
    }

    pub fn satisfies_all(&self, formula: &[Clause]) -> bool {
        formula.iter().all(|c| self.satisfies_clause(c))
    }

    pub fn satisfies_all_two(&self, formula: &[TwoClause]) -> bool {
        formula.iter().all(|c| self.satisfies_two_clause(c))
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_VARS {
        return Err(Error::ResourceLimit(format!(
            "exhaustive search over n = {n} variables (limit {MAX_ORACLE_VARS})"
        )));
    }
    Ok(())
}

fn first_mask(n: usize, ok: impl Fn(&Assignment) -> bool) -> Option<Assignment> {
    (0u64..1 << n).map(|m| Assignment::from_mask(m, n)).find(|a| ok(a))
}

/// First satisfying assignment in ascending bitmask order, if any.
pub fn brute_force_ksat(formula: &[Clause], n: usize) -> Result<Option<Assignment>> {
    check_size(n)?;
    Ok(first_mask(n, |a| a.satisfies_all(formula)))
}

pub fn brute_force_2sat(formula: &[TwoClause], n: usize) -> Result<Option<Assignment>> {
    check_size(n)?;
    Ok(first_mask(n, |a| a.satisfies_all_two(formula)))
}

/// Checks "`assignment` satisfies the projection implies it satisfies the
/// k-CNF" clause by clause. `two_formula[i]` must be the projection of
/// `k_formula[i]`.
pub fn verify_projection_soundness(
    k_formula: &[Clause],
    two_formula: &[TwoClause],
    assignment: &Assignment,
) -> Result<bool> {
    if k_formula.len() != two_formula.len() {
        return Err(invalid(format!(
            "{} k-clauses but {} projected clauses",
            k_formula.len(),
            two_formula.len()
        )));
    }
    for (kc, tc) in k_formula.iter().zip(two_formula) {
        if assignment.satisfies_two_clause(tc) && !assignment.satisfies_clause(kc) {
            return Ok(false);
        }
    }
    Ok(true)
}
