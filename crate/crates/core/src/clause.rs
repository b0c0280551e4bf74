//! k-clauses over `n` variables, the uniform clause sampler and the
//! AS / EDGE / MID partition of sign profiles.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A k-clause in canonical form: strictly ascending 1-based variable
/// indices, with `signs[i] == true` meaning `vars[i]` appears positively.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    vars: Vec<u32>,
    signs: Vec<bool>,
}

impl Clause {
    /// Builds a clause over variables `1..=n`, checking the canonical form.
    pub fn new(vars: Vec<u32>, signs: Vec<bool>, n: u32) -> Result<Self> {
        if vars.len() != signs.len() {
            return Err(invalid(format!(
                "{} variables but {} signs",
                vars.len(),
                signs.len()
            )));
        }
        if vars.len() < 2 {
            return Err(invalid("a clause needs at least two literals"));
        }
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("clause variables must be strictly ascending"));
        }
        if vars[0] == 0 || *vars.last().unwrap() > n {
            return Err(invalid(format!("clause variables must lie in 1..={n}")));
        }
        Ok(Self { vars, signs })
    }

    pub(crate) fn from_parts_unchecked(vars: Vec<u32>, signs: Vec<bool>) -> Self {
        debug_assert_eq!(vars.len(), signs.len());
        Self { vars, signs }
    }

    pub fn k(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    /// `(variable, is_positive)` pairs in ascending variable order.
    pub fn literals(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.vars.iter().copied().zip(self.signs.iter().copied())
    }

    /// The same variables with every sign negated.
    pub fn flipped(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            signs: self.signs.iter().map(|s| !s).collect(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (v, s)) in self.literals().enumerate() {
            if i > 0 {
                write!(f, " v ")?;
            }
            if !s {
                write!(f, "!")?;
            }
            write!(f, "x{v}")?;
        }
        write!(f, ")")
    }
}

/// Draws a clause uniformly from the `2^k * C(n, k)` k-clauses over `n` variables.
///
/// The variable set comes from a partial Fisher-Yates shuffle of `1..=n`
/// (kept sparse: only displaced positions are stored), then sorted.
pub fn sample_clause<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<Clause> {
    if k < 2 {
        return Err(invalid(format!("k = {k}, need k >= 2")));
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    if n > u32::MAX as usize {
        return Err(invalid("n does not fit in 32 bits"));
    }
    Ok(sample_clause_unchecked(k, n as u32, rng))
}

pub(crate) fn sample_clause_unchecked<R: Rng + ?Sized>(k: usize, n: u32, rng: &mut R) -> Clause {
    // displaced[(pos, value)]: slot `pos` of the virtual array 0..n holds `value`
    let mut displaced: Vec<(u32, u32)> = Vec::with_capacity(k);
    let lookup = |d: &[(u32, u32)], pos: u32| {
        d.iter().find(|&&(p, _)| p == pos).map_or(pos, |&(_, v)| v)
    };
    let mut vars = Vec::with_capacity(k);
    for i in 0..k as u32 {
        let j = rng.random_range(i..n);
        let vj = lookup(&displaced, j);
        let vi = lookup(&displaced, i);
        vars.push(vj + 1);
        match displaced.iter_mut().find(|(p, _)| *p == j) {
            Some(slot) => slot.1 = vi,
            None => displaced.push((j, vi)),
        }
    }
    vars.sort_unstable();
    let signs = random_signs(k, rng);
    Clause::from_parts_unchecked(vars, signs)
}

fn random_signs<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<bool> {
    let mut signs = Vec::with_capacity(k);
    while signs.len() < k {
        let mut bits: u64 = rng.random();
        for _ in 0..(k - signs.len()).min(64) {
            signs.push(bits & 1 == 1);
            bits >>= 1;
        }
    }
    signs
}

/// Number of positive literals `X`.
pub fn positive_count(c: &Clause) -> usize {
    c.signs.iter().filter(|&&s| s).count()
}

/// Sign-profile class of a clause with `X` positives out of `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignClass {
    /// `X` in `{0, k}`.
    AllSame,
    /// `X` in `{1, k - 1}`.
    Edge,
    /// `2 <= X <= k - 2`.
    Mid,
}

impl SignClass {
    pub fn label(self) -> &'static str {
        match self {
            SignClass::AllSame => "AS",
            SignClass::Edge => "EDGE",
            SignClass::Mid => "MID",
        }
    }

    /// Priority rank: MID beats EDGE beats AS.
    pub(crate) fn priority(self) -> u8 {
        match self {
            SignClass::Mid => 2,
            SignClass::Edge => 1,
            SignClass::AllSame => 0,
        }
    }
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify(x: usize, k: usize) -> Result<SignClass> {
    if k < 2 {
        return Err(invalid(format!("k = {k}, need k >= 2")));
    }
    if x > k {
        return Err(invalid(format!("X = {x} exceeds k = {k}")));
    }
    Ok(classify_unchecked(x, k))
}

pub(crate) fn classify_unchecked(x: usize, k: usize) -> SignClass {
    if x == 0 || x == k {
        SignClass::AllSame
    } else if x == 1 || x == k - 1 {
        SignClass::Edge
    } else {
        SignClass::Mid
    }
}

/// Exact probability masses of the three classes for a uniform k-clause.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMasses {
    pub k: usize,
    pub s_as: BigRational,
    pub s_edge: BigRational,
    pub s_mid: BigRational,
}

impl ClassMasses {
    /// `s_as + s_edge`, the chance that a single candidate is not MID.
    pub fn beta(&self) -> BigRational {
        &self.s_as + &self.s_edge
    }

    /// Chance that at least one of `ell` candidates is MID.
    pub fn a_ell(&self, ell: usize) -> BigRational {
        BigRational::one() - pow(&self.beta(), ell)
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [to_f64(&self.s_as), to_f64(&self.s_edge), to_f64(&self.s_mid)]
    }
}

/// Class masses under `X ~ Bin(k, 1/2)`.
///
/// Summed from the binomial pmf so that `k = 2` (where `X = 1` is both
/// `1` and `k - 1`) is handled; for `k >= 3` this equals
/// `s_as = 2^(1-k)`, `s_edge = k / 2^(k-1)`.
pub fn class_masses(k: usize) -> Result<ClassMasses> {
    if k < 2 {
        return Err(invalid(format!("k = {k}, need k >= 2")));
    }
    let denom = BigInt::one() << k;
    let mut counts = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
    let mut binom = BigInt::one();
    for x in 0..=k {
        let slot = match classify_unchecked(x, k) {
            SignClass::AllSame => 0,
            SignClass::Edge => 1,
            SignClass::Mid => 2,
        };
        counts[slot] += &binom;
        binom = binom * BigInt::from(k - x) / BigInt::from(x + 1);
    }
    let [a, e, m] = counts;
    Ok(ClassMasses {
        k,
        s_as: BigRational::new(a, denom.clone()),
        s_edge: BigRational::new(e, denom.clone()),
        s_mid: BigRational::new(m, denom),
    })
}

pub(crate) fn pow(base: &BigRational, exp: usize) -> BigRational {
    num_traits::pow(base.clone(), exp)
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
