//! Closed-form engine: projected type frequencies per rule, the certificate
//! parameter `Q = p1 + 2 sqrt(p0 p2)`, thresholds `alpha = 1 / Q`, the
//! branching mean matrix and its spectral data.
//!
//! Every frequency is evaluated over exact rationals; floating point enters
//! only at the square root in `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::clause::{class_masses, pow, to_f64};
use crate::error::{invalid, Error, Result};
use crate::rules::{RuleKind, RuleSpec};

/// Probabilities `(p0, p1, p2)` that the selected clause projects to a
/// `--`, `+-` or `++` 2-clause.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeFrequencies {
    p: [f64; 3],
    exact: Option<[BigRational; 3]>,
    source: Option<(RuleSpec, usize)>,
}

impl TypeFrequencies {
    /// Frequencies not tied to a rule; must sum to one within `1e-12`.
    pub fn from_probabilities(p0: f64, p1: f64, p2: f64) -> Result<Self> {
        let p = [p0, p1, p2];
        if p.iter().any(|x| !(0.0..=1.0).contains(x)) || ((p0 + p1 + p2) - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("({p0}, {p1}, {p2}) is not a probability vector")));
        }
        Ok(Self { p, exact: None, source: None })
    }

    fn from_exact(exact: [BigRational; 3], rule: RuleSpec, k: usize) -> Self {
        let p = [to_f64(&exact[0]), to_f64(&exact[1]), to_f64(&exact[2])];
        Self { p, exact: Some(exact), source: Some((rule, k)) }
    }

    pub fn p0(&self) -> f64 {
        self.p[0]
    }

    pub fn p1(&self) -> f64 {
        self.p[1]
    }

    pub fn p2(&self) -> f64 {
        self.p[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.p
    }

    pub fn exact(&self) -> Option<&[BigRational; 3]> {
        self.exact.as_ref()
    }

    /// Rule and clause width the frequencies were derived for.
    pub fn source(&self) -> Option<(RuleSpec, usize)> {
        self.source
    }

    /// `p0` and `p2` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            p: [self.p[2], self.p[1], self.p[0]],
            exact: self.exact.clone().map(|[a, b, c]| [c, b, a]),
            source: self.source,
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn half() -> BigRational {
    rat(1, 2)
}

/// Exact selected-type frequencies of `rule` on uniform `k`-clauses.
///
/// With `u = 2^-k`:
/// - middle-heavy: `p0 = s_as^l / 2`, `p1 = (beta^l - s_as^l) / 2`, `p2 = 1 - beta^l / 2`
/// - hybrid (coin averaged), `r = 1 / (2(k + 1))`:
///   `p0 = beta^l / 2 * (1 - (1 - r)^l + r^l)`, `p1 = beta^l / 2 * ((1 - r)^l - r^l)`,
///   `p2 = 1 - beta^l / 2`
/// - max-pos: `p0 = u^l`, `p1 = ((k + 1) u)^l - u^l`, `p2 = 1 - ((k + 1) u)^l`
/// - min-pos: `p0 = 1 - (1 - u)^l`, `p1 = (1 - u)^l - (1 - (k + 1) u)^l`, `p2 = (1 - (k + 1) u)^l`
/// - perkins, `q = (k + 1) u`: `p0 = q^(l-1) u`, `p1 = q^(l-1) k u`, `p2 = 1 - q^l`
/// - uniform: `p0 = u`, `p1 = k u`, `p2 = 1 - (k + 1) u`
///
/// Middle-heavy and hybrid need `k >= 3`: at `k = 2` the EDGE class is
/// `X = 1` alone and the per-class projection split no longer holds.
pub fn frequencies(rule: &RuleSpec, k: usize) -> Result<TypeFrequencies> {
    if k < 2 {
        return Err(invalid(format!("k = {k}, need k >= 2")));
    }
    let ell = rule.ell();
    let one = BigRational::one();
    let u = BigRational::new(BigInt::one(), BigInt::one() << k);
    let kk = BigRational::from_integer(BigInt::from(k));
    let not_mid_or_low = &u * BigRational::from_integer(BigInt::from(k + 1));

    let exact = match rule.kind() {
        RuleKind::MiddleHeavy | RuleKind::Hybrid if k < 3 => {
            return Err(invalid(format!("rule {} is not defined for k = {k}", rule.kind())));
        }
        RuleKind::MiddleHeavy => {
            let masses = class_masses(k)?;
            let as_l = pow(&masses.s_as, ell);
            let beta_l = pow(&masses.beta(), ell);
            [&as_l * half(), (&beta_l - &as_l) * half(), &one - &beta_l * half()]
        }
        RuleKind::Hybrid => {
            let masses = class_masses(k)?;
            let beta_l = pow(&masses.beta(), ell);
            let r = rat(1, 2 * (k as i64 + 1));
            let r_l = pow(&r, ell);
            let not_zero_l = pow(&(&one - &r), ell);
            let w = &beta_l * half();
            [
                &w * (&one - &not_zero_l + &r_l),
                &w * (&not_zero_l - &r_l),
                &one - &w,
            ]
        }
        RuleKind::MaxPositives => {
            let u_l = pow(&u, ell);
            let low_l = pow(&not_mid_or_low, ell);
            [u_l.clone(), &low_l - &u_l, &one - &low_l]
        }
        RuleKind::MinPositives => {
            let no_zero_l = pow(&(&one - &u), ell);
            let all_two_l = pow(&(&one - &not_mid_or_low), ell);
            [&one - &no_zero_l, &no_zero_l - &all_two_l, all_two_l]
        }
        RuleKind::Perkins => {
            let q = not_mid_or_low.clone();
            let head = pow(&q, ell - 1);
            [&head * &u, &head * &kk * &u, &one - pow(&q, ell)]
        }
        RuleKind::Uniform => [u.clone(), &kk * &u, &one - &not_mid_or_low],
    };
    Ok(TypeFrequencies::from_exact(exact, *rule, k))
}

/// Min-positives frequencies obtained by exchanging `p0` and `p2` of
/// max-positives. This is *not* the law of the min-positives rule under the
/// positive-biased projection (see [`frequencies`] for that); it is the
/// symmetric counterpart used when conditioning the hybrid coin, and it has
/// the same `Q` as max-positives.
pub fn swapped_max_positives(k: usize, ell: usize) -> Result<TypeFrequencies> {
    Ok(frequencies(&RuleSpec::new(RuleKind::MaxPositives, ell)?, k)?.swapped())
}

/// `Q = p1 + 2 sqrt(p0 p2)`.
pub fn q_parameter(f: &TypeFrequencies) -> f64 {
    let product = match &f.exact {
        Some([p0, _, p2]) => to_f64(&(p0 * p2)),
        None => f.p[0] * f.p[2],
    };
    f.p[1] + 2.0 * product.sqrt()
}

/// `2^k ln 2`.
pub fn first_moment_bound(k: usize) -> f64 {
    2f64.powi(k as i32) * std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub rule: RuleKind,
    pub k: usize,
    pub ell: usize,
    pub frequencies: [f64; 3],
    pub q: f64,
    /// `1 / Q`; infinite when `Q = 0`.
    pub alpha: f64,
    pub first_moment: f64,
    pub beats_bound: bool,
    /// `Q = 0`: no finite certified density.
    pub degenerate: bool,
}

pub fn threshold_alpha(rule: &RuleSpec, k: usize) -> Result<ThresholdReport> {
    let f = frequencies(rule, k)?;
    let q = q_parameter(&f);
    let degenerate = q == 0.0;
    let alpha = if degenerate { f64::INFINITY } else { 1.0 / q };
    let first_moment = first_moment_bound(k);
    Ok(ThresholdReport {
        rule: rule.kind(),
        k,
        ell: rule.ell(),
        frequencies: f.as_array(),
        q,
        alpha,
        first_moment,
        beats_bound: alpha > first_moment,
        degenerate,
    })
}

/// Smallest `ell` in `2..=ell_max` whose certified density exceeds `2^k ln 2`.
pub fn minimal_choices(kind: RuleKind, k: usize, ell_max: usize) -> Result<Option<usize>> {
    if matches!(kind, RuleKind::MiddleHeavy | RuleKind::Hybrid) && k < 4 {
        return Err(invalid(format!("minimal choices for {kind} need k >= 4, got {k}")));
    }
    for ell in 2..=ell_max {
        if threshold_alpha(&RuleSpec::new(kind, ell)?, k)?.beats_bound {
            return Ok(Some(ell));
        }
    }
    Ok(None)
}

/// Two-type offspring mean matrix. Row `i` holds the expected children of a
/// type-`i` literal (index 0 positive, 1 negative):
/// `M(alpha) = alpha [[p1, 2 p0], [2 p2, p1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMatrix {
    alpha: f64,
    entries: [[f64; 2]; 2],
    frequencies: Option<[f64; 3]>,
}

impl MeanMatrix {
    /// An arbitrary nonnegative mean matrix, not tied to type frequencies.
    pub fn from_entries(entries: [[f64; 2]; 2]) -> Result<Self> {
        if entries.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid("mean matrix entries must be finite and nonnegative"));
        }
        Ok(Self { alpha: f64::NAN, entries, frequencies: None })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn frequencies(&self) -> Option<[f64; 3]> {
        self.frequencies
    }

    /// Largest eigenvalue modulus, from the trace and determinant.
    pub fn spectral_radius(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        let tr = a + d;
        let disc = (a - d) * (a - d) + 4.0 * b * c;
        if disc >= 0.0 {
            let s = disc.sqrt();
            ((tr + s) / 2.0).abs().max(((tr - s) / 2.0).abs())
        } else {
            (a * d - b * c).abs().sqrt()
        }
    }
}

pub fn mean_matrix(alpha: f64, f: &TypeFrequencies) -> Result<MeanMatrix> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha = {alpha}, need a finite alpha >= 0")));
    }
    let [p0, p1, p2] = f.p;
    Ok(MeanMatrix {
        alpha,
        entries: [[alpha * p1, 2.0 * alpha * p0], [2.0 * alpha * p2, alpha * p1]],
        frequencies: Some(f.p),
    })
}

/// Eigen decomposition of `M(alpha)` when `p0 p2 > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralData {
    pub rho1: f64,
    pub rho2: f64,
    /// `(sqrt p0, sqrt p2)`.
    pub v1: [f64; 2],
    /// `(sqrt p0, -sqrt p2)`.
    pub v2: [f64; 2],
    /// Coordinates of the all-ones vector in the `(v1, v2)` basis.
    pub c1: f64,
    pub c2: f64,
    /// `2 (p0 + p2) / sqrt(p0 p2)`, so that `1' M^t 1 <= c_m rho1^t`.
    pub c_m: f64,
}

impl SpectralData {
    /// `1' M^t 1 = (1 + h) rho1^t + (1 - h) rho2^t` with `h = (p0 + p2) / (2 sqrt(p0 p2))`.
    pub fn ones_power(&self, t: u32) -> f64 {
        let h = self.c_m / 4.0;
        (1.0 + h) * self.rho1.powi(t as i32) + (1.0 - h) * self.rho2.powi(t as i32)
    }
}

pub fn spectral_data(m: &MeanMatrix) -> Result<SpectralData> {
    let [p0, p1, p2] = m
        .frequencies
        .ok_or_else(|| invalid("spectral data needs a matrix built from type frequencies"))?;
    if p0 * p2 == 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let alpha = m.alpha;
    let root = (p0 * p2).sqrt();
    let (s0, s2) = (p0.sqrt(), p2.sqrt());
    Ok(SpectralData {
        rho1: alpha * (p1 + 2.0 * root),
        rho2: alpha * (p1 - 2.0 * root),
        v1: [s0, s2],
        v2: [s0, -s2],
        c1: (s2 + s0) / (2.0 * root),
        c2: (s2 - s0) / (2.0 * root),
        c_m: 2.0 * (p0 + p2) / root,
    })
}

/// Exponential tail constants for subcritical total progeny:
/// `P(T >= L) <= zeta exp(-delta L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailConstants {
    pub rho: f64,
    /// `-ln((1 + rho) / 2)`.
    pub delta: f64,
    /// `2 / (1 - rho)`.
    pub zeta: f64,
}

impl TailConstants {
    pub fn bound(&self, l: f64) -> f64 {
        self.zeta * (-self.delta * l).exp()
    }
}

pub fn tail_constants(rho: f64) -> Result<TailConstants> {
    if rho.is_nan() || rho < 0.0 {
        return Err(invalid(format!("rho = {rho}, need rho >= 0")));
    }
    if rho >= 1.0 {
        return Err(Error::Supercritical(rho));
    }
    Ok(TailConstants { rho, delta: -((1.0 + rho) / 2.0).ln(), zeta: 2.0 / (1.0 - rho) })
}

/// A published comparison row, thresholds rounded to three decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub k: usize,
    pub ell: usize,
    pub first_moment: f64,
    pub perkins: f64,
    /// Absent for `k = 3`, where MID is empty.
    pub middle_heavy: Option<f64>,
    /// Printed coin-averaged hybrid value. Does not agree with the
    /// coin-averaged frequency formula; kept only for side-by-side output.
    pub hybrid_unbiased: f64,
    pub max_positives: f64,
}

const fn row(k: usize, ell: usize, fm: f64, per: f64, sym: Option<f64>, hyb: f64, max: f64) -> ReferenceRow {
    ReferenceRow { k, ell, first_moment: fm, perkins: per, middle_heavy: sym, hybrid_unbiased: hyb, max_positives: max }
}

pub const REFERENCE_ROWS: [ReferenceRow; 14] = [
    row(3, 2, 5.54518, 1.612, None, 1.513, 2.218),
    row(3, 3, 5.54518, 2.356, None, 1.784, 4.861),
    row(3, 4, 5.54518, 3.461, None, 1.916, 10.809),
    row(4, 3, 11.090, 5.610, Some(5.566), 6.618, 16.382),
    row(4, 4, 11.090, 10.575, Some(10.266), 11.935, 57.815),
    row(4, 5, 11.090, 19.554, Some(18.086), 20.166, 202.861),
    row(5, 3, 22.181, 13.973, Some(20.812), 26.854, 56.904),
    row(5, 4, 22.181, 33.651, Some(65.032), 84.530, 313.782),
    row(5, 5, 22.181, 79.231, Some(196.621), 246.762, 1733.282),
    row(6, 3, 44.361, 35.153, Some(76.861), 109.577, 192.000),
    row(6, 4, 44.361, 109.109, Some(396.089), 612.434, 1584.039),
    row(6, 5, 44.361, 332.877, Some(2022.085), 3210.578, 13040.107),
    row(7, 2, 88.723, 21.041, Some(33.669), 42.890, 51.441),
    row(7, 3, 88.723, 88.804, Some(267.706), 424.362, 615.550),
];

pub fn reference_row(k: usize, ell: usize) -> Option<&'static ReferenceRow> {
    REFERENCE_ROWS.iter().find(|r| r.k == k && r.ell == ell)
}

/// Tolerance used when matching computed thresholds against three-decimal values.
pub const REFERENCE_TOLERANCE: f64 = 0.005;

pub const HYBRID_FOOTNOTE: &str =
    "printed coin-averaged hybrid value disagrees with the coin-averaged frequency formula";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub k: usize,
    pub ell: usize,
    pub first_moment: f64,
    pub alpha_perkins: f64,
    /// `None` for `k <= 3`.
    pub alpha_middle_heavy: Option<f64>,
    pub alpha_hybrid_formula: Option<f64>,
    pub alpha_hybrid_printed: Option<f64>,
    pub alpha_max_positives: f64,
    /// Set when a printed hybrid value exists and differs from the formula.
    pub hybrid_discrepancy: bool,
}

/// Thresholds for every `(k, ell)` pair, `k` ascending then `ell` ascending.
pub fn comparison_table(
    k_range: std::ops::RangeInclusive<usize>,
    ell_range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for k in k_range {
        for ell in ell_range.clone() {
            let alpha = |kind| -> Result<f64> { Ok(threshold_alpha(&RuleSpec::new(kind, ell)?, k)?.alpha) };
            let hybrid = if k >= 3 { Some(alpha(RuleKind::Hybrid)?) } else { None };
            let printed = reference_row(k, ell).map(|r| r.hybrid_unbiased);
            let hybrid_discrepancy = match (hybrid, printed) {
                (Some(h), Some(p)) => (h - p).abs() > REFERENCE_TOLERANCE,
                _ => false,
            };
            rows.push(ComparisonRow {
                k,
                ell,
                first_moment: first_moment_bound(k),
                alpha_perkins: alpha(RuleKind::Perkins)?,
                alpha_middle_heavy: if k >= 4 { Some(alpha(RuleKind::MiddleHeavy)?) } else { None },
                alpha_hybrid_formula: hybrid,
                alpha_hybrid_printed: printed,
                alpha_max_positives: alpha(RuleKind::MaxPositives)?,
                hybrid_discrepancy,
            });
        }
    }
    Ok(rows)
}

/// Selected-class law of middle-heavy: `(P[MID], P[EDGE], P[AS]) =
/// (1 - beta^l, beta^l - s_as^l, s_as^l)`.
pub fn middle_heavy_class_law(k: usize, ell: usize) -> Result<[f64; 3]> {
    let m = class_masses(k)?;
    let beta_l = pow(&m.beta(), ell);
    let as_l = pow(&m.s_as, ell);
    Ok([to_f64(&(BigRational::one() - &beta_l)), to_f64(&(&beta_l - &as_l)), to_f64(&as_l)])
}

/// Exact frequencies present, nonnegative and summing to one.
pub fn exact_sum_is_one(f: &TypeFrequencies) -> bool {
    f.exact
        .as_ref()
        .is_some_and(|[a, b, c]| a + b + c == BigRational::one() && [a, b, c].iter().all(|x| **x >= BigRational::zero()))
}
