//! Closed forms against exhaustive enumeration and nalgebra.

use achlioptas_core::analytics::{
    frequencies, mean_matrix, q_parameter, spectral_data, swapped_max_positives, threshold_alpha, TypeFrequencies,
};
use achlioptas_core::rules::{RuleKind, RuleSpec};
use nalgebra::{Matrix2, Vector2};
use proptest::prelude::*;

fn binom(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Selection written from the rule descriptions, on positive counts only.
fn choose(kind: RuleKind, coin_min: bool, xs: &[usize], k: usize) -> usize {
    let mid = |x: usize| x >= 2 && x <= k - 2;
    let class = |x: usize| if mid(x) { 2 } else if x == 1 || x == k - 1 { 1 } else { 0 };
    let argbest = |better: &dyn Fn(usize, usize) -> bool| {
        let mut b = 0;
        for i in 1..xs.len() {
            if better(xs[i], xs[b]) {
                b = i;
            }
        }
        b
    };
    match kind {
        RuleKind::MiddleHeavy => argbest(&|a, b| class(a) > class(b)),
        RuleKind::Hybrid => match xs.iter().position(|&x| mid(x)) {
            Some(i) => i,
            None if coin_min => argbest(&|a, b| a < b),
            None => argbest(&|a, b| a > b),
        },
        RuleKind::MaxPositives => argbest(&|a, b| a > b),
        RuleKind::MinPositives => argbest(&|a, b| a < b),
        RuleKind::Perkins => xs[..xs.len() - 1].iter().position(|&x| x >= 2).unwrap_or(xs.len() - 1),
        RuleKind::Uniform => 0,
    }
}

/// Exact law of the selected projected type by summing over all
/// `(k + 1)^ell` profiles.
fn enumerate(kind: RuleKind, k: usize, ell: usize) -> [f64; 3] {
    let px: Vec<f64> = (0..=k).map(|x| binom(k, x) / 2f64.powi(k as i32)).collect();
    let mut p = [0.0; 3];
    let coins: &[bool] = if kind == RuleKind::Hybrid { &[false, true] } else { &[false] };
    for &coin in coins {
        let w_coin = 1.0 / coins.len() as f64;
        for code in 0..(k + 1).pow(ell as u32) {
            let xs: Vec<usize> = (0..ell).map(|i| code / (k + 1).pow(i as u32) % (k + 1)).collect();
            let w: f64 = xs.iter().map(|&x| px[x]).product::<f64>() * w_coin;
            let x = xs[choose(kind, coin, &xs, k)];
            p[x.min(2)] += w;
        }
    }
    p
}

#[test]
fn closed_forms_match_enumeration() {
    for kind in RuleKind::ALL {
        for k in 3..=7 {
            for ell in 2..=4 {
                let f = frequencies(&RuleSpec::new(kind, ell).unwrap(), k).unwrap().as_array();
                let e = enumerate(kind, k, ell);
                for i in 0..3 {
                    assert!((f[i] - e[i]).abs() < 1e-12, "{kind} k={k} ell={ell}: {f:?} vs {e:?}");
                }
            }
        }
    }
}

#[test]
fn min_positives_differs_from_swapped_max() {
    // the swap has max-positives' Q but not min-positives' law
    let f = frequencies(&RuleSpec::new(RuleKind::MinPositives, 3).unwrap(), 4).unwrap();
    let s = swapped_max_positives(4, 3).unwrap();
    assert!((f.p0() - s.p0()).abs() > 0.01);
    let max = frequencies(&RuleSpec::new(RuleKind::MaxPositives, 3).unwrap(), 4).unwrap();
    assert!((q_parameter(&max) - q_parameter(&s)).abs() < 1e-15);
}

#[test]
fn thresholds_are_reciprocal_q() {
    for kind in RuleKind::ALL {
        let r = threshold_alpha(&RuleSpec::new(kind, 3).unwrap(), 5).unwrap();
        assert!((r.alpha * r.q - 1.0).abs() < 1e-14);
    }
}

fn triple() -> impl Strategy<Value = TypeFrequencies> {
    (0.001f64..1.0, 0.0f64..1.0, 0.001f64..1.0).prop_map(|(a, b, c)| {
        let s = a + b + c;
        TypeFrequencies::from_probabilities(a / s, b / s, 1.0 - a / s - b / s).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_data_matches_nalgebra(f in triple(), scale in 0.05f64..1.5) {
        let alpha = scale / q_parameter(&f);
        let m = mean_matrix(alpha, &f).unwrap();
        let e = m.entries();
        let na = Matrix2::new(e[0][0], e[0][1], e[1][0], e[1][1]);
        let sd = spectral_data(&m).unwrap();

        let ev = na.complex_eigenvalues();
        let mut re = [ev[0].re, ev[1].re];
        re.sort_by(|a, b| b.partial_cmp(a).unwrap());
        prop_assert!((re[0] - sd.rho1).abs() < 1e-12 * (1.0 + sd.rho1));
        prop_assert!((re[1] - sd.rho2).abs() < 1e-12 * (1.0 + sd.rho1));
        prop_assert!((m.spectral_radius() - alpha * q_parameter(&f)).abs() < 1e-12);

        for (v, rho) in [(sd.v1, sd.rho1), (sd.v2, sd.rho2)] {
            let v = Vector2::new(v[0], v[1]);
            prop_assert!((na * v - v * rho).norm() < 1e-12 * (1.0 + rho.abs()) * v.norm());
        }
        let ones = Vector2::new(1.0, 1.0);
        let recon = Vector2::new(sd.v1[0], sd.v1[1]) * sd.c1 + Vector2::new(sd.v2[0], sd.v2[1]) * sd.c2;
        prop_assert!((recon - ones).norm() < 1e-9);

        let mut power = Matrix2::identity();
        for t in 0..=40u32 {
            let direct = ones.dot(&(power * ones));
            prop_assert!((sd.ones_power(t) - direct).abs() <= 1e-10 * direct.abs());
            prop_assert!(direct <= sd.c_m * sd.rho1.powi(t as i32) * (1.0 + 1e-12));
            power *= na;
        }
    }
}
