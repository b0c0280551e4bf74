//! Self-checks behind `validate --suite ...`.

use rand::Rng;
use serde::Serialize;

use crate::analytics::{
    exact_sum_is_one, frequencies, mean_matrix, q_parameter, spectral_data, swapped_max_positives, tail_constants,
    TypeFrequencies,
};
use crate::clause::sample_clause_unchecked;
use crate::error::{invalid, Error, Result};
use crate::oracle::{brute_force_2sat, brute_force_ksat, verify_projection_soundness, Assignment};
use crate::projection::{
    build_digraph, extract_assignment, project_smallest, random_two_cnf, strongly_connected_components,
};
use crate::rng::seeded;
use crate::rules::{flip_all_signs, select, RuleKind, RuleSpec, RunState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Oracle,
    Symmetry,
    Spectral,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Suite::Oracle),
            "symmetry" => Ok(Suite::Symmetry),
            "spectral" => Ok(Suite::Spectral),
            "all" => Ok(Suite::All),
            _ => Err(invalid(format!("unknown suite `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const SEED: u64 = 0x5eed;

pub fn run_suite(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Oracle => oracle_checks(),
        Suite::Symmetry => symmetry_checks(),
        Suite::Spectral => spectral_checks(),
        Suite::All => [oracle_checks(), symmetry_checks(), spectral_checks()].concat(),
    }
}

fn count(cases: usize, mut fails: impl FnMut(usize) -> bool) -> usize {
    (0..cases).filter(|&i| fails(i)).count()
}

fn oracle_checks() -> Vec<Check> {
    let mut rng = seeded(SEED);
    let scc_vs_brute = count(1000, |_| {
        let n = rng.random_range(2..=10);
        let m = rng.random_range(0..=40);
        let f = random_two_cnf(n, m, &mut rng);
        let g = build_digraph(&f, n).expect("valid formula");
        let witness = extract_assignment(&g, &strongly_connected_components(&g));
        let brute = brute_force_2sat(&f, n).expect("small n").is_some();
        witness.is_some() != brute || witness.is_some_and(|w| !w.satisfies_all_two(&f))
    });

    let mut rng = seeded(SEED + 1);
    let soundness = count(10_000, |_| {
        let k = rng.random_range(3..=5);
        let n = rng.random_range(k..=12) as u32;
        let m = rng.random_range(1..=20);
        let ks: Vec<_> = (0..m).map(|_| sample_clause_unchecked(k, n, &mut rng)).collect();
        let twos: Vec<_> = ks.iter().map(project_smallest).collect();
        let a = Assignment::new((0..n).map(|_| rng.random()).collect());
        !verify_projection_soundness(&ks, &twos, &a).expect("equal lengths")
    });

    let mut rng = seeded(SEED + 2);
    let one_sided = count(300, |_| {
        let k = rng.random_range(3..=4);
        let n = rng.random_range(k..=10) as u32;
        let m = rng.random_range(1..=30);
        let ks: Vec<_> = (0..m).map(|_| sample_clause_unchecked(k, n, &mut rng)).collect();
        let twos: Vec<_> = ks.iter().map(project_smallest).collect();
        let two_sat = brute_force_2sat(&twos, n as usize).expect("small n").is_some();
        two_sat && brute_force_ksat(&ks, n as usize).expect("small n").is_none()
    });

    vec![
        Check { suite: "oracle", name: "scc-matches-exhaustive-2sat", cases: 1000, failures: scc_vs_brute },
        Check { suite: "oracle", name: "projection-soundness", cases: 10_000, failures: soundness },
        Check { suite: "oracle", name: "projected-sat-implies-ksat", cases: 300, failures: one_sided },
    ]
}

fn symmetry_checks() -> Vec<Check> {
    let mut rng = seeded(SEED + 3);
    let mut flip_cases = 0;
    let flip_failures = count(2000, |_| {
        let k = rng.random_range(3..=7);
        let ell = rng.random_range(2..=6);
        let cands: Vec<_> = (0..ell).map(|_| sample_clause_unchecked(k, 20, &mut rng)).collect();
        let flipped = flip_all_signs(&cands);
        let pick = |kind, state: RunState, c: &[_]| select(&RuleSpec::new(kind, ell).unwrap(), &state, c).unwrap().index;
        let none = RunState::default();
        flip_cases += 1;
        pick(RuleKind::MiddleHeavy, none, &cands) != pick(RuleKind::MiddleHeavy, none, &flipped)
            || pick(RuleKind::MaxPositives, none, &cands) != pick(RuleKind::MinPositives, none, &flipped)
            || pick(RuleKind::Hybrid, RunState::with_coin(false), &cands)
                != pick(RuleKind::Hybrid, RunState::with_coin(true), &flipped)
    });

    let mut q_cases = 0;
    let mut q_failures = 0;
    let mut sum_failures = 0;
    for k in 3..=12 {
        for ell in 2..=8 {
            q_cases += 1;
            let max = frequencies(&RuleSpec::new(RuleKind::MaxPositives, ell).unwrap(), k).unwrap();
            let swapped = swapped_max_positives(k, ell).unwrap();
            if (q_parameter(&max) - q_parameter(&swapped)).abs() > 1e-15 {
                q_failures += 1;
            }
            for kind in RuleKind::ALL {
                if !exact_sum_is_one(&frequencies(&RuleSpec::new(kind, ell).unwrap(), k).unwrap()) {
                    sum_failures += 1;
                }
            }
        }
    }

    vec![
        Check { suite: "symmetry", name: "sign-flip-selection", cases: flip_cases, failures: flip_failures },
        Check { suite: "symmetry", name: "q-invariant-under-p0-p2-swap", cases: q_cases, failures: q_failures },
        Check { suite: "symmetry", name: "frequencies-sum-to-one", cases: q_cases * 6, failures: sum_failures },
    ]
}

fn mat_vec(m: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn spectral_checks() -> Vec<Check> {
    let mut rng = seeded(SEED + 4);
    let (mut eigen, mut closed, mut bound) = (0, 0, 0);
    for _ in 0..100 {
        let mut w: [f64; 3] = [rng.random_range(0.01..1.0), rng.random_range(0.0..1.0), rng.random_range(0.01..1.0)];
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let f = TypeFrequencies::from_probabilities(w[0], w[1], 1.0 - w[0] - w[1]).expect("normalised");
        let alpha = rng.random_range(0.1..1.5) / q_parameter(&f);
        let m = mean_matrix(alpha, &f).expect("alpha > 0");
        let sd = spectral_data(&m).expect("p0 p2 > 0");
        let e = m.entries();
        for (v, rho) in [(sd.v1, sd.rho1), (sd.v2, sd.rho2)] {
            let mv = mat_vec(e, v);
            if (0..2).any(|i| (mv[i] - rho * v[i]).abs() > 1e-12 * (1.0 + rho.abs())) {
                eigen += 1;
            }
        }
        let mut u = [1.0, 1.0];
        for t in 0..=40u32 {
            let direct = u[0] + u[1];
            if rel_err(sd.ones_power(t), direct) > 1e-10 {
                closed += 1;
            }
            if direct > sd.c_m * sd.rho1.powi(t as i32) * (1.0 + 1e-12) {
                bound += 1;
            }
            u = mat_vec(e, u);
        }
    }

    let mut tail_failures = 0;
    let mut prev = tail_constants(0.0).expect("subcritical");
    for i in 1..1000 {
        let t = tail_constants(i as f64 / 1000.0).expect("subcritical");
        if !(t.delta > 0.0 && t.delta < prev.delta && t.zeta > prev.zeta) {
            tail_failures += 1;
        }
        prev = t;
    }

    vec![
        Check { suite: "spectral", name: "eigenpairs", cases: 200, failures: eigen },
        Check { suite: "spectral", name: "closed-form-ones-power", cases: 4100, failures: closed },
        Check { suite: "spectral", name: "ones-power-below-c-m-rho-t", cases: 4100, failures: bound },
        Check { suite: "spectral", name: "tail-constant-monotonicity", cases: 999, failures: tail_failures },
    ]
}
