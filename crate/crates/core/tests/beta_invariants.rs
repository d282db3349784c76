mod common;

use common::{dist, eps, oracle_beta_sequence, STANDARD_LABELS};
use elastic_pricing::{beta_sequence, gamma_limit, lemma_f, BetaTable, OrderSizeDistribution};
use proptest::prelude::*;

const RESIDUAL_TOL: f64 = 1e-10;

fn check_table(table: &BetaTable) {
    let e = table.epsilon();
    let values = table.values();
    for n in 1..=table.max_index() {
        let b = values[n - 1];
        assert!(b >= 0.0);
        let r = table.residual(n).unwrap();
        assert!(r.abs() <= RESIDUAL_TOL, "residual {r:e} at n = {n}");
        if n >= 2 {
            assert!(b + 1e-12 >= values[n - 2], "decrease at n = {n}");
        }
        let prev = if n >= 2 { values[n - 2] } else { 0.0 };
        let bound = e.markup_exponent() * b.powf(-e.inverse_excess());
        assert!(
            b - prev <= bound + RESIDUAL_TOL,
            "step bound violated at n = {n}"
        );
    }
}

#[test]
fn long_tables_are_monotone_and_solve_the_recursion() {
    for e in [1.25, 1.5, 2.0, 3.0] {
        for label in STANDARD_LABELS {
            check_table(&beta_sequence(eps(e), &dist(label), 20_000).unwrap());
        }
    }
}

#[test]
fn gamma_approaches_its_limit() {
    for e in [1.25, 1.5, 2.0, 3.0] {
        for label in STANDARD_LABELS {
            let q = dist(label);
            let table = beta_sequence(eps(e), &q, 20_000).unwrap();
            let limit = gamma_limit(eps(e), &q);
            let far = (table.gamma(20_000).unwrap() - limit).abs();
            let near = (table.gamma(2_000).unwrap() - limit).abs();
            assert!(far < 0.01, "eps {e} {label}: {far}");
            assert!(far < near, "eps {e} {label}: {far} !< {near}");
        }
    }
}

#[test]
fn single_size_step_bound_is_tight() {
    for e in [1.25, 2.0, 3.0] {
        let table = beta_sequence(eps(e), &dist("d1"), 2_000).unwrap();
        let v = table.values();
        for n in 2..=v.len() {
            let bound = eps(e).markup_exponent() * v[n - 1].powf(-eps(e).inverse_excess());
            assert!((v[n - 1] - v[n - 2] - bound).abs() <= RESIDUAL_TOL);
        }
    }
}

#[test]
fn matches_plain_bisection_oracle() {
    for e in [1.25, 1.6, 2.0] {
        for label in ["d1", "d2", "d3", "d4", "q1", "q2", "q3"] {
            let q = dist(label);
            let table = beta_sequence(eps(e), &q, 500).unwrap();
            let oracle = oracle_beta_sequence(e, q.probs(), 500);
            for (n, (a, b)) in table.values().iter().zip(&oracle).enumerate() {
                assert!(
                    (a - b).abs() <= 1e-9,
                    "eps {e} {label} n {}: {a} vs {b}",
                    n + 1
                );
            }
        }
    }
}

fn arb_distribution() -> impl Strategy<Value = OrderSizeDistribution> {
    prop::collection::vec(0.0f64..1.0, 1..6).prop_filter_map("needs mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| {
            let p: Vec<f64> = w.iter().map(|x| x / s).collect();
            let s: f64 = p.iter().sum();
            OrderSizeDistribution::new(p.iter().map(|x| x / s).collect()).ok()
        })?
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_tables_hold_invariants(e in 1.05f64..5.0, q in arb_distribution()) {
        let table = beta_sequence(eps(e), &q, 300).unwrap();
        check_table(&table);
        let oracle = oracle_beta_sequence(e, q.probs(), 300);
        for (a, b) in table.values().iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn lemma_f_decreases_towards_its_limit(
        e in 1.05f64..5.0,
        q in arb_distribution(),
        offset in 1e-3f64..1e3,
        ratio in 1.001f64..100.0,
    ) {
        let m = q.max_size() as f64;
        let n1 = m + offset;
        let n2 = n1 * ratio;
        let f1 = lemma_f(n1, &q, eps(e)).unwrap();
        let f2 = lemma_f(n2, &q, eps(e)).unwrap();
        let limit = q.mean() * eps(e).markup_exponent();
        prop_assert!(f2 < f1, "f({n2}) = {f2} !< f({n1}) = {f1}");
        prop_assert!(f2 > limit && f1 > limit);
    }
}
