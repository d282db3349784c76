mod common;

use common::{dist, unit_policy};
use elastic_pricing::{
    estimate_revenue, next_sale_time, simulate_path, trial_rng, ArrivalRateSpec, MarketModel,
    PricePolicy, RatePiece,
};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

fn stepped_policy(e: f64, label: &str, n: usize) -> PricePolicy {
    let arrivals = ArrivalRateSpec::new(
        vec![
            RatePiece {
                start: 0.0,
                rate: 2.0,
            },
            RatePiece {
                start: 0.3,
                rate: 0.25,
            },
            RatePiece {
                start: 0.6,
                rate: 4.0,
            },
        ],
        1.0,
    )
    .unwrap();
    PricePolicy::new(MarketModel::new(e, arrivals, dist(label)).unwrap(), n).unwrap()
}

/// Arrivals in `[0, t_end]` with the inventory held at `n`.
fn pinned_count(policy: &PricePolicy, n: i64, t_end: f64, seed: u64, trial: u64) -> usize {
    let mut rng = trial_rng(seed, trial);
    let mut t = 0.0;
    let mut count = 0;
    loop {
        let u = 1.0 - rng.random::<f64>();
        t = next_sale_time(policy, n, t, u).unwrap().unwrap();
        if t > t_end {
            return count;
        }
        count += 1;
    }
}

fn poisson_goodness_of_fit(policy: &PricePolicy, n: i64, t_end: f64) {
    let e = policy.model().epsilon().value();
    let scale = policy.betas().beta(n).unwrap().powf(e / (e - 1.0));
    let arrivals = policy.model().arrivals();
    let mean = scale * (arrivals.total() / arrivals.cumulative(t_end).unwrap()).ln();

    let paths = 10_000u64;
    let counts: Vec<usize> = (0..paths)
        .map(|i| pinned_count(policy, n, t_end, 17, i))
        .collect();

    // bins 0..k-1 plus a tail bin, each with expected count at least 5
    let law = Poisson::new(mean).unwrap();
    let mut edges = Vec::new();
    let mut k = 0u64;
    while (paths as f64) * (1.0 - law.cdf(k)) >= 5.0 && (paths as f64) * law.pmf(k) >= 5.0 {
        edges.push(k);
        k += 1;
    }
    let bins = edges.len() + 1;
    let mut observed = vec![0.0; bins];
    for &c in &counts {
        observed[c.min(bins - 1)] += 1.0;
    }
    let mut expected: Vec<f64> = edges.iter().map(|&k| paths as f64 * law.pmf(k)).collect();
    expected.push(paths as f64 - expected.iter().sum::<f64>());

    let stat: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    let critical = ChiSquared::new((bins - 1) as f64)
        .unwrap()
        .inverse_cdf(0.99);
    assert!(
        stat < critical,
        "chi-square {stat:.3} >= {critical:.3} with {bins} bins, mean {mean:.4}"
    );
}

#[test]
fn pinned_arrival_counts_are_poisson_constant_rate() {
    poisson_goodness_of_fit(&unit_policy(2.0, dist("d1"), 1), 1, 0.9);
    poisson_goodness_of_fit(&unit_policy(1.25, dist("q2"), 8), 8, 0.99);
}

#[test]
fn pinned_arrival_counts_are_poisson_stepped_rate() {
    poisson_goodness_of_fit(&stepped_policy(1.6, "q1", 5), 5, 0.75);
}

#[test]
fn every_path_sells_out_before_horizon() {
    for (e, label, n) in [(2.0, "d1", 5), (1.25, "q2", 20), (1.6, "q3", 40)] {
        let p = stepped_policy(e, label, n);
        for seed in 0..300 {
            let path = simulate_path(&p, n as i64, seed).unwrap();
            assert!(path.final_inventory <= 0);
            let last = path.events.last().unwrap();
            assert!(last.time < 1.0);
            assert!(last.inventory_before >= 1);
        }
    }
}

#[test]
fn path_bookkeeping() {
    let p = stepped_policy(1.6, "q3", 30);
    for seed in 0..200 {
        let path = simulate_path(&p, 30, seed).unwrap();
        let sold: usize = path.events.iter().map(|e| e.order_size).sum();
        assert_eq!(path.final_inventory, 30 - sold as i64);
        let revenue: f64 = path
            .events
            .iter()
            .map(|e| e.order_size as f64 * e.posted_price)
            .sum();
        assert!((path.total_revenue - revenue).abs() <= 1e-12 * revenue);
        assert!(path.events.len() <= 30);
        assert!(path
            .events
            .iter()
            .all(|e| e.inventory_before >= 1 && e.posted_price > 0.0));
        for w in path.events.windows(2) {
            assert!(w[0].time <= w[1].time);
            assert_eq!(
                w[1].inventory_before,
                w[0].inventory_before - w[0].order_size as i64
            );
        }
    }
}

#[test]
fn event_times_strictly_increase() {
    let p = unit_policy(2.0, dist("d1"), 20);
    for seed in 0..500 {
        let path = simulate_path(&p, 20, seed).unwrap();
        for w in path.events.windows(2) {
            assert!(
                w[0].time < w[1].time,
                "seed {seed}: {} then {}",
                w[0].time,
                w[1].time
            );
        }
    }
}

#[test]
fn order_sizes_follow_distribution() {
    for label in ["q1", "q2", "q3"] {
        let q = dist(label);
        let p = unit_policy(1.6, q.clone(), 500);
        let mut histogram = vec![0u64; q.max_size() + 1];
        let mut draws = 0u64;
        let mut seed = 0;
        while draws < 100_000 {
            for e in simulate_path(&p, 500, seed).unwrap().events {
                histogram[e.order_size] += 1;
                draws += 1;
            }
            seed += 1;
        }
        let tv: f64 = 0.5
            * (1..=q.max_size())
                .map(|k| (histogram[k] as f64 / draws as f64 - q.prob(k)).abs())
                .sum::<f64>();
        assert!(tv < 0.01, "{label}: total variation {tv}");
        assert_eq!(histogram[0], 0);
    }
}

#[test]
fn estimates_are_unbiased() {
    let cases = [
        unit_policy(2.0, dist("d1"), 3),
        unit_policy(1.6, dist("q3"), 7),
        stepped_policy(1.6, "q1", 5),
        stepped_policy(1.25, "d2", 4),
    ];
    for p in &cases {
        let n = p.betas().max_index() as i64;
        let est = estimate_revenue(p, n, 20_000, 2024).unwrap();
        let exact = p.optimal_revenue(n, 0.0).unwrap();
        assert!(
            (est.mean - exact).abs() < 3.0 * est.std_error,
            "mean {} vs {exact} (se {})",
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn estimates_are_deterministic() {
    let p = stepped_policy(1.6, "q2", 10);
    let a = estimate_revenue(&p, 10, 5_000, 9).unwrap();
    let b = estimate_revenue(&p, 10, 5_000, 9).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    assert_ne!(a.mean, estimate_revenue(&p, 10, 5_000, 10).unwrap().mean);
    assert_eq!(
        simulate_path(&p, 10, 9).unwrap().total_revenue,
        estimate_revenue(&p, 10, 1, 9).unwrap().mean
    );
}
