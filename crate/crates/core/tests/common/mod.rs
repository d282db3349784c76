#![allow(dead_code)]

use elastic_pricing::{
    ArrivalRateSpec, Elasticity, MarketModel, OrderSizeDistribution, PricePolicy,
};

pub const STANDARD_LABELS: [&str; 6] = ["d1", "d2", "d4", "q1", "q2", "q3"];

pub fn dist(label: &str) -> OrderSizeDistribution {
    match label {
        "q1" => OrderSizeDistribution::new(vec![0.25, 0.25, 0.25, 0.25]).unwrap(),
        "q2" => OrderSizeDistribution::new(vec![0.0, 0.4, 0.0, 0.6]).unwrap(),
        "q3" => OrderSizeDistribution::new(vec![0.7, 0.1, 0.2]).unwrap(),
        d => OrderSizeDistribution::delta(d[1..].parse().unwrap()).unwrap(),
    }
}

pub fn eps(v: f64) -> Elasticity {
    Elasticity::new(v).unwrap()
}

pub fn unit_policy(e: f64, q: OrderSizeDistribution, n: usize) -> PricePolicy {
    let model = MarketModel::new(e, ArrivalRateSpec::constant(1.0, 1.0).unwrap(), q).unwrap();
    PricePolicy::new(model, n).unwrap()
}

/// Plain bisection on the untransformed defining equation
/// `b^(1/(e-1)) (b - c) = (e-1)/e`, 200 halvings of a bracket starting at `[c, c+1]`.
pub fn oracle_beta_sequence(e: f64, q: &[f64], n_max: usize) -> Vec<f64> {
    let target = (e - 1.0) / e;
    let mut betas = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let c: f64 = q
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let k = n as i64 - 1 - i as i64;
                if k >= 1 {
                    p * betas[k as usize - 1]
                } else {
                    0.0
                }
            })
            .sum();
        let f = |b: f64| b.powf(1.0 / (e - 1.0)) * (b - c) - target;
        let (mut lo, mut hi) = (c, c + 1.0);
        while f(hi) < 0.0 {
            hi = c + 2.0 * (hi - c);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        betas.push(0.5 * (lo + hi));
    }
    betas
}
