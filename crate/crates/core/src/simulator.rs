//! Monte Carlo simulation of the sales process under the optimal policy.
//!
//! Under the optimal price the arrival intensity is
//! `a(t) * beta_n^(eps/(eps-1)) / A(t)`, so the integrated intensity from
//! `t0` to `t` is `beta_n^(eps/(eps-1)) * ln(A(t0) / A(t))`. The next arrival
//! is found by drawing an exponential increment and inverting this in closed
//! form; no thinning is needed (the intensity is unbounded near the horizon
//! anyway). Paths track the remaining mass `A` rather than time, so prices
//! stay accurate even when sales land within rounding distance of `T`.
//!
//! Every trial draws from its own ChaCha8 stream, selected by trial index,
//! so estimates do not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pricing::PricePolicy;

/// Identity of the random number generator, recorded in every estimate.
pub const RNG_NAME: &str = "ChaCha8Rng/seed_from_u64(seed)/stream=trial";

/// Random stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SalesEvent {
    #[serde(rename = "t")]
    pub time: f64,
    #[serde(rename = "size")]
    pub order_size: usize,
    #[serde(rename = "price")]
    pub posted_price: f64,
    #[serde(rename = "inv_before")]
    pub inventory_before: i64,
}

/// One simulated trajectory. `final_inventory` goes negative when the last
/// order is larger than the remaining stock.
#[derive(Debug, Clone, PartialEq)]
pub struct SalesPath {
    pub events: Vec<SalesEvent>,
    pub initial_inventory: i64,
    pub final_inventory: i64,
    pub total_revenue: f64,
}

impl SalesPath {
    /// One JSON object per event and line.
    pub fn to_jsonl(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("event serializes") + "\n")
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevenueEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub rng: String,
}

/// `beta_n^(eps/(eps-1))`, the intensity multiplier at inventory `n`.
fn intensity_scale(policy: &PricePolicy, n: i64) -> Result<f64> {
    let eps = policy.model().epsilon().value();
    Ok(policy.betas().beta(n)?.powf(eps / (eps - 1.0)))
}

fn time_of_mass(policy: &PricePolicy, mass: f64, not_before: f64) -> f64 {
    let horizon = policy.model().horizon();
    let t = policy
        .model()
        .arrivals()
        .time_with_remaining(mass)
        .max(not_before);
    if t >= horizon {
        horizon.next_down()
    } else {
        t
    }
}

/// Time of the next sale after `t0` with `n` items in stock, given a uniform
/// draw `u` in `(0, 1]` (the exponential increment is `-ln u`).
///
/// Returns `None` only when no arrival mass remains after `t0`.
pub fn next_sale_time(policy: &PricePolicy, n: i64, t0: f64, u: f64) -> Result<Option<f64>> {
    if n <= 0 {
        return Err(Error::domain("n", n as f64, "[1, inf)"));
    }
    let horizon = policy.model().horizon();
    if !(0.0..horizon).contains(&t0) {
        return Err(Error::domain("t0", t0, format!("[0, {horizon})")));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::domain("u", u, "(0, 1]"));
    }
    let scale = intensity_scale(policy, n)?;
    let mass0 = policy.model().arrivals().cumulative(t0)?;
    if mass0 == 0.0 {
        return Ok(None);
    }
    if u == 1.0 {
        return Ok(Some(t0));
    }
    let mass = mass0 * (u.ln() / scale).exp();
    Ok(Some(time_of_mass(policy, mass, t0)))
}

fn check_inventory(policy: &PricePolicy, initial_inventory: i64) -> Result<()> {
    if initial_inventory < 1 {
        return Err(Error::domain(
            "initial inventory",
            initial_inventory as f64,
            "[1, inf)",
        ));
    }
    if initial_inventory as usize > policy.betas().max_index() {
        return Err(Error::OutOfRange {
            index: initial_inventory,
            max: policy.betas().max_index(),
        });
    }
    Ok(())
}

fn run_path<R: Rng>(
    policy: &PricePolicy,
    initial_inventory: i64,
    rng: &mut R,
) -> Result<SalesPath> {
    let orders = policy.model().orders();
    let mut mass = policy.model().arrivals().total();
    let mut time = 0.0;
    let mut inventory = initial_inventory;
    let mut revenue = 0.0;
    let mut events = Vec::new();

    while inventory > 0 {
        // 1 - [0, 1) keeps u away from zero
        let u = 1.0 - rng.random::<f64>();
        mass *= (u.ln() / intensity_scale(policy, inventory)?).exp();
        time = time_of_mass(policy, mass, time);
        let price = policy.price_at_mass(inventory, mass)?;
        let size = orders.sample(rng);
        revenue += size as f64 * price;
        events.push(SalesEvent {
            time,
            order_size: size,
            posted_price: price,
            inventory_before: inventory,
        });
        inventory -= size as i64;
    }

    Ok(SalesPath {
        events,
        initial_inventory,
        final_inventory: inventory,
        total_revenue: revenue,
    })
}

/// Simulates one path until the stock is gone. Uses stream 0 of `rng_seed`,
/// so it reproduces trial 0 of [`estimate_revenue`] with the same seed.
pub fn simulate_path(
    policy: &PricePolicy,
    initial_inventory: i64,
    rng_seed: u64,
) -> Result<SalesPath> {
    check_inventory(policy, initial_inventory)?;
    run_path(policy, initial_inventory, &mut trial_rng(rng_seed, 0))
}

/// Mean and standard error of total revenue over `trials` independent paths.
pub fn estimate_revenue(
    policy: &PricePolicy,
    initial_inventory: i64,
    trials: u64,
    seed: u64,
) -> Result<RevenueEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials", 0.0, "[1, inf)"));
    }
    check_inventory(policy, initial_inventory)?;
    let revenues = (0..trials)
        .into_par_iter()
        .map(|i| {
            run_path(policy, initial_inventory, &mut trial_rng(seed, i)).map(|p| p.total_revenue)
        })
        .collect::<Result<Vec<f64>>>()?;

    let count = revenues.len() as f64;
    let mean = revenues.iter().sum::<f64>() / count;
    let std_error = if revenues.len() > 1 {
        let var = revenues.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(RevenueEstimate {
        mean,
        std_error,
        trials,
        seed,
        rng: RNG_NAME.to_string(),
    })
}
