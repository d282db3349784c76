//! Closed-form optimal revenue and price.

use crate::beta::BetaTable;
use crate::error::{Error, Result};
use crate::format::fixed;
use crate::model::{Elasticity, MarketModel};

/// Optimal policy for one market: the model plus enough `beta_n` terms to
/// cover every inventory level that will be queried.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePolicy {
    model: MarketModel,
    betas: BetaTable,
}

impl PricePolicy {
    /// Builds the policy for inventory levels up to `max_inventory`.
    pub fn new(model: MarketModel, max_inventory: usize) -> Result<Self> {
        let betas = BetaTable::compute(model.epsilon(), model.orders(), max_inventory)?;
        Ok(Self { model, betas })
    }

    /// Pairs a model with a precomputed table, which must match its
    /// elasticity and order-size distribution.
    pub fn from_parts(model: MarketModel, betas: BetaTable) -> Result<Self> {
        if betas.epsilon() != model.epsilon() {
            return Err(Error::Mismatch(format!(
                "table built for epsilon {}, model has {}",
                betas.epsilon().value(),
                model.epsilon().value()
            )));
        }
        if betas.orders() != model.orders() {
            return Err(Error::Mismatch(
                "table built for a different order-size distribution".into(),
            ));
        }
        Ok(Self { model, betas })
    }

    pub fn model(&self) -> &MarketModel {
        &self.model
    }

    pub fn betas(&self) -> &BetaTable {
        &self.betas
    }

    pub fn extend_to(&mut self, max_inventory: usize) -> Result<()> {
        self.betas.extend_to(max_inventory)
    }

    /// `v_n` expressed through the remaining arrival mass `A` instead of time.
    pub(crate) fn revenue_at_mass(&self, n: i64, mass: f64) -> Result<f64> {
        let beta = self.betas.beta(n)?;
        Ok(self.model.orders().mean() * beta * mass.powf(1.0 / self.model.epsilon().value()))
    }

    /// `p*_n` expressed through the remaining arrival mass `A`.
    pub(crate) fn price_at_mass(&self, n: i64, mass: f64) -> Result<f64> {
        let eps = self.model.epsilon();
        let beta = self.betas.beta(n)?;
        Ok(beta.powf(-eps.inverse_excess()) * mass.powf(1.0 / eps.value()))
    }

    /// Optimal expected revenue `v_n(t) = mu * beta_n * A(t)^(1/eps)`.
    ///
    /// Zero for `n <= 0` and at the horizon.
    pub fn optimal_revenue(&self, n: i64, t: f64) -> Result<f64> {
        let mass = self.model.arrivals().cumulative(t)?;
        if n <= 0 {
            return Ok(0.0);
        }
        self.revenue_at_mass(n, mass)
    }

    /// Optimal posted price `p*_n(t) = beta_n^(-1/(eps-1)) * A(t)^(1/eps)`.
    ///
    /// Undefined (an error) with no inventory or once the horizon is reached.
    pub fn optimal_price(&self, n: i64, t: f64) -> Result<f64> {
        if n <= 0 {
            return Err(Error::domain("n", n as f64, "[1, inf)"));
        }
        let horizon = self.model.horizon();
        if t == horizon {
            return Err(Error::domain("t", t, format!("[0, {horizon})")));
        }
        let mass = self.model.arrivals().cumulative(t)?;
        self.price_at_mass(n, mass)
    }

    /// `v_n(t) - sum_i q_i v_{n-i}(t)`, the revenue gap the posted price recovers.
    pub fn continuation_gap(&self, n: i64, t: f64) -> Result<f64> {
        let mut gap = self.optimal_revenue(n, t)?;
        for (i, p) in self.model.orders().probs().iter().enumerate() {
            gap -= p * self.optimal_revenue(n - 1 - i as i64, t)?;
        }
        Ok(gap)
    }
}

/// Price maximizing `p^(-eps) (mu p - gap)`: `eps/(eps-1) * gap / mu`.
pub fn maximizing_price_from_values(epsilon: Elasticity, mu: f64, gap: f64) -> f64 {
    epsilon.value() / (epsilon.value() - 1.0) * gap / mu
}

/// One evaluated grid point. `price` is `None` at the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyRow {
    pub n: i64,
    pub t: f64,
    pub price: Option<f64>,
    pub revenue: f64,
}

/// Evaluates the policy on every `(n, t)` pair, `n`-major.
///
/// `t` may equal the horizon, in which case the row carries zero revenue
/// and no price.
pub fn policy_table(
    policy: &PricePolicy,
    n_values: &[i64],
    t_values: &[f64],
) -> Result<Vec<PolicyRow>> {
    let horizon = policy.model().horizon();
    let mut rows = Vec::with_capacity(n_values.len() * t_values.len());
    for &n in n_values {
        if n <= 0 {
            return Err(Error::domain("n", n as f64, "[1, inf)"));
        }
        for &t in t_values {
            let revenue = policy.optimal_revenue(n, t)?;
            let price = if t == horizon {
                None
            } else {
                Some(policy.optimal_price(n, t)?)
            };
            rows.push(PolicyRow {
                n,
                t,
                price,
                revenue,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `n,t,price,revenue`.
pub fn policy_csv(rows: &[PolicyRow]) -> String {
    let mut out = String::from("n,t,price,revenue\n");
    for row in rows {
        let price = row.price.map(fixed).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.n,
            fixed(row.t),
            price,
            fixed(row.revenue)
        ));
    }
    out
}
