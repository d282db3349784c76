//! Relative revenue differences between comparable models, i.e. models with
//! the same elasticity and the same demand `lambda * mu` but different
//! order-size distributions.
//!
//! For a model with order sizes `q` compared against one with order sizes
//! `w`, the relative difference
//! `g_n(q, w) = (v_n(q) - v_n(w)) / v_n(w)` reduces to
//! `((mu(q)/mu(w))^((eps-1)/eps) beta_n(q) - beta_n(w)) / beta_n(w)`,
//! which no longer depends on time or on the arrival rates. Against
//! single-item orders (`mu(w) = 1`) the prefactor is `mu(q)^((eps-1)/eps)`.
//! Both forms are provided; tables use the closed form and cross-check it
//! with the direct one.

use rayon::prelude::*;

use crate::beta::BetaTable;
use crate::error::{Error, Result};
use crate::format::fixed;
use crate::model::{
    comparable_arrival_rate, ArrivalRateSpec, Elasticity, MarketModel, OrderSizeDistribution,
};
use crate::pricing::PricePolicy;

/// Relative tolerance of the structural comparability check.
pub const COMPARABILITY_TOL: f64 = 1e-12;

/// Maximum allowed disagreement between the closed-form and direct paths.
pub const PATH_AGREEMENT_TOL: f64 = 1e-9;

/// An order-size distribution with a short label such as `d2` or `q1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedDistribution {
    pub label: String,
    pub dist: OrderSizeDistribution,
}

impl NamedDistribution {
    pub fn new(label: impl Into<String>, dist: OrderSizeDistribution) -> Self {
        Self {
            label: label.into(),
            dist,
        }
    }

    /// Built-in distributions: `dK` is a point mass on `K` items,
    /// `q1 = (0.25, 0.25, 0.25, 0.25)`, `q2 = (0, 0.4, 0, 0.6)`,
    /// `q3 = (0.7, 0.1, 0.2)`.
    pub fn builtin(label: &str) -> Result<Self> {
        let dist = match label {
            "q1" => OrderSizeDistribution::new(vec![0.25, 0.25, 0.25, 0.25])?,
            "q2" => OrderSizeDistribution::new(vec![0.0, 0.4, 0.0, 0.6])?,
            "q3" => OrderSizeDistribution::new(vec![0.7, 0.1, 0.2])?,
            _ => {
                let size = label
                    .strip_prefix('d')
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "unknown distribution `{label}` (expected d<K>, q1, q2 or q3)"
                        ))
                    })?;
                OrderSizeDistribution::delta(size)?
            }
        };
        Ok(Self::new(label, dist))
    }
}

/// The six comparisons against single-item orders used in the published tables.
pub fn standard_pairs() -> Vec<(NamedDistribution, NamedDistribution)> {
    let d1 = NamedDistribution::builtin("d1").expect("builtin");
    ["d2", "d3", "d4", "q1", "q2", "q3"]
        .iter()
        .map(|l| (NamedDistribution::builtin(l).expect("builtin"), d1.clone()))
        .collect()
}

/// Inventory levels `1..=10, 50, 100, 200, 500`.
pub fn standard_inventory_levels() -> Vec<usize> {
    (1..=10).chain([50, 100, 200, 500]).collect()
}

/// Checks that two models share elasticity, horizon and breakpoints and
/// that `a_1 mu(q) = a_2 mu(w)` piece by piece.
pub fn check_comparable(m1: &MarketModel, m2: &MarketModel) -> Result<()> {
    if m1.epsilon() != m2.epsilon() {
        return Err(Error::NotComparable(format!(
            "elasticities differ ({} vs {})",
            m1.epsilon().value(),
            m2.epsilon().value()
        )));
    }
    if m1.horizon() != m2.horizon() {
        return Err(Error::NotComparable(format!(
            "horizons differ ({} vs {})",
            m1.horizon(),
            m2.horizon()
        )));
    }
    let (p1, p2) = (m1.arrivals().pieces(), m2.arrivals().pieces());
    if p1.len() != p2.len() {
        return Err(Error::NotComparable(format!(
            "arrival profiles have {} and {} pieces",
            p1.len(),
            p2.len()
        )));
    }
    let (mu1, mu2) = (m1.orders().mean(), m2.orders().mean());
    for (i, (a, b)) in p1.iter().zip(p2).enumerate() {
        if a.start != b.start {
            return Err(Error::NotComparable(format!(
                "piece {i} starts at {} vs {}",
                a.start, b.start
            )));
        }
        let (d1, d2) = (a.rate * mu1, b.rate * mu2);
        if (d1 - d2).abs() > COMPARABILITY_TOL * d1.abs().max(d2.abs()).max(1.0) {
            return Err(Error::NotComparable(format!(
                "piece {i} (from t = {}) has demand {d1} vs {d2}",
                a.start
            )));
        }
    }
    Ok(())
}

/// `g_{n,t}` from two full revenue evaluations.
pub fn relative_difference_direct(
    n: usize,
    t: f64,
    policy_q: &PricePolicy,
    policy_w: &PricePolicy,
) -> Result<f64> {
    check_comparable(policy_q.model(), policy_w.model())?;
    if n == 0 {
        return Err(Error::domain("n", 0.0, "[1, inf)"));
    }
    let horizon = policy_q.model().horizon();
    if !(0.0..horizon).contains(&t) {
        return Err(Error::domain("t", t, format!("[0, {horizon})")));
    }
    let vq = policy_q.optimal_revenue(n as i64, t)?;
    let vw = policy_w.optimal_revenue(n as i64, t)?;
    Ok((vq - vw) / vw)
}

/// `g_n` from the closed form, which only needs the two `beta` tables.
pub fn relative_difference_closed(
    n: usize,
    betas_q: &BetaTable,
    betas_w: &BetaTable,
) -> Result<f64> {
    let eps = betas_q.epsilon();
    if betas_w.epsilon() != eps {
        return Err(Error::Mismatch(format!(
            "tables built for epsilon {} and {}",
            eps.value(),
            betas_w.epsilon().value()
        )));
    }
    if n == 0 {
        return Err(Error::domain("n", 0.0, "[1, inf)"));
    }
    let ratio = betas_q.orders().mean() / betas_w.orders().mean();
    let bq = betas_q.beta(n as i64)?;
    let bw = betas_w.beta(n as i64)?;
    Ok((ratio.powf(eps.markup_exponent()) * bq - bw) / bw)
}

/// One table entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub n: usize,
    pub g: f64,
    /// Labels of `(q, w)`.
    pub pair: (String, String),
}

/// Relative differences for several pairs over a common set of inventory levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub epsilon: Elasticity,
    pub n_values: Vec<usize>,
    /// Rows in `(pair, n)` order.
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn pair_labels(&self) -> Vec<(String, String)> {
        self.rows
            .iter()
            .step_by(self.n_values.len().max(1))
            .map(|r| r.pair.clone())
            .collect()
    }

    /// Column of `g` values for pair `index`, in `n_values` order.
    pub fn column(&self, index: usize) -> &[ComparisonRow] {
        let k = self.n_values.len();
        &self.rows[index * k..(index + 1) * k]
    }

    /// Wide CSV: header `n,g(q;w),...`, one row per inventory level.
    pub fn to_csv(&self) -> String {
        let labels = self.pair_labels();
        let mut out = String::from("n");
        for (q, w) in &labels {
            out.push_str(&format!(",g({q};{w})"));
        }
        out.push('\n');
        for (i, n) in self.n_values.iter().enumerate() {
            out.push_str(&n.to_string());
            for p in 0..labels.len() {
                out.push(',');
                out.push_str(&fixed(self.column(p)[i].g));
            }
            out.push('\n');
        }
        out
    }
}

fn pair_rows(
    epsilon: Elasticity,
    demand: &ArrivalRateSpec,
    q: &NamedDistribution,
    w: &NamedDistribution,
    n_values: &[usize],
    t: f64,
) -> Result<Vec<ComparisonRow>> {
    let n_max = n_values.iter().copied().max().unwrap_or(0);
    let arrivals_w = demand.scaled(1.0 / w.dist.mean())?;
    let arrivals_q = comparable_arrival_rate(&arrivals_w, &w.dist, &q.dist);
    let betas_q = BetaTable::compute(epsilon, &q.dist, n_max)?;
    let betas_w = BetaTable::compute(epsilon, &w.dist, n_max)?;
    let policy_q = PricePolicy::from_parts(
        MarketModel::new(epsilon.value(), arrivals_q, q.dist.clone())?,
        betas_q,
    )?;
    let policy_w = PricePolicy::from_parts(
        MarketModel::new(epsilon.value(), arrivals_w, w.dist.clone())?,
        betas_w,
    )?;

    n_values
        .iter()
        .map(|&n| {
            let closed = relative_difference_closed(n, policy_q.betas(), policy_w.betas())?;
            let direct = relative_difference_direct(n, t, &policy_q, &policy_w)?;
            if !((closed - direct).abs() <= PATH_AGREEMENT_TOL) {
                return Err(Error::PathMismatch { n, closed, direct });
            }
            Ok(ComparisonRow {
                n,
                g: closed,
                pair: (q.label.clone(), w.label.clone()),
            })
        })
        .collect()
}

/// Builds the comparison table for each `(q, w)` pair.
///
/// `demand` is the demand profile `lambda * mu` at unit price; each model
/// receives the arrival profile `demand / mu` for its own distribution.
/// Every closed-form value is verified against the direct evaluation at
/// time `t` within [`PATH_AGREEMENT_TOL`].
pub fn comparison_table(
    epsilon: Elasticity,
    demand: &ArrivalRateSpec,
    pairs: &[(NamedDistribution, NamedDistribution)],
    n_values: &[usize],
    t: f64,
) -> Result<ComparisonTable> {
    if let Some(&n) = n_values.iter().find(|&&n| n == 0) {
        return Err(Error::domain("n", n as f64, "[1, inf)"));
    }
    let columns = pairs
        .par_iter()
        .map(|(q, w)| pair_rows(epsilon, demand, q, w, n_values, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonTable {
        epsilon,
        n_values: n_values.to_vec(),
        rows: columns.into_iter().flatten().collect(),
    })
}
