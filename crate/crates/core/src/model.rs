//! Domain types shared by every other module: demand elasticity, order-size
//! distributions, piecewise-constant arrival-rate profiles and the market
//! model that ties them together.
//!
//! Arrival intensity at price `p` and time `t` is `a(t) * p^(-epsilon)`,
//! where `a` is piecewise constant on `[0, T]`. Customers order `i` items
//! with probability `q_i`, `1 <= i <= M`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the probability sum of an order-size distribution.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Constant price elasticity of demand. Always finite and strictly greater than 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Elasticity(f64);

impl Elasticity {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidElasticity(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `(epsilon - 1) / epsilon`.
    pub fn markup_exponent(self) -> f64 {
        (self.0 - 1.0) / self.0
    }

    /// `1 / (epsilon - 1)`.
    pub fn inverse_excess(self) -> f64 {
        1.0 / (self.0 - 1.0)
    }
}

impl TryFrom<f64> for Elasticity {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// Probability vector over order sizes `1..=M`.
///
/// Trailing zero probabilities are trimmed so that `M` is the true maximum
/// order size; interior zeros are kept. Inputs whose sum is within
/// [`PROBABILITY_SUM_TOL`] of one are renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSizeDistribution {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    mean: f64,
}

impl OrderSizeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no probabilities given".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "probability of order size {} is {p}",
                i + 1
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut probs: Vec<f64> = probs.into_iter().map(|p| p / total).collect();
        while probs.last() == Some(&0.0) {
            probs.pop();
        }

        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        // u < 1 must always land on a valid size
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        let mean = probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum();

        Ok(Self {
            probs,
            cumulative,
            mean,
        })
    }

    /// Point mass on order size `size`.
    pub fn delta(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistribution("order sizes start at 1".into()));
        }
        let mut probs = vec![0.0; size];
        probs[size - 1] = 1.0;
        Self::new(probs)
    }

    /// Probabilities for sizes `1..=M`, index 0 holding size 1.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of an order of exactly `size` items.
    pub fn prob(&self, size: usize) -> f64 {
        size.checked_sub(1)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn max_size(&self) -> usize {
        self.probs.len()
    }

    /// Average order size, `sum_i i * q_i`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Draws an order size by inverting the cumulative distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.probs.len() - 1)
            + 1
    }
}

/// Average order size of `q`.
pub fn mean_order_size(q: &OrderSizeDistribution) -> f64 {
    q.mean()
}

/// One constant-rate piece of the arrival profile, in force from `start`
/// until the next piece begins (or the horizon).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePiece {
    pub start: f64,
    pub rate: f64,
}

/// Piecewise-constant arrival scale `a(t)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalRateSpec {
    pieces: Vec<RatePiece>,
    horizon: f64,
    // remaining mass A(start) for each piece
    mass_from: Vec<f64>,
}

impl ArrivalRateSpec {
    pub fn new(pieces: Vec<RatePiece>, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArrivals(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidArrivals("no rate pieces given".into()));
        };
        if first.start != 0.0 {
            return Err(Error::InvalidArrivals(format!(
                "first piece must start at 0, got {}",
                first.start
            )));
        }
        for (i, piece) in pieces.iter().enumerate() {
            if !(piece.rate.is_finite() && piece.rate >= 0.0) {
                return Err(Error::InvalidArrivals(format!(
                    "piece {i} has rate {}",
                    piece.rate
                )));
            }
            if !(piece.start.is_finite() && piece.start < horizon) {
                return Err(Error::InvalidArrivals(format!(
                    "piece {i} starts at {}, horizon is {horizon}",
                    piece.start
                )));
            }
            if i > 0 && piece.start <= pieces[i - 1].start {
                return Err(Error::InvalidArrivals(format!(
                    "breakpoints must be strictly increasing (piece {i})"
                )));
            }
        }
        if pieces.iter().all(|p| p.rate == 0.0) {
            return Err(Error::InvalidArrivals(
                "at least one piece needs a positive rate".into(),
            ));
        }

        let mut mass_from = vec![0.0; pieces.len()];
        let mut acc = 0.0;
        for j in (0..pieces.len()).rev() {
            let end = pieces.get(j + 1).map_or(horizon, |p| p.start);
            acc += pieces[j].rate * (end - pieces[j].start);
            mass_from[j] = acc;
        }

        Ok(Self {
            pieces,
            horizon,
            mass_from,
        })
    }

    /// `a(t) = rate` on the whole horizon.
    pub fn constant(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![RatePiece { start: 0.0, rate }], horizon)
    }

    pub fn pieces(&self) -> &[RatePiece] {
        &self.pieces
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn piece_end(&self, j: usize) -> f64 {
        self.pieces.get(j + 1).map_or(self.horizon, |p| p.start)
    }

    fn mass_after(&self, j: usize) -> f64 {
        self.mass_from.get(j + 1).copied().unwrap_or(0.0)
    }

    fn piece_index(&self, t: f64) -> usize {
        self.pieces
            .partition_point(|p| p.start <= t)
            .saturating_sub(1)
    }

    /// `a(t)`; the last piece is taken to include the horizon itself.
    pub fn rate_at(&self, t: f64) -> f64 {
        self.pieces[self.piece_index(t)].rate
    }

    /// Total mass `A(0)`.
    pub fn total(&self) -> f64 {
        self.mass_from[0]
    }

    /// `A(t) = integral of a over [t, T]`, in closed form.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::domain("t", t, format!("[0, {}]", self.horizon)));
        }
        if t == self.horizon {
            return Ok(0.0);
        }
        let j = self.piece_index(t);
        Ok(self.pieces[j].rate * (self.piece_end(j) - t) + self.mass_after(j))
    }

    /// Earliest time `t` with `A(t) = mass`, i.e. the inverse of
    /// [`cumulative`](Self::cumulative). Masses above `A(0)` map to 0 and
    /// non-positive masses to the point where `A` first reaches zero.
    pub fn time_with_remaining(&self, mass: f64) -> f64 {
        if mass >= self.mass_from[0] {
            return 0.0;
        }
        let mass = mass.max(0.0);
        for j in 0..self.pieces.len() {
            let after = self.mass_after(j);
            if mass >= after && mass < self.mass_from[j] {
                let end = self.piece_end(j);
                let t = end - (mass - after) / self.pieces[j].rate;
                return t.max(self.pieces[j].start);
            }
        }
        self.horizon
    }

    /// Same breakpoints, every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::domain("scale factor", factor, "(0, inf)"));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| RatePiece {
                start: p.start,
                rate: p.rate * factor,
            })
            .collect();
        Self::new(pieces, self.horizon)
    }
}

/// `A(t)` for `spec`; see [`ArrivalRateSpec::cumulative`].
pub fn cumulative_arrivals(spec: &ArrivalRateSpec, t: f64) -> Result<f64> {
    spec.cumulative(t)
}

/// Arrival profile for a model with order sizes `q` that has the same demand
/// as a model with arrivals `a2` and order sizes `w`: `a1 = a2 * mu(w) / mu(q)`.
pub fn comparable_arrival_rate(
    a2: &ArrivalRateSpec,
    w: &OrderSizeDistribution,
    q: &OrderSizeDistribution,
) -> ArrivalRateSpec {
    let factor = w.mean() / q.mean();
    // both means are >= 1, so the factor is a valid positive scale
    a2.scaled(factor)
        .expect("ratio of two mean order sizes is positive and finite")
}

/// Elasticity, arrival profile and order-size distribution of one market.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel {
    epsilon: Elasticity,
    arrivals: ArrivalRateSpec,
    orders: OrderSizeDistribution,
}

impl MarketModel {
    pub fn new(
        epsilon: f64,
        arrivals: ArrivalRateSpec,
        orders: OrderSizeDistribution,
    ) -> Result<Self> {
        Ok(Self {
            epsilon: Elasticity::new(epsilon)?,
            arrivals,
            orders,
        })
    }

    pub fn epsilon(&self) -> Elasticity {
        self.epsilon
    }

    pub fn arrivals(&self) -> &ArrivalRateSpec {
        &self.arrivals
    }

    pub fn orders(&self) -> &OrderSizeDistribution {
        &self.orders
    }

    pub fn horizon(&self) -> f64 {
        self.arrivals.horizon()
    }

    /// Customer arrival intensity `a(t) p^(-epsilon)`.
    pub fn arrival_intensity(&self, price: f64, t: f64) -> f64 {
        self.arrivals.rate_at(t) * price.powf(-self.epsilon.value())
    }

    /// Expected items demanded per unit time, `a(t) p^(-epsilon) mu(q)`.
    pub fn demand(&self, price: f64, t: f64) -> f64 {
        self.arrival_intensity(price, t) * self.orders.mean()
    }

    pub fn with_arrivals(&self, arrivals: ArrivalRateSpec) -> Self {
        Self {
            arrivals,
            ..self.clone()
        }
    }
}

/// Arrival-rate field of a model config: a constant or a list of pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateConfig {
    Constant(f64),
    Pieces(Vec<RatePieceConfig>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePieceConfig {
    pub t: f64,
    pub rate: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig::Constant(1.0)
    }
}

fn unit_horizon() -> f64 {
    1.0
}

fn single_item_orders() -> Vec<f64> {
    vec![1.0]
}

/// JSON model configuration: `{"epsilon": .., "T": .., "a": .., "q": [..]}`.
///
/// `T` defaults to 1, `a` to the constant 1 and `q` to single-item orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub epsilon: f64,
    #[serde(rename = "T", default = "unit_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub a: RateConfig,
    #[serde(default = "single_item_orders")]
    pub q: Vec<f64>,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn arrivals(&self) -> Result<ArrivalRateSpec> {
        match &self.a {
            RateConfig::Constant(rate) => ArrivalRateSpec::constant(*rate, self.horizon),
            RateConfig::Pieces(pieces) => ArrivalRateSpec::new(
                pieces
                    .iter()
                    .map(|p| RatePiece {
                        start: p.t,
                        rate: p.rate,
                    })
                    .collect(),
                self.horizon,
            ),
        }
    }

    pub fn to_model(&self) -> Result<MarketModel> {
        MarketModel::new(
            self.epsilon,
            self.arrivals()?,
            OrderSizeDistribution::new(self.q.clone())?,
        )
    }
}
