//! The recursive sequence `beta_n` behind the optimal value function.
//!
//! For `n <= 0`, `beta_n = 0`. For `n >= 1`, `beta_n` is the unique positive
//! root of
//!
//! ```text
//! beta^(1/(eps-1)) * (beta - sum_i q_i beta_{n-i}) = (eps-1)/eps
//! ```
//!
//! Substituting `y = beta^(1/(eps-1))` turns this into
//! `h(y) = y^eps - c*y - (eps-1)/eps = 0` with `c = sum_i q_i beta_{n-i}`.
//! `h` is smooth at zero, negative on `[0, c^(1/(eps-1))]` and increasing
//! beyond, so plain bisection on a grown bracket always converges. A few
//! Newton steps confined to the final bracket polish the root.

use crate::error::{Error, Result};
use crate::model::{Elasticity, OrderSizeDistribution};

/// Absolute bracket width at which bisection stops, in the substituted variable.
pub const SOLVER_TOL: f64 = 1e-12;

/// Combined budget for bracket growth and bisection steps.
pub const MAX_ITERATIONS: usize = 200;

/// Root finder gave up; carries the last bracket it held.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketFailure {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// `sum_i q_i * window[i-1]`, treating entries past the window as zero.
fn continuation_value(q: &OrderSizeDistribution, window: &[f64]) -> f64 {
    q.probs().iter().zip(window).map(|(p, b)| p * b).sum()
}

fn solve_transformed(epsilon: Elasticity, c: f64) -> Result<f64, BracketFailure> {
    let eps = epsilon.value();
    let target = epsilon.markup_exponent();
    let h = |y: f64| y.powf(eps) - c * y - target;

    let mut iterations = 0;
    let mut lo = 0.0;
    let mut hi = c.powf(epsilon.inverse_excess()).max(1.0);
    while !(h(hi) > 0.0) {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(BracketFailure { lo, hi, iterations });
        }
        lo = hi;
        hi *= 2.0;
    }

    while hi - lo > SOLVER_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(BracketFailure { lo, hi, iterations });
        }
        if h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // Newton polish inside the final bracket; at large y the slope of h is
    // big enough that a 1e-12 bracket alone leaves residuals near 1e-9.
    let mut y = 0.5 * (lo + hi);
    for _ in 0..4 {
        let slope = eps * y.powf(eps - 1.0) - c;
        let next = (y - h(y) / slope).clamp(lo, hi);
        if !(h(next).abs() < h(y).abs()) {
            break;
        }
        y = next;
    }
    Ok(y)
}

/// Next term of the sequence from the previous `M` terms.
///
/// `window` holds `beta_{n-1}, beta_{n-2}, ..., beta_{n-M}`; a shorter window
/// means the missing terms have non-positive index and are zero.
pub fn solve_beta_next(
    epsilon: Elasticity,
    q: &OrderSizeDistribution,
    window: &[f64],
) -> Result<f64, BracketFailure> {
    let c = continuation_value(q, window);
    let y = solve_transformed(epsilon, c)?;
    Ok(y.powf(epsilon.value() - 1.0))
}

/// `beta_1 ..= beta_N` for one elasticity and order-size distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaTable {
    epsilon: Elasticity,
    orders: OrderSizeDistribution,
    values: Vec<f64>,
    solver_tol: f64,
}

impl BetaTable {
    /// Computes `beta_1 ..= beta_{n_max}`. `n_max = 0` yields an empty table.
    pub fn compute(
        epsilon: Elasticity,
        orders: &OrderSizeDistribution,
        n_max: usize,
    ) -> Result<Self> {
        let mut table = Self {
            epsilon,
            orders: orders.clone(),
            values: Vec::new(),
            solver_tol: SOLVER_TOL,
        };
        table.extend_to(n_max)?;
        Ok(table)
    }

    /// Appends terms until `max_index() >= n_max`.
    pub fn extend_to(&mut self, n_max: usize) -> Result<()> {
        let m = self.orders.max_size();
        self.values.reserve(n_max.saturating_sub(self.values.len()));
        let mut window = Vec::with_capacity(m);
        while self.values.len() < n_max {
            let n = self.values.len() + 1;
            window.clear();
            window.extend(self.values.iter().rev().take(m));
            let beta = solve_beta_next(self.epsilon, &self.orders, &window).map_err(|f| {
                Error::Solver {
                    n,
                    lo: f.lo,
                    hi: f.hi,
                    iterations: f.iterations,
                }
            })?;
            self.values.push(beta);
        }
        Ok(())
    }

    pub fn epsilon(&self) -> Elasticity {
        self.epsilon
    }

    pub fn orders(&self) -> &OrderSizeDistribution {
        &self.orders
    }

    /// `beta_1 ..= beta_N`; index 0 holds `beta_1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn solver_tol(&self) -> f64 {
        self.solver_tol
    }

    pub fn max_index(&self) -> usize {
        self.values.len()
    }

    /// `beta_n`, zero for every `n <= 0`.
    pub fn beta(&self, n: i64) -> Result<f64> {
        if n <= 0 {
            return Ok(0.0);
        }
        self.values
            .get(n as usize - 1)
            .copied()
            .ok_or(Error::OutOfRange {
                index: n,
                max: self.max_index(),
            })
    }

    /// `sum_i q_i beta_{n-i}`.
    pub fn continuation(&self, n: i64) -> Result<f64> {
        let mut acc = 0.0;
        for (i, p) in self.orders.probs().iter().enumerate() {
            acc += p * self.beta(n - 1 - i as i64)?;
        }
        Ok(acc)
    }

    /// Residual of the defining equation at `n`, using the stored terms.
    pub fn residual(&self, n: usize) -> Result<f64> {
        let beta = self.beta(n as i64)?;
        let c = self.continuation(n as i64)?;
        Ok(beta.powf(self.epsilon.inverse_excess()) * (beta - c) - self.epsilon.markup_exponent())
    }

    /// `gamma_n = beta_n / n^((eps-1)/eps)`, for `1 <= n <= N`.
    pub fn gamma(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::OutOfRange {
                index: 0,
                max: self.max_index(),
            });
        }
        let beta = self.beta(n as i64)?;
        Ok(beta / (n as f64).powf(self.epsilon.markup_exponent()))
    }
}

/// See [`BetaTable::compute`].
pub fn beta_sequence(
    epsilon: Elasticity,
    q: &OrderSizeDistribution,
    n_max: usize,
) -> Result<BetaTable> {
    BetaTable::compute(epsilon, q, n_max)
}

/// See [`BetaTable::gamma`].
pub fn gamma(table: &BetaTable, n: usize) -> Result<f64> {
    table.gamma(n)
}

/// Limit of `gamma_n` as `n` grows: `mu(q)^((1-eps)/eps)`.
pub fn gamma_limit(epsilon: Elasticity, q: &OrderSizeDistribution) -> f64 {
    q.mean().powf(-epsilon.markup_exponent())
}

/// Large-inventory approximation `(n / mu(q))^((eps-1)/eps)` of `beta_n`.
pub fn beta_approximation(epsilon: Elasticity, q: &OrderSizeDistribution, n: usize) -> f64 {
    (n as f64 / q.mean()).powf(epsilon.markup_exponent())
}

/// `f(n; q) = n * (1 - sum_i q_i ((n-i)/n)^((eps-1)/eps))` for real `n > M`.
///
/// Decreasing in `n` towards `mu(q) (eps-1)/eps`. Evaluated as
/// `-n * sum_i q_i expm1(e * ln_1p(-i/n))` to avoid cancellation at large `n`.
pub fn lemma_f(n: f64, q: &OrderSizeDistribution, epsilon: Elasticity) -> Result<f64> {
    let m = q.max_size() as f64;
    if !(n.is_finite() && n > m) {
        return Err(Error::domain("n", n, format!("({m}, inf)")));
    }
    let e = epsilon.markup_exponent();
    let sum: f64 = q
        .probs()
        .iter()
        .enumerate()
        .map(|(i, p)| p * (e * (-((i + 1) as f64) / n).ln_1p()).exp_m1())
        .sum();
    Ok(-n * sum)
}
