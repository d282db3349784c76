//! Optimal dynamic pricing for a seller facing constant-elasticity demand
//! where each arriving customer orders a random number of items.
//!
//! With `n` items left at time `t`, the optimal expected revenue is
//! `mu(q) * beta_n * A(t)^(1/eps)` and the optimal posted price is
//! `beta_n^(-1/(eps-1)) * A(t)^(1/eps)`, where `A(t)` is the remaining
//! arrival mass and `beta_n` solves a scalar recursion (see [`beta`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beta;
pub mod comparison;
pub mod error;
pub mod format;
pub mod model;
pub mod pricing;
pub mod simulator;

pub use beta::{
    beta_approximation, beta_sequence, gamma, gamma_limit, lemma_f, solve_beta_next, BetaTable,
};
pub use comparison::{
    comparison_table, relative_difference_closed, relative_difference_direct, ComparisonRow,
    ComparisonTable, NamedDistribution,
};
pub use error::{Error, Result};
pub use model::{
    comparable_arrival_rate, cumulative_arrivals, mean_order_size, ArrivalRateSpec, Elasticity,
    MarketModel, ModelConfig, OrderSizeDistribution, RatePiece,
};
pub use pricing::{maximizing_price_from_values, policy_csv, policy_table, PolicyRow, PricePolicy};
pub use simulator::{
    estimate_revenue, next_sale_time, simulate_path, trial_rng, RevenueEstimate, SalesEvent,
    SalesPath, RNG_NAME,
};
