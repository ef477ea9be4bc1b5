//! The betting game.
//!
//! A bettor starts with wealth 1 and, before each observation, commits to a
//! payoff function `f_t` with conditional mean zero under the null and range
//! `[-1, 1]`. Betting a fraction `λ` multiplies wealth by `1 + λ f_t(Z_t)`.
//! Rather than pick `λ`, the engine spreads the initial wealth over a grid of
//! constant bets and tracks every one of them:
//!
//! ```text
//!     K_n = sum_i ν_i prod_{t <= n} (1 + λ_i f_t(Z_t))
//! ```
//!
//! Under the null `K_n` is a nonnegative martingale, so by Ville's inequality
//! `P(sup_n K_n >= 1/α) <= α`, and stopping at the first crossing gives a
//! level-α test that can be monitored continuously.
//!
//! Per-bet wealths are kept in log space and mixed with a log-sum-exp, since
//! under the alternative they grow exponentially.

mod driver;
mod grid;
mod wealth;

pub use driver::{
    run_sequential, BetSide, FixedPayoff, Payoff, PayoffStrategy, SequentialTest, Status, TestOutcome,
};
pub use grid::{BetGrid, DEFAULT_GRID_POINTS, ONE_SIDED_TOP, TWO_SIDED_LIMIT};
pub use wealth::{should_stop, HedgedWealthState, WealthState};
