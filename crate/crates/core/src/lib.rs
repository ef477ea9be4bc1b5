//! Sequential nonparametric hypothesis tests built on betting.
//!
//! A test is a [`betting::PayoffStrategy`] coupled to a mixture wealth
//! process; the null is rejected the first time wealth reaches `1/α`.
//! Strategies cover one-sample KS and χ² goodness of fit, two-sample KS and
//! kernel MMD, stochastic dominance and symmetry. Classical batch and
//! sequential baselines and a Monte Carlo harness sit alongside.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod betting;
mod candidate;
pub mod catalog;
pub mod cli;
pub mod dist;
pub mod error;
pub mod extensions;
pub mod observation;
pub mod one_sample;
pub mod procedure;
pub mod sim;
pub mod two_sample;

pub use candidate::{delta_f, Slack};
pub use error::{Error, Result};
