//! Betting tests for stochastic dominance and symmetry.

pub mod dominance;
pub mod symmetry;

pub use dominance::{dominance_payoff, dominance_witness, integrated_cdf, DominancePlugin};
pub use symmetry::{symmetry_payoff, SymmetryPlugin};
