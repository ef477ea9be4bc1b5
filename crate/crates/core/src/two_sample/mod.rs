//! Strategies for testing whether two paired streams share a distribution.

pub mod kernel;
pub mod ks;
pub mod kt;
pub mod mmd;

pub use kernel::{mmd_squared_biased, GaussianKernel};
pub use ks::{ks2_payoff, Ks2Plugin, KS2_BAND};
pub use kt::{kt_fraction, kt_log_potential, KtMmd};
pub use mmd::{MmdHistory, MmdPlugin};
