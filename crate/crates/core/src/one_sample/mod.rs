//! Strategies for testing a stream against a fully specified null `P`.

pub mod chi2;
mod ecdf;
pub mod ew;
pub mod ks;
mod simplex;

pub use chi2::{chi2_pgd_update, chi2_scale, chi2_witness, Chi2Mode, Chi2Strategy};
pub use ecdf::EmpiricalCdf;
pub use ew::{EtaSchedule, ExpWeightsKs, DEFAULT_EXPERTS};
pub use ks::{ks1_payoff, Ks1Plugin, DEFAULT_GRID_CAP, KS1_BAND};
pub use simplex::project_simplex;
