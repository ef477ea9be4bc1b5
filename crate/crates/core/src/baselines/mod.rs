//! Reference tests: fixed-sample KS, χ² and kernel MMD, and threshold-crossing
//! sequential tests. All comparisons are inclusive.

pub mod batch;
pub mod quantiles;
pub mod sequential;

pub use batch::{
    batch_chi2, batch_ks1, batch_ks2, batch_mmd, ks_distance_sorted, ks_distance_two_sorted, BaselineResult,
};
pub use quantiles::{chi2_quantile, kolmogorov_quantile, kolmogorov_survival};
pub use sequential::{
    br_threshold, default_ell, dr_threshold_1s, dr_threshold_2s, hr_constant, hr_threshold_1s,
    hr_threshold_2s, mr_mmd_threshold, BrMmd, KsBoundary, MrMmd, SequentialKs1, SequentialKs2,
};
