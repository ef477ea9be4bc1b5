//! Fixed-sample tests evaluated on a prefix of the stream.
//!
//! - one-sample KS: `T = sqrt(n) sup|F̂_n - F_P|` against the Kolmogorov quantile,
//! - two-sample KS: `T = sqrt(nm/(n+m)) sup|F̂ - Ĝ|`, same quantile,
//! - Pearson χ²: `T = Σ (N_j - n p_j)² / (n p_j)` against `χ²_{m-1}`,
//! - kernel MMD: `T = MMD_b` against the `1-α` quantile of `T` over random
//!   relabellings of the pooled sample.
//!
//! Asymptotic quantiles are used at every `n`.

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::dist::TargetCdf;
use crate::error::{invalid, Error, Result};
use crate::two_sample::GaussianKernel;

use super::quantiles::{chi2_quantile, kolmogorov_quantile};

/// Outcome of a baseline test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineResult {
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    /// Stopping time of sequential baselines; `None` when censored or batch.
    pub tau: Option<u64>,
}

impl BaselineResult {
    pub(crate) fn batch(statistic: f64, threshold: f64) -> Self {
        Self {
            statistic,
            threshold,
            reject: statistic >= threshold,
            tau: None,
        }
    }
}

/// `sup_x |F̂(x) - F(x)|`, checking both one-sided limits at every sample
/// point so discrete targets are handled exactly. `sorted` must be ascending.
pub fn ks_distance_sorted(sorted: &[f64], target: &TargetCdf) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        let mut j = i + 1;
        while j < n && sorted[j] == v {
            j += 1;
        }
        d = d
            .max((j as f64 / nf - target.cdf(v)).abs())
            .max((i as f64 / nf - target.cdf_left(v)).abs());
        i = j;
    }
    d
}

/// `sup_x |F̂_x(x) - F̂_y(x)|` for two ascending samples.
pub fn ks_distance_two_sorted(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.is_empty() || ys.is_empty() {
        return 0.0;
    }
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

fn sorted_copy(v: &[f64]) -> Result<Vec<f64>> {
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::WrongObservation("NaN observation".into()));
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

pub fn batch_ks1(samples: &[f64], target: &TargetCdf, alpha: f64) -> Result<BaselineResult> {
    if samples.is_empty() {
        return Err(invalid("samples", "need at least one observation"));
    }
    let d = ks_distance_sorted(&sorted_copy(samples)?, target);
    let stat = (samples.len() as f64).sqrt() * d;
    Ok(BaselineResult::batch(stat, kolmogorov_quantile(alpha)?))
}

pub fn batch_ks2(xs: &[f64], ys: &[f64], alpha: f64) -> Result<BaselineResult> {
    if xs.is_empty() || ys.is_empty() {
        return Err(invalid("samples", "need at least one observation per side"));
    }
    let d = ks_distance_two_sorted(&sorted_copy(xs)?, &sorted_copy(ys)?);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let stat = (n * m / (n + m)).sqrt() * d;
    Ok(BaselineResult::batch(stat, kolmogorov_quantile(alpha)?))
}

/// Pearson χ² from symbol counts.
pub fn batch_chi2(counts: &[u64], p: &[f64], alpha: f64) -> Result<BaselineResult> {
    if counts.len() != p.len() || p.len() < 2 {
        return Err(invalid(
            "counts",
            "need one count per symbol and at least two symbols",
        ));
    }
    if p.iter().any(|&v| !(v > 0.0)) {
        return Err(invalid("p", "every symbol needs positive mass"));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(invalid("counts", "need at least one observation"));
    }
    let nf = n as f64;
    let stat: f64 = counts
        .iter()
        .zip(p)
        .map(|(&c, &pj)| {
            let e = nf * pj;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    Ok(BaselineResult::batch(
        stat,
        chi2_quantile(p.len() as u32 - 1, alpha)?,
    ))
}

/// Kernel MMD with a permutation threshold over `n_boot` relabellings.
///
/// The threshold is the `ceil((1-α) n_boot)`-th smallest permuted statistic;
/// a zero statistic never rejects.
pub fn batch_mmd(
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    kernel: &GaussianKernel,
    alpha: f64,
    n_boot: usize,
    rng: &mut dyn RngCore,
) -> Result<BaselineResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    if xs.is_empty() || ys.is_empty() {
        return Err(invalid("samples", "need at least one observation per side"));
    }
    if n_boot == 0 {
        return Err(invalid("n_boot", "must be positive"));
    }
    let pooled: Vec<&Vec<f64>> = xs.iter().chain(ys).collect();
    let dim = pooled[0].len();
    if let Some(bad) = pooled.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let total = pooled.len();
    let mut gram = vec![0.0; total * total];
    for i in 0..total {
        for j in i..total {
            let k = kernel.eval_unchecked(pooled[i], pooled[j]);
            gram[i * total + j] = k;
            gram[j * total + i] = k;
        }
    }
    // MMD_b² = wᵀ K w with w = +1/n on the first sample and -1/m on the second.
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let stat_for = |w: &[f64]| {
        let mut acc = 0.0;
        for (i, &wi) in w.iter().enumerate() {
            let row = &gram[i * total..(i + 1) * total];
            let r: f64 = row.iter().zip(w).map(|(k, wj)| k * wj).sum();
            acc += wi * r;
        }
        acc.max(0.0).sqrt()
    };
    let mut w: Vec<f64> = (0..total)
        .map(|i| if i < xs.len() { 1.0 / nx } else { -1.0 / ny })
        .collect();
    let stat = stat_for(&w);
    let mut null = Vec::with_capacity(n_boot);
    for _ in 0..n_boot {
        w.shuffle(rng);
        null.push(stat_for(&w));
    }
    null.sort_by(f64::total_cmp);
    let rank = ((1.0 - alpha) * n_boot as f64).ceil() as usize;
    let threshold = null[rank.clamp(1, n_boot) - 1];
    Ok(BaselineResult {
        statistic: stat,
        threshold,
        reject: stat > 0.0 && stat >= threshold,
        tau: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ks1_at_quantile_points() {
        let p = TargetCdf::uniform01();
        let n = 200;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let r = batch_ks1(&s, &p, 0.05).unwrap();
        assert!((r.statistic - 0.5 / (n as f64).sqrt()).abs() < 1e-12);
        assert!(!r.reject);
    }

    #[test]
    fn ks1_far_left_sample_rejects() {
        let p = TargetCdf::from_spec(&DistSpec::Normal { mu: 0.0, sigma: 1.0 }).unwrap();
        let s: Vec<f64> = (0..100).map(|i| -3.0 - i as f64 * 0.01).collect();
        let r = batch_ks1(&s, &p, 0.05).unwrap();
        assert!(r.statistic > 9.8 && r.reject, "{r:?}");
    }

    #[test]
    fn ks_distance_handles_discrete_targets() {
        let p = TargetCdf::from_spec(&DistSpec::Discrete {
            support: None,
            pmf: vec![0.5, 0.5],
        })
        .unwrap();
        assert!(ks_distance_sorted(&[0.0, 1.0], &p).abs() < 1e-15);
        assert!((ks_distance_sorted(&[0.0, 0.0], &p) - 0.5).abs() < 1e-15);
        assert!((ks_distance_sorted(&[1.0, 1.0], &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks2_disjoint_samples() {
        let r = batch_ks2(&[0.1, 0.2, 0.3, 0.4], &[1.1, 1.2, 1.3, 1.4], 0.05).unwrap();
        assert_eq!(r.statistic, 2f64.sqrt());
        assert!(r.reject);
        let r = batch_ks2(&[0.1, 0.2, 0.3], &[1.1, 1.2, 1.3], 0.05).unwrap();
        assert!(!r.reject);
        assert_eq!(ks_distance_two_sorted(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
    }

    #[test]
    fn chi2_exact_counts_never_reject() {
        let r = batch_chi2(&[25, 25, 50], &[0.25, 0.25, 0.5], 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
        let a = batch_chi2(&[30, 20, 50], &[0.25, 0.25, 0.5], 0.05).unwrap();
        let b = batch_chi2(&[300, 200, 500], &[0.25, 0.25, 0.5], 0.05).unwrap();
        assert!((b.statistic - 10.0 * a.statistic).abs() < 1e-9);
    }

    #[test]
    fn mmd_identical_samples_do_not_reject() {
        let k = GaussianKernel::new(1.0).unwrap();
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.1]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = batch_mmd(&xs, &xs, &k, 0.05, 200, &mut rng).unwrap();
        assert!(r.statistic < 1e-7 && !r.reject);
    }

    #[test]
    fn mmd_separated_clouds_reject() {
        let k = GaussianKernel::new(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = DistSpec::Normal { mu: 0.0, sigma: 1.0 }
            .sampler(&mut rng)
            .unwrap();
        let xs: Vec<Vec<f64>> = (0..50).map(|_| vec![s.scalar(&mut rng)]).collect();
        let ys: Vec<Vec<f64>> = (0..50).map(|_| vec![s.scalar(&mut rng) + 3.0]).collect();
        let r = batch_mmd(&xs, &ys, &k, 0.05, 200, &mut rng).unwrap();
        assert!(r.reject, "{r:?}");
    }
}
