//! Asymptotic null quantiles for the batch tests.

use statrs::function::gamma::gamma_ur;

use crate::error::{invalid, Result};

/// Bracket for the Kolmogorov quantile; values of `α` whose quantile falls
/// outside are clamped to the nearer end.
pub const KOLMOGOROV_BRACKET: (f64, f64) = (0.2, 3.0);

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

/// `P(sup|B| > s) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² s²)`, truncated once a
/// term drops below `1e-12`.
pub fn kolmogorov_survival(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    let mut total = 0.0;
    let mut sign = 1.0;
    for k in 1..=1000u32 {
        let term = (-2.0 * (k * k) as f64 * s * s).exp();
        total += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * total).clamp(0.0, 1.0)
}

/// Upper `α` quantile of the Kolmogorov distribution, by bisection.
pub fn kolmogorov_quantile(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let (mut lo, mut hi) = KOLMOGOROV_BRACKET;
    if kolmogorov_survival(lo) <= alpha {
        return Ok(lo);
    }
    if kolmogorov_survival(hi) >= alpha {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Upper `α` quantile of the χ² distribution with `df` degrees of freedom,
/// by bisection on the regularised upper incomplete gamma function.
pub fn chi2_quantile(df: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if df == 0 {
        return Err(invalid("df", "must be positive"));
    }
    let a = df as f64 / 2.0;
    let tail = |x: f64| gamma_ur(a, x / 2.0);
    let mut hi = df as f64 + 10.0;
    while tail(hi) > alpha {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
