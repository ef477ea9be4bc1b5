/// Euclidean projection onto the probability simplex.
///
/// Sort descending, find the largest `k` with `v_(k) > (Σ_{j<=k} v_(j) - 1)/k`,
/// and clamp `v - θ` at zero with that threshold `θ`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        acc += s;
        let cand = (acc - 1.0) / (k + 1) as f64;
        if s - cand > 0.0 {
            theta = cand;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    // Absorb rounding so the result sums to one.
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        for x in &mut out {
            *x /= total;
        }
    }
    out
}
