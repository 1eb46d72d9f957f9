//! One-dimensional uncentred maximal averages over windows of consecutive
//! cells.
//!
//! For a sequence `v` with cell weights `w`, the value at `i` is the maximum
//! over `a ≤ i ≤ b` of `Σ_{a..=b} wₖvₖ / Σ_{a..=b} wₖ`. Both implementations
//! form the window sums by accumulating left to right from `a`, and a
//! single-cell window is taken to average to `vᵢ` itself, so they agree bit
//! for bit.

/// Average of the window starting at `a` whose running sums are `sum`,
/// `weight`, and whose last cell is `b`.
#[inline]
fn window_average(values: &[f64], a: usize, b: usize, sum: f64, weight: f64) -> f64 {
    if a == b {
        values[a]
    } else {
        sum / weight
    }
}

/// `O(m²)` sweep: for each start `a`, running sums give every window
/// `[a, b]`; a suffix maximum over `b` then covers all `i ∈ [a, b]`.
pub fn window_maximal(values: &[f64], weights: &[f64], out: &mut [f64]) {
    let m = values.len();
    debug_assert!(weights.len() == m && out.len() == m);
    out.fill(0.0);
    let mut averages = alloc::vec![0.0; m];
    for a in 0..m {
        let (mut sum, mut weight) = (0.0, 0.0);
        for b in a..m {
            sum += weights[b] * values[b];
            weight += weights[b];
            averages[b] = window_average(values, a, b, sum, weight);
        }
        let mut best = f64::NEG_INFINITY;
        for i in (a..m).rev() {
            best = best.max(averages[i]);
            out[i] = out[i].max(best);
        }
    }
}

/// Reference enumeration: every `(i, a, b)` with `a ≤ i ≤ b` separately.
pub fn window_maximal_exhaustive(values: &[f64], weights: &[f64], out: &mut [f64]) {
    let m = values.len();
    for i in 0..m {
        let mut best = 0.0f64;
        for a in 0..=i {
            for b in i..m {
                let mut sum = 0.0;
                let mut weight = 0.0;
                for k in a..=b {
                    sum += weights[k] * values[k];
                    weight += weights[k];
                }
                best = best.max(window_average(values, a, b, sum, weight));
            }
        }
        out[i] = best;
    }
}
