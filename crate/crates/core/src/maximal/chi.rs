//! Slice-wise maximal averages over (n−1)-dimensional balls on a dense
//! lattice.
//!
//! For `n = 2` the balls are intervals and the uncentred supremum is computed
//! exactly with [`super::window`]. For `n ≥ 3` the centred maximal function
//! over the dyadic ladder `r ∈ {0, h, 2h, 4h, …}` is computed; the uncentred
//! operator is bounded by `2ⁿ⁻¹` times it.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::window::{window_maximal, window_maximal_exhaustive};
use super::Algorithm;
use crate::geometry::Lattice;
use crate::math;

/// Ladder radii in lattice units, `0, 1, 2, 4, …` up to the first radius
/// reaching `top` (given in length units).
pub fn dyadic_ladder(h: f64, top: f64) -> Vec<usize> {
    let mut ladder = vec![0usize];
    let mut k = 1usize;
    loop {
        ladder.push(k);
        if k as f64 * h >= top {
            break;
        }
        k *= 2;
    }
    ladder
}

/// Integer square root.
fn isqrt(v: usize) -> usize {
    let mut r = math::sqrt(v as f64) as usize;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Iterates offsets `d ∈ ℤ^dims` with `|d|² ≤ bound` calling `f(d, |d|²)`.
fn for_each_offset(dims: usize, radius: usize, bound: usize, f: &mut impl FnMut(&[i32], usize)) {
    let r = radius as i32;
    let mut d = vec![-r; dims];
    if dims == 0 {
        f(&d, 0);
        return;
    }
    loop {
        let sq: usize = d.iter().map(|v| (v * v) as usize).sum();
        if sq <= bound {
            f(&d, sq);
        }
        let mut k = dims;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if d[k] < r {
                d[k] += 1;
                break;
            }
            d[k] = -r;
        }
    }
}

/// Number of points of `ℤ^m` in the closed ball of radius `k`.
fn ball_count(m: usize, k: usize) -> usize {
    let mut count = 0usize;
    for_each_offset(m - 1, k, k * k, &mut |_, sq| {
        count += 2 * isqrt(k * k - sq) + 1;
    });
    count
}

/// Prefix sums along the last axis of one slice; row `r` occupies
/// `[r·(side+1), (r+1)·(side+1))`.
fn last_axis_prefix(slice: &[f64], side: usize) -> Vec<f64> {
    let rows = slice.len() / side;
    let mut pre = vec![0.0; rows * (side + 1)];
    for r in 0..rows {
        let base = r * (side + 1);
        for q in 0..side {
            pre[base + q + 1] = pre[base + q] + slice[r * side + q];
        }
    }
    pre
}

struct CentredSlice<'a> {
    slice: &'a [f64],
    prefix: Vec<f64>,
    side: usize,
    half: i32,
    m: usize,
}

impl<'a> CentredSlice<'a> {
    fn new(slice: &'a [f64], side: usize, m: usize) -> Self {
        Self { slice, prefix: last_axis_prefix(slice, side), side, half: (side / 2) as i32, m }
    }

    /// Row number of the leading `m − 1` coordinates, if in range.
    fn row(&self, js: &[i32]) -> Option<usize> {
        let mut r = 0usize;
        for &j in js {
            if j < -self.half || j > self.half {
                return None;
            }
            r = r * self.side + (j + self.half) as usize;
        }
        Some(r)
    }

    fn ball_sum_fast(&self, centre: &[i32], k: usize) -> f64 {
        let m = self.m;
        let mut sum = 0.0;
        let mut js = vec![0i32; m - 1];
        for_each_offset(m - 1, k, k * k, &mut |d, sq| {
            for (j, (c, o)) in js.iter_mut().zip(centre.iter().zip(d)) {
                *j = c + o;
            }
            let Some(row) = self.row(&js) else { return };
            let w = isqrt(k * k - sq) as i32;
            let lo = (centre[m - 1] - w).max(-self.half) + self.half;
            let hi = (centre[m - 1] + w).min(self.half) + self.half;
            if lo <= hi {
                let base = row * (self.side + 1);
                sum += self.prefix[base + hi as usize + 1] - self.prefix[base + lo as usize];
            }
        });
        sum
    }

    fn ball_sum_direct(&self, centre: &[i32], k: usize) -> f64 {
        let mut sum = 0.0;
        let mut js = vec![0i32; self.m];
        for (off, v) in self.slice.iter().enumerate() {
            let mut rem = off;
            for j in js.iter_mut().rev() {
                *j = (rem % self.side) as i32 - self.half;
                rem /= self.side;
            }
            let sq: i64 = js.iter().zip(centre).map(|(a, b)| ((a - b) as i64).pow(2)).sum();
            if sq as usize <= k * k {
                sum += v;
            }
        }
        sum
    }
}

/// Centred ladder maximal value at one node of a slice of `|f|` values.
pub(crate) struct CentredLadder {
    ladder: Vec<usize>,
    counts: Vec<f64>,
}

impl CentredLadder {
    pub(crate) fn new(lattice: &Lattice, top: f64) -> Self {
        let m = lattice.dim() - 1;
        let ladder = dyadic_ladder(lattice.h_x(), top);
        let counts = ladder.iter().map(|&k| ball_count(m, k) as f64).collect();
        Self { ladder, counts }
    }
}

/// Per-slice driver for the `n ≥ 3` centred operator.
pub(crate) fn centred_slice_values(
    slice: &[f64],
    lattice: &Lattice,
    ladder: &CentredLadder,
    offsets: &[usize],
    algorithm: Algorithm,
    out: &mut [f64],
) {
    let m = lattice.dim() - 1;
    let ctx = CentredSlice::new(slice, lattice.side(), m);
    let mut centre = vec![0i32; m];
    for (o, &off) in out.iter_mut().zip(offsets) {
        lattice.offset_to_multi(off, &mut centre);
        let mut best = slice[off];
        for (&k, &count) in ladder.ladder.iter().zip(&ladder.counts).skip(1) {
            let sum = match algorithm {
                Algorithm::Fast => ctx.ball_sum_fast(&centre, k),
                Algorithm::Exhaustive => ctx.ball_sum_direct(&centre, k),
            };
            best = best.max(sum / count);
        }
        *o = best;
    }
}

/// Exact uncentred maximal function of one `n = 2` slice row (all windows
/// of consecutive nodes, unit weights).
pub(crate) fn interval_row(row: &[f64], algorithm: Algorithm, out: &mut [f64]) {
    let ones = vec![1.0; row.len()];
    match algorithm {
        Algorithm::Fast => window_maximal(row, &ones, out),
        Algorithm::Exhaustive => window_maximal_exhaustive(row, &ones, out),
    }
}

/// Exact discrete uncentred maximal function of one slice, by enumeration.
///
/// Balls are `{y ∈ ℤ^m : |y − c|² ≤ ρ}` with centres `c` on the half-integer
/// lattice covering the slice and every radius realised by a slice node; the
/// average divides by all points of `ℤ^m` in the ball (zero beyond the
/// slice). Cost is roughly `(#nodes)³`, so this is for tiny slices only.
pub fn uncentred_slice_exhaustive(slice: &[f64], side: usize, m: usize, out: &mut [f64]) {
    let half = (side / 2) as i64;
    let nodes: Vec<Vec<i64>> = (0..slice.len())
        .map(|off| {
            let mut js = vec![0i64; m];
            let mut rem = off;
            for j in js.iter_mut().rev() {
                *j = (rem % side) as i64 - half;
                rem /= side;
            }
            js
        })
        .collect();
    out.copy_from_slice(slice);
    // work in half units: node y ↦ 2y, centre c ↦ 2c
    let centre_side = 4 * half as usize + 1;
    let mut cache: BTreeMap<(Vec<i64>, i64), usize> = BTreeMap::new();
    let mut c = vec![0i64; m];
    for code in 0..centre_side.pow(m as u32) {
        let mut rem = code;
        for v in c.iter_mut().rev() {
            *v = (rem % centre_side) as i64 - 2 * half;
            rem /= centre_side;
        }
        let mut radii: Vec<i64> = nodes
            .iter()
            .map(|y| y.iter().zip(&c).map(|(a, b)| (2 * a - b).pow(2)).sum())
            .collect();
        radii.sort_unstable();
        radii.dedup();
        let parity: Vec<i64> = c.iter().map(|v| v.rem_euclid(2)).collect();
        for &rho in &radii {
            let count = *cache
                .entry((parity.clone(), rho))
                .or_insert_with(|| lattice_points_in_ball(&parity, rho, m));
            let mut sum = 0.0;
            for (y, v) in nodes.iter().zip(slice) {
                let sq: i64 = y.iter().zip(&c).map(|(a, b)| (2 * a - b).pow(2)).sum();
                if sq <= rho {
                    sum += v;
                }
            }
            let avg = sum / count as f64;
            for (y, o) in nodes.iter().zip(out.iter_mut()) {
                let sq: i64 = y.iter().zip(&c).map(|(a, b)| (2 * a - b).pow(2)).sum();
                if sq <= rho && avg > *o {
                    *o = avg;
                }
            }
        }
    }
}

/// Points `y ∈ ℤ^m` with `|2y − c|² ≤ rho` for a centre of the given parity.
fn lattice_points_in_ball(parity: &[i64], rho: i64, m: usize) -> usize {
    let r = (math::sqrt(rho as f64) as i64) / 2 + 2;
    let side = (2 * r + 1) as usize;
    let mut count = 0;
    let mut y = vec![0i64; m];
    for code in 0..side.pow(m as u32) {
        let mut rem = code;
        for v in y.iter_mut() {
            *v = (rem % side) as i64 - r;
            rem /= side;
        }
        let sq: i64 = y.iter().zip(parity).map(|(a, p)| (2 * a - p).pow(2)).sum();
        if sq <= rho {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_reaches_top() {
        assert_eq!(dyadic_ladder(0.25, 1.0), vec![0, 1, 2, 4]);
        assert_eq!(dyadic_ladder(0.25, 1.1), vec![0, 1, 2, 4, 8]);
    }

    #[test]
    fn ball_counts() {
        assert_eq!(ball_count(1, 3), 7);
        assert_eq!(ball_count(2, 1), 5);
        assert_eq!(ball_count(2, 2), 13);
        assert_eq!(ball_count(3, 1), 7);
    }

    #[test]
    fn fast_ball_sum_matches_direct() {
        let side = 9;
        let slice: Vec<f64> = (0..side * side).map(|i| ((i * 37) % 11) as f64).collect();
        let ctx = CentredSlice::new(&slice, side, 2);
        for k in [1, 2, 4, 8] {
            for centre in [[0, 0], [4, -4], [-3, 2]] {
                let a = ctx.ball_sum_fast(&centre, k);
                let b = ctx.ball_sum_direct(&centre, k);
                assert!((a - b).abs() < 1e-12, "k = {k}");
            }
        }
    }

    #[test]
    fn uncentred_dominates_centred_in_one_dimension() {
        let row = [0.0, 0.0, 4.0, 0.0, 0.0];
        let mut exact = [0.0; 5];
        interval_row(&row, Algorithm::Fast, &mut exact);
        let mut enumerated = [0.0; 5];
        uncentred_slice_exhaustive(&row, 5, 1, &mut enumerated);
        assert_eq!(exact, enumerated);
    }
}
