//! The slit disk: unit disk in the plane minus `[0, 1) × {0}`.
//!
//! The angle function `θ/(2π)` has a bounded Sobolev norm there, but it jumps
//! by almost 1 across the slit, so any pointwise gradient must be of order
//! `1/h` on nodes next to the slit.

use std::io::Write;

use cusp_core::geometry::label_fingerprint;
use cusp_core::hajlasz::{optimal_gradient_with, stratified_cloud_with, SolverOptions};
use cusp_core::{sample_function, sobolev_norm, Exponent, Family, Grid, GridFunction, Lattice};

pub const SLIT_LABEL: &str = "slit-disk";

/// Nodes next to the slit always placed in the cloud, by first coordinate.
const STRADDLE_AT: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSpec {
    /// Spacing of the first level; level `k` uses `h0 / 2^(k−1)`.
    pub h0: f64,
    pub p: f64,
    pub cloud_size: usize,
    pub seed: u64,
}

impl Default for SlitSpec {
    fn default() -> Self {
        Self { h0: 1.0 / 16.0, p: 1.5, cloud_size: 60, seed: 0 }
    }
}

pub fn in_slit_disk(z: &[f64]) -> bool {
    let (a, b) = (z[0], z[1]);
    a * a + b * b < 1.0 && !(b == 0.0 && a >= 0.0)
}

/// Square lattice over `[−1, 1]²` masked to the slit disk.
pub fn slit_grid(h: f64) -> anyhow::Result<Grid> {
    anyhow::ensure!(h > 0.0 && h < 0.5, "slit spacing must lie in (0, 0.5), got {h}");
    let k = (1.0 / h).ceil() as usize;
    let lattice = Lattice::new(2, h, h, -(k as f64) * h, 2 * k + 1, k)?;
    Ok(Grid::from_predicate(lattice, label_fingerprint(SLIT_LABEL), usize::MAX, in_slit_disk)?)
}

/// Grid nodes at `(a, ±h)` for the straddle abscissae.
pub fn straddling_nodes(grid: &Grid) -> Vec<u32> {
    let h = grid.h_t();
    let mut out = Vec::new();
    for a in STRADDLE_AT {
        let s = ((a - grid.t_min()) / h).round() as usize;
        for j in [1, -1] {
            if let Some(node) = grid.node(s, &[j]) {
                out.push(node as u32);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlitLevel {
    pub level: u32,
    pub h: f64,
    pub nodes: usize,
    pub sobolev: f64,
    pub optimal_norm: f64,
    /// Largest `|Δu|/|Δz|` over the cloud pairs.
    pub max_slope: f64,
    pub converged: bool,
}

pub fn run_level(spec: &SlitSpec, level: u32) -> anyhow::Result<SlitLevel> {
    let h = spec.h0 / f64::powi(2.0, level as i32 - 1);
    let grid = slit_grid(h)?;
    let u: GridFunction<'_> = sample_function(&grid, &Family::AngleSlit)?;
    let p = Exponent::new(spec.p)?;
    let sob = sobolev_norm(&u, p)?;
    let cloud = stratified_cloud_with(&u, spec.cloud_size, spec.seed, &straddling_nodes(&grid))?;
    let max_slope = cloud.slopes()?.iter().map(|s| s.2).fold(0.0, f64::max);
    let opt = optimal_gradient_with(&cloud, p, &SolverOptions::default())?;
    Ok(SlitLevel {
        level,
        h,
        nodes: grid.len(),
        sobolev: sob.sobolev,
        optimal_norm: opt.norm,
        max_slope,
        converged: opt.converged,
    })
}

/// Runs levels `1..=levels` (in parallel) and returns them in order.
pub fn run_slit_counterexample(spec: &SlitSpec, levels: u32) -> anyhow::Result<Vec<SlitLevel>> {
    use rayon::prelude::*;
    anyhow::ensure!(levels >= 1, "levels must be at least 1");
    (1..=levels).into_par_iter().map(|l| run_level(spec, l)).collect()
}

pub const SLIT_HEADER: [&str; 11] = [
    "level",
    "h",
    "nodes",
    "p",
    "sobolev",
    "optimal_norm",
    "max_slope",
    "converged",
    "sobolev_ratio",
    "growth",
    "growth_from_first",
];

pub fn write_slit_csv<W: Write>(out: W, spec: &SlitSpec, rows: &[SlitLevel]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SLIT_HEADER)?;
    for (k, r) in rows.iter().enumerate() {
        let prev = k.checked_sub(1).map(|i| &rows[i]);
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            r.level.to_string(),
            r.h.to_string(),
            r.nodes.to_string(),
            spec.p.to_string(),
            r.sobolev.to_string(),
            r.optimal_norm.to_string(),
            r.max_slope.to_string(),
            r.converged.to_string(),
            opt(prev.map(|q| r.sobolev / q.sobolev)),
            opt(prev.map(|q| r.optimal_norm / q.optimal_norm)),
            (r.optimal_norm / rows[0].optimal_norm).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slit_nodes_are_removed() {
        let g = slit_grid(0.25).unwrap();
        for node in 0..g.len() {
            let z = g.point(node);
            assert!(!(z[1] == 0.0 && z[0] >= 0.0), "{z:?}");
        }
        // the negative half axis stays
        assert!((0..g.len()).any(|i| g.point(i) == vec![-0.5, 0.0]));
        assert_eq!(straddling_nodes(&g).len(), 8);
    }

    #[test]
    fn straddling_pairs_see_the_jump() {
        let g = slit_grid(0.125).unwrap();
        let u = sample_function(&g, &Family::AngleSlit).unwrap();
        let nodes = straddling_nodes(&g);
        let (up, down) = (nodes[0] as usize, nodes[1] as usize);
        let jump = (u.values()[up] - u.values()[down]).abs();
        let z = g.point(up);
        assert_eq!(z, vec![0.25, 0.125]);
        let expected = 1.0 - (z[1] / z[0]).atan() / std::f64::consts::PI;
        assert!((jump - expected).abs() < 1e-12, "{jump} vs {expected}");
    }
}
