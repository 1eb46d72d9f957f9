//! Measure-density ratios along the cusp axis.

use std::io::Write;

use cusp_core::geometry::{density_quadrature, measure_density_ratio};
use rayon::prelude::*;

use crate::config::ExperimentConfig;

pub const DENSITY_HEADER: [&str; 9] =
    ["experiment", "n", "s", "r", "ratio", "std_error", "samples", "quadrature", "within_3se"];

/// Radii used when the config lists none.
pub const DEFAULT_RADII: [f64; 3] = [0.1, 0.05, 0.025];

/// Midpoint slices for the quadrature column (the probe centre is on the
/// axis, so only `t` is discretised).
pub const DEFAULT_CELLS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub s: f64,
    pub r: f64,
    pub ratio: f64,
    pub std_error: f64,
    pub samples: usize,
    pub quadrature: f64,
}

impl DensityRow {
    /// Agreement with the quadrature value. The binomial error vanishes when
    /// no sample (or every sample) hits, so it is floored at `1/samples`.
    pub fn within_3se(&self) -> bool {
        let se = self.std_error.max(1.0 / self.samples as f64);
        (self.ratio - self.quadrature).abs() <= 3.0 * se
    }
}

/// Ball centre `(2r, 0, …)`: on the axis, at height twice the radius.
pub fn probe_centre(n: usize, r: f64) -> Vec<f64> {
    let mut z = vec![0.0; n];
    z[0] = 2.0 * r;
    z
}

pub fn run_measure_density_probe(cfg: &ExperimentConfig) -> anyhow::Result<Vec<DensityRow>> {
    let radii: Vec<f64> = if cfg.radii.is_empty() { DEFAULT_RADII.to_vec() } else { cfg.radii.clone() };
    let cells = cfg.quadrature_cells.unwrap_or(DEFAULT_CELLS);
    let jobs: Vec<(f64, f64)> = cfg.s_list().into_iter().flat_map(|s| radii.iter().map(move |&r| (s, r))).collect();
    jobs.par_iter()
        .map(|&(s, r)| {
            let domain = cfg.domain_for(s)?;
            let z = probe_centre(cfg.n, r);
            let est = measure_density_ratio(&domain, &z, r, cfg.samples, cfg.seed)?;
            let quadrature = density_quadrature(&domain, &z, r, cells)?;
            Ok(DensityRow { s, r, ratio: est.ratio, std_error: est.std_error, samples: est.samples, quadrature })
        })
        .collect()
}

pub fn write_density_csv<W: Write>(out: W, cfg: &ExperimentConfig, rows: &[DensityRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DENSITY_HEADER)?;
    for r in rows {
        w.write_record([
            cfg.experiment.clone(),
            cfg.n.to_string(),
            r.s.to_string(),
            r.r.to_string(),
            r.ratio.to_string(),
            r.std_error.to_string(),
            r.samples.to_string(),
            r.quadrature.to_string(),
            r.within_3se().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
