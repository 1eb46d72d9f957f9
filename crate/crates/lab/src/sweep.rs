//! Norm-equivalence sweep over `(s, p, level)`.

use std::io::Write;

use cusp_core::hajlasz::{EquivalenceStudy, SolverOptions};
use cusp_core::{build_grid, sample_function, Exponent};
use rayon::prelude::*;

use crate::config::ExperimentConfig;

pub const SWEEP_HEADER: [&str; 15] = [
    "experiment",
    "n",
    "s",
    "p",
    "level",
    "h_t",
    "h_x",
    "lp_u",
    "lp_grad",
    "sobolev",
    "hajlasz_constructive",
    "hajlasz_lower_bound",
    "certified_constant",
    "below_romanov",
    "error",
];

/// `(1 + (n−1)s)/n`.
pub fn romanov_threshold(n: usize, s: f64) -> f64 {
    (1.0 + (n as f64 - 1.0) * s) / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub experiment: String,
    pub n: usize,
    pub s: f64,
    pub p: Exponent,
    pub level: u32,
    pub h_t: f64,
    pub h_x: f64,
    pub values: Option<RowValues>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowValues {
    pub lp_u: f64,
    pub lp_grad: f64,
    pub sobolev: f64,
    pub hajlasz_constructive: f64,
    pub hajlasz_lower_bound: f64,
    pub certified_constant: f64,
    /// Cloud norm of `C·ĝ`; the optimal norm never exceeds it.
    pub cloud_constructive: f64,
    pub optimal_norm: f64,
}

impl SweepRow {
    pub fn below_romanov(&self) -> bool {
        !self.s.is_nan() && self.p.value() <= romanov_threshold(self.n, self.s)
    }

    pub fn record(&self) -> Vec<String> {
        let f = |x: f64| x.to_string();
        let v = self.values.as_ref();
        let col = |get: fn(&RowValues) -> f64| v.map(|r| f(get(r))).unwrap_or_default();
        vec![
            self.experiment.clone(),
            self.n.to_string(),
            f(self.s),
            self.p.to_string(),
            self.level.to_string(),
            f(self.h_t),
            f(self.h_x),
            col(|r| r.lp_u),
            col(|r| r.lp_grad),
            col(|r| r.sobolev),
            col(|r| r.hajlasz_constructive),
            col(|r| r.hajlasz_lower_bound),
            col(|r| r.certified_constant),
            self.below_romanov().to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// All rows for one `(s, level)`: the study is shared across exponents.
fn run_job(cfg: &ExperimentConfig, s: f64, level: u32) -> Vec<SweepRow> {
    let exps = cfg.exponents();
    let spec = cfg.grid_spec(level - 1);
    let (h_t, h_x) = spec.as_ref().map(|g| (g.h_t, g.h_x)).unwrap_or((f64::NAN, f64::NAN));
    let row = |p: Exponent, values: Option<RowValues>, error: Option<String>| SweepRow {
        experiment: cfg.experiment.clone(),
        n: cfg.n,
        s,
        p,
        level,
        h_t,
        h_x,
        values,
        error,
    };
    let study = || -> anyhow::Result<Vec<anyhow::Result<RowValues>>> {
        let domain = cfg.domain_for(s)?;
        let grid = build_grid(&domain, &spec?)?;
        let u = sample_function(&grid, &cfg.family()?)?;
        let seed = cfg.seed;
        let st = EquivalenceStudy::new(&u, &domain, cfg.pairs.build(&grid, seed), cfg.cloud_size, seed)?;
        let opts = SolverOptions::default();
        Ok(exps
            .iter()
            .map(|&p| {
                let r = st.report(p, &opts)?;
                Ok(RowValues {
                    lp_u: r.norms.lp_u,
                    lp_grad: r.norms.lp_grad,
                    sobolev: r.norms.sobolev,
                    hajlasz_constructive: r.norms.hajlasz_constructive,
                    hajlasz_lower_bound: r.norms.hajlasz_lower_bound,
                    certified_constant: r.certified_constant,
                    cloud_constructive: r.cloud_constructive,
                    optimal_norm: r.optimal.norm,
                })
            })
            .collect())
    };
    match study() {
        Ok(results) => exps
            .iter()
            .zip(results)
            .map(|(&p, r)| match r {
                Ok(v) => row(p, Some(v), None),
                Err(e) => row(p, None, Some(format!("{e:#}"))),
            })
            .collect(),
        Err(e) => {
            let msg = format!("{e:#}");
            exps.iter().map(|&p| row(p, None, Some(msg.clone()))).collect()
        }
    }
}

/// Rows ordered by `s`, then `p`, then level, as listed in the config.
pub fn run_equivalence_sweep(cfg: &ExperimentConfig) -> Vec<SweepRow> {
    let s_list = cfg.s_list();
    let jobs: Vec<(usize, u32)> =
        (0..s_list.len()).flat_map(|i| (1..=cfg.levels).map(move |l| (i, l))).collect();
    let done: Vec<Vec<SweepRow>> = jobs.par_iter().map(|&(i, l)| run_job(cfg, s_list[i], l)).collect();
    let np = cfg.p.len();
    let nl = cfg.levels as usize;
    let mut rows = Vec::with_capacity(done.len() * np);
    for i in 0..s_list.len() {
        for k in 0..np {
            for l in 0..nl {
                rows.push(done[i * nl + l][k].clone());
            }
        }
    }
    rows
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(romanov_threshold(2, 4.0), 2.5);
        assert_eq!(romanov_threshold(2, 1.0), 1.0);
        assert_eq!(romanov_threshold(3, 2.0), 5.0 / 3.0);
    }

    #[test]
    fn small_sweep_is_complete_and_ordered() {
        let cfg = ExperimentConfig::parse(
            r#"
experiment = "unit"
n = 2
profile = { kind = "power", a = 1.0, s = 2.0 }
s_values = [1.0, 4.0]
h = 0.25
family = { kind = "power_t", alpha = 0.3 }
p = [1.2, inf]
levels = 2
cloud_size = 20
seed = 3
"#,
        )
        .unwrap();
        let rows = run_equivalence_sweep(&cfg);
        assert_eq!(rows.len(), 8);
        let keys: Vec<(f64, String, u32)> = rows.iter().map(|r| (r.s, r.p.to_string(), r.level)).collect();
        assert_eq!(keys[0], (1.0, "1.2".into(), 1));
        assert_eq!(keys[1], (1.0, "1.2".into(), 2));
        assert_eq!(keys[2], (1.0, "inf".into(), 1));
        assert_eq!(keys[4], (4.0, "1.2".into(), 1));
        assert!(rows.iter().all(|r| r.error.is_none()), "{rows:?}");
        assert!(rows[4].below_romanov() && !rows[6].below_romanov());
        assert!(!rows[0].below_romanov());
        for r in &rows {
            let v = r.values.unwrap();
            assert!(v.optimal_norm <= v.cloud_constructive * (1.0 + 1e-9), "{r:?}");
        }
    }
}
