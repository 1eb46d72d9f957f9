//! Experiment configuration (TOML).
//!
//! ```toml
//! experiment = "cusp-s"
//! n = 2
//! profile = { kind = "power", a = 1.0, s = 2.0 }
//! s_values = [1.0, 2.0, 4.0]     # optional, overrides the power exponent
//! h = 0.0625                     # or h_t / h_x
//! family = { kind = "power_t", alpha = 0.3 }
//! p = [1.2, 2.0, 4.0, inf]
//! levels = 2
//! pairs = "default"              # all | adversarial | random:N | default
//! cloud_size = 60
//! seed = 7
//! node_budget = 2000000           # optional
//! radii = [0.1, 0.05, 0.025]     # density probe
//! samples = 200000
//! quadrature_cells = 200000
//! ```
//!
//! Unknown keys are errors.

use std::path::Path;

use cusp_core::{CuspDomain, CuspProfile, Exponent, Family, Grid, GridSpec, PairSet};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Power { a: f64, s: f64 },
    Table { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Linear {
        c_t: f64,
        #[serde(default)]
        c_x: Vec<f64>,
    },
    PowerT { alpha: f64 },
    Radial { beta: f64 },
    Angle,
}

impl FamilySpec {
    pub fn to_family(&self) -> Family {
        match self {
            FamilySpec::Linear { c_t, c_x } => Family::Linear { c_t: *c_t, c_x: c_x.clone() },
            FamilySpec::PowerT { alpha } => Family::PowerT { alpha: *alpha },
            FamilySpec::Radial { beta } => Family::Radial { beta: *beta },
            FamilySpec::Angle => Family::AngleSlit,
        }
    }
}

/// Pair strategy as written in the config or on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSpec {
    Default,
    All,
    Adversarial,
    Random(usize),
}

impl PairSpec {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "default" => Ok(PairSpec::Default),
            "all" => Ok(PairSpec::All),
            "adversarial" => Ok(PairSpec::Adversarial),
            _ => match s.strip_prefix("random:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(PairSpec::Random(n)),
                _ => invalid(format!("unknown pair strategy `{s}` (all, adversarial, default, random:N)")),
            },
        }
    }

    pub fn build(self, grid: &Grid, seed: u64) -> PairSet {
        match self {
            PairSpec::Default => PairSet::default_for(grid, seed),
            PairSpec::All => PairSet::all(grid),
            PairSpec::Adversarial => PairSet::adversarial(grid),
            PairSpec::Random(n) => PairSet::random(grid, n, seed),
        }
    }
}

impl<'de> Deserialize<'de> for PairSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PairSpec::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn default_levels() -> u32 {
    1
}
fn default_pairs() -> PairSpec {
    PairSpec::Default
}
fn default_cloud() -> usize {
    60
}
fn default_samples() -> usize {
    200_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub n: usize,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub s_values: Option<Vec<f64>>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub h_t: Option<f64>,
    #[serde(default)]
    pub h_x: Option<f64>,
    #[serde(default)]
    pub t_min: Option<f64>,
    #[serde(default)]
    pub node_budget: Option<usize>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default = "default_levels")]
    pub levels: u32,
    #[serde(default = "default_pairs")]
    pub pairs: PairSpec,
    #[serde(default = "default_cloud")]
    pub cloud_size: usize,
    pub seed: u64,
    /// Ball radii of the density probe.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Midpoint slices of the density quadrature.
    #[serde(default)]
    pub quadrature_cells: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return invalid(format!("n must be at least 2, got {}", self.n));
        }
        if self.levels == 0 {
            return invalid("levels must be at least 1");
        }
        if self.s_values.is_some() && !matches!(self.profile, ProfileSpec::Power { .. }) {
            return invalid("s_values needs a power profile");
        }
        for s in self.s_list() {
            self.profile_for(s)?;
        }
        if self.h.is_some() && (self.h_t.is_some() || self.h_x.is_some()) {
            return invalid("give either h or h_t/h_x, not both");
        }
        if self.h.is_none() && (self.h_t.is_none() != self.h_x.is_none()) {
            return invalid("h_t and h_x must be given together");
        }
        for h in [self.h, self.h_t, self.h_x].into_iter().flatten() {
            if !(h > 0.0 && h < 2.0) {
                return invalid(format!("grid spacing must lie in (0, 2), got {h}"));
            }
        }
        for &p in &self.p {
            if Exponent::new(p).is_err() {
                return invalid(format!("exponent must be at least 1 (or inf), got {p}"));
            }
        }
        if let Some(FamilySpec::Linear { c_x, .. }) = &self.family {
            if c_x.len() >= self.n {
                return invalid(format!("linear family has {} x-coefficients for n = {}", c_x.len(), self.n));
            }
        }
        if self.cloud_size == 0 {
            return invalid("cloud_size must be positive");
        }
        if self.samples == 0 || self.quadrature_cells == Some(0) {
            return invalid("samples and quadrature_cells must be positive");
        }
        for &r in &self.radii {
            if !(r > 0.0 && r < 1.0) {
                return invalid(format!("radii must lie in (0, 1), got {r}"));
            }
        }
        Ok(())
    }

    /// Power exponents to run; a table profile is a single entry.
    pub fn s_list(&self) -> Vec<f64> {
        match (&self.s_values, &self.profile) {
            (Some(list), _) => list.clone(),
            (None, ProfileSpec::Power { s, .. }) => vec![*s],
            (None, ProfileSpec::Table { .. }) => vec![f64::NAN],
        }
    }

    pub fn profile_for(&self, s: f64) -> Result<CuspProfile, ConfigError> {
        let profile = match &self.profile {
            ProfileSpec::Power { a, s: s0 } => CuspProfile::power(*a, if s.is_nan() { *s0 } else { s }),
            ProfileSpec::Table { points } => {
                let pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
                CuspProfile::table(&pts)
            }
        };
        profile.map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn domain_for(&self, s: f64) -> Result<CuspDomain, ConfigError> {
        CuspDomain::new(self.n, self.profile_for(s)?).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn family(&self) -> Result<Family, ConfigError> {
        match &self.family {
            Some(f) => Ok(f.to_family()),
            None => invalid("this experiment needs a `family`"),
        }
    }

    pub fn exponents(&self) -> Vec<Exponent> {
        self.p.iter().map(|&p| Exponent::new(p).expect("validated")).collect()
    }

    /// Grid spacing at refinement level `level` (0 = as configured).
    pub fn grid_spec(&self, level: u32) -> Result<GridSpec, ConfigError> {
        let (ht, hx) = match (self.h, self.h_t, self.h_x) {
            (Some(h), _, _) => (h, h),
            (None, Some(a), Some(b)) => (a, b),
            _ => return invalid("grid spacing missing: set h or h_t/h_x"),
        };
        let mut spec = GridSpec::new(ht, hx);
        if let Some(t) = self.t_min {
            spec = spec.with_t_min(t);
        }
        if let Some(b) = self.node_budget {
            spec = spec.with_budget(b);
        }
        Ok(spec.refined(level))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
experiment = "t"
n = 2
profile = { kind = "power", a = 1.0, s = 2.0 }
h = 0.125
family = { kind = "power_t", alpha = 0.3 }
p = [1.2, 2.0, inf]
seed = 1
"#;

    #[test]
    fn parses_the_basic_shape() {
        let c = ExperimentConfig::parse(BASE).unwrap();
        assert_eq!(c.s_list(), vec![2.0]);
        assert_eq!(c.exponents()[2], Exponent::INFINITY);
        assert_eq!(c.pairs, PairSpec::Default);
        assert_eq!(c.levels, 1);
    }

    #[test]
    fn unknown_keys_and_families_are_rejected() {
        let typo = format!("{BASE}\nlevles = 3\n");
        assert!(ExperimentConfig::parse(&typo).is_err());
        let fam = BASE.replace("power_t\", alpha = 0.3", "bessel\", order = 1");
        let err = ExperimentConfig::parse(&fam).unwrap_err().to_string();
        assert!(err.contains("bessel"), "{err}");
    }

    #[test]
    fn seed_is_required() {
        let no_seed = BASE.replace("seed = 1", "");
        assert!(ExperimentConfig::parse(&no_seed).is_err());
    }

    #[test]
    fn pair_specs() {
        assert_eq!(PairSpec::parse("random:500").unwrap(), PairSpec::Random(500));
        assert!(PairSpec::parse("random:").is_err());
        assert!(PairSpec::parse("some").is_err());
    }

    #[test]
    fn bad_exponent_and_spacing() {
        assert!(ExperimentConfig::parse(&BASE.replace("[1.2, 2.0, inf]", "[0.5]")).is_err());
        assert!(ExperimentConfig::parse(&BASE.replace("h = 0.125", "h = -1.0")).is_err());
        assert!(ExperimentConfig::parse(&BASE.replace("a = 1.0, s = 2.0", "a = 0.0, s = 2.0")).is_err());
    }
}
