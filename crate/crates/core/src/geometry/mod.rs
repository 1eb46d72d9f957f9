//! Cusp profiles, the domain `Ω_ψ`, masked lattices over it, and the
//! geometric probes (sections, measure density, quasiconvex paths).

mod density;
mod domain;
mod grid;
mod path;
mod profile;

pub use density::{density_quadrature, measure_density_ratio, DensityEstimate};
pub use domain::{CuspDomain, SliceSection};
pub use grid::{build_grid, Grid, GridSpec, Lattice, DEFAULT_NODE_BUDGET};
pub use path::{quasiconvex_path, Polyline};
pub use profile::{CuspProfile, ProfileKind};
pub(crate) use profile::fnv1a;

/// Fingerprint for grids whose mask does not come from a profile.
pub fn label_fingerprint(label: &str) -> u64 {
    fnv1a(label.as_bytes())
}
