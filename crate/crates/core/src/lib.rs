//! Numerical machinery for first-order Sobolev functions on cuspidal domains
//!
//! ```text
//! Ω_ψ = { (t, x) ∈ (0, 2) × ℝⁿ⁻¹ : |x| < ψ(t) }
//! ```
//!
//! with ψ increasing, left-continuous and constant on `[1, 2)`.
//!
//! The crate is `no_std` (it only needs `alloc`). It provides
//!
//! * [`geometry`]: profiles, the domain, masked lattices, the measure-density
//!   probe and the two-segment quasiconvex path,
//! * [`fields`]: grid functions, finite-difference gradients and `Lᵖ` norms,
//! * [`maximal`]: the directional maximal operators `Mτ`, `Mχ` and the planar
//!   interval variant, each with an exhaustive reference implementation,
//! * [`extension`]: the slice-wise reflection extension with a smooth cutoff,
//! * [`hajlasz`]: the constructive pointwise gradient, pair certification and
//!   the convex minimal-gradient oracle.
//!
//! File formats, configuration and the experiment runner live in the
//! `cusp-lab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod extension;
pub mod fields;
pub mod geometry;
pub mod hajlasz;
pub(crate) mod math;
pub mod maximal;
pub mod rng;

pub use error::{Error, Result};
pub use extension::{
    cutoff, extend_domain, extend_slice, extension_gradient_ratio, BallSlice, ExtendedField, GradientRatio,
};
pub use fields::{
    lp_norm, sample_function, sobolev_norm, weak_gradient, Exponent, Family, GradientField,
    GridFunction, NormReport, SobolevNorm, StripFunction,
};
pub use geometry::{
    build_grid, measure_density_ratio, quasiconvex_path, CuspDomain, CuspProfile, Grid, GridSpec,
    Lattice, SliceSection,
};
pub use hajlasz::{
    certify_pointwise, constructive_gradient, constructive_gradient_2d, norm_equivalence_report,
    optimal_gradient, Cloud, HajlaszWitness, OptimalGradient, PairSet, PairStrategy,
};
pub use maximal::{m_chi, m_chi_interval, m_tau, m_tau_of_m_chi, Algorithm, MaximalResult, Operator};
