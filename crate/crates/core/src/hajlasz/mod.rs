//! Pointwise (Hajłasz) gradients.
//!
//! A nonnegative `g` is a pointwise gradient of `u` with constant `C` on a
//! set of pairs when `|u(z₁) − u(z₂)| ≤ C·|z₁ − z₂|·(g(z₁) + g(z₂))` for every
//! pair. This module builds `g` from maximal functions of the gradient,
//! certifies the smallest `C` on a pair set, and computes the minimal-norm
//! `g` on small point clouds.

mod optimal;
mod pairs;
mod report;

use alloc::vec::Vec;

pub use optimal::{optimal_gradient, optimal_gradient_with, Cloud, OptimalGradient, SolverOptions, DEFAULT_CLOUD_BUDGET};
pub use pairs::{PairDescriptor, PairSet, PairStrategy, ALL_PAIRS_LIMIT, DEFAULT_RANDOM_PAIRS};
pub use report::{
    norm_equivalence_report, stratified_cloud, stratified_cloud_with, EquivalenceReport, EquivalenceStudy,
};

use crate::extension::extend_domain;
use crate::fields::{weak_gradient, GridFunction};
use crate::geometry::CuspDomain;
use crate::maximal::{m_chi_interval, m_chi_on_grid, m_tau, m_tau_with, Algorithm};
use crate::math;
use crate::Result;

/// `g` together with the constant certified for it.
#[derive(Debug, Clone)]
pub struct HajlaszWitness<'g> {
    pub g: GridFunction<'g>,
    pub certified_constant: f64,
    pub pairs: PairDescriptor,
}

/// Worst pair of a certification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub constant: f64,
    pub worst: Option<(u32, u32)>,
}

/// Smallest `C` with `|Δu| ≤ C·|Δz|·(g₁ + g₂)` over `pairs`.
///
/// Pairs with `Δu = 0` are skipped; a vanishing right-hand side with
/// `Δu ≠ 0` gives `+∞`.
pub fn certify_pointwise(u: &GridFunction<'_>, g: &GridFunction<'_>, pairs: &PairSet) -> f64 {
    certify_detailed(u, g, pairs).constant
}

pub fn certify_detailed(u: &GridFunction<'_>, g: &GridFunction<'_>, pairs: &PairSet) -> Certificate {
    let grid = u.grid();
    let n = grid.dim();
    let points = grid.points();
    let (uv, gv) = (u.values(), g.values());
    let mut best = Certificate { constant: 0.0, worst: None };
    for &(i, j) in pairs.pairs() {
        let (i, j) = (i as usize, j as usize);
        let du = math::abs(uv[i] - uv[j]);
        if du == 0.0 {
            continue;
        }
        let dz = math::dist(&points[i * n..(i + 1) * n], &points[j * n..(j + 1) * n]);
        let den = dz * (gv[i] + gv[j]);
        let ratio = if den > 0.0 { du / den } else { f64::INFINITY };
        if ratio > best.constant {
            best = Certificate { constant: ratio, worst: Some((i as u32, j as u32)) };
        }
    }
    best
}

/// The three terms of the constructive gradient.
#[derive(Debug, Clone)]
pub struct GradientParts<'g> {
    /// `Mτ|∇u|`.
    pub tau: GridFunction<'g>,
    /// `Mχ|∇χ ũ|` on the grid (raw centred values for `n ≥ 3`).
    pub chi: GridFunction<'g>,
    /// `Mτ[Mχ|∇χ ũ|]`.
    pub tau_chi: GridFunction<'g>,
    /// Slices extended as constants.
    pub thin_slices: usize,
}

impl<'g> GradientParts<'g> {
    pub fn total(&self) -> GridFunction<'g> {
        self.tau.add(&self.chi).add(&self.tau_chi)
    }
}

/// `ĝ = Mτ|∇u| + Mχ|∇χ ũ| + Mτ[Mχ|∇χ ũ|]` with `ũ` the slice-wise extension.
pub fn constructive_parts<'g>(u: &GridFunction<'g>, domain: &CuspDomain) -> Result<GradientParts<'g>> {
    let grid = u.grid();
    let grad = weak_gradient(u)?.magnitude();
    let tau = m_tau(&grad).function;
    let ext = extend_domain(u, domain)?;
    let chi_grad = ext.chi_gradient_magnitude();
    let chi = m_chi_on_grid(&chi_grad, grid, Algorithm::Fast, None)?.function;
    let tau_chi = m_tau_with(&chi, Algorithm::Fast).function;
    Ok(GradientParts { tau, chi, tau_chi, thin_slices: ext.thin_slices })
}

/// [`constructive_parts`] certified on the default pair set for `seed`.
pub fn constructive_gradient<'g>(u: &GridFunction<'g>, domain: &CuspDomain, seed: u64) -> Result<HajlaszWitness<'g>> {
    constructive_gradient_with(u, domain, &PairSet::default_for(u.grid(), seed))
}

pub fn constructive_gradient_with<'g>(
    u: &GridFunction<'g>,
    domain: &CuspDomain,
    pairs: &PairSet,
) -> Result<HajlaszWitness<'g>> {
    let g = constructive_parts(u, domain)?.total();
    Ok(witness(u, g, pairs))
}

fn witness<'g>(u: &GridFunction<'g>, g: GridFunction<'g>, pairs: &PairSet) -> HajlaszWitness<'g> {
    let certified_constant = certify_pointwise(u, &g, pairs);
    HajlaszWitness { g, certified_constant, pairs: pairs.descriptor() }
}

/// Planar variant `g = Mτ|∇u| + M̃χ|∇u|`; needs no extension.
pub fn constructive_gradient_2d<'g>(u: &GridFunction<'g>, seed: u64) -> Result<HajlaszWitness<'g>> {
    constructive_gradient_2d_with(u, &PairSet::default_for(u.grid(), seed))
}

pub fn constructive_gradient_2d_with<'g>(u: &GridFunction<'g>, pairs: &PairSet) -> Result<HajlaszWitness<'g>> {
    let grad = weak_gradient(u)?.magnitude();
    let chi = m_chi_interval(&grad)?.function;
    let g = m_tau(&grad).function.add(&chi);
    Ok(witness(u, g, pairs))
}

/// Pairs of a cloud, as grid node pairs.
pub fn cloud_pairs(nodes: &[u32]) -> PairSet {
    let mut pairs = Vec::with_capacity(nodes.len() * nodes.len().saturating_sub(1) / 2);
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            pairs.push((i, j));
        }
    }
    PairSet::from_pairs(pairs)
}

#[cfg(test)]
mod tests;
