//! Norm comparison between the Sobolev norm and the pointwise-gradient
//! norms.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;

use super::optimal::{optimal_gradient_with, Cloud, OptimalGradient, SolverOptions};
use super::{cloud_pairs, constructive_parts, GradientParts, PairDescriptor, PairSet};
use crate::fields::{sobolev_norm, Exponent, GridFunction, NormReport};
use crate::geometry::CuspDomain;
use crate::rng::{stream, stream_rng};
use crate::{Error, Result};

const STRATA: usize = 10;

/// Cloud of about `size` grid nodes with equal counts per tenth of the
/// grid's t-range, so the tip is represented. Each node carries its
/// stratum's weight divided by the number of nodes drawn from it.
pub fn stratified_cloud(u: &GridFunction<'_>, size: usize, seed: u64) -> Result<Cloud> {
    stratified_cloud_with(u, size, seed, &[])
}

/// [`stratified_cloud`] that always contains the `forced` nodes; they count
/// towards their stratum's quota and share its weight.
pub fn stratified_cloud_with(u: &GridFunction<'_>, size: usize, seed: u64, forced: &[u32]) -> Result<Cloud> {
    let grid = u.grid();
    if size == 0 {
        return Err(Error::InvalidArgument("cloud size must be positive".into()));
    }
    if let Some(bad) = forced.iter().find(|&&i| i as usize >= grid.len()) {
        return Err(Error::InvalidArgument(format!("forced node {bad} is not on the grid")));
    }
    let t0 = grid.t_min();
    let span = grid.slices() as f64 * grid.h_t();
    let stratum_of = |s: usize| (((grid.lattice().t(s) - t0) / span * STRATA as f64) as usize).min(STRATA - 1);
    let mut strata: Vec<Vec<u32>> = (0..STRATA).map(|_| Vec::new()).collect();
    let mut pinned: Vec<Vec<u32>> = (0..STRATA).map(|_| Vec::new()).collect();
    for s in 0..grid.slices() {
        let k = stratum_of(s);
        for i in grid.slice_nodes(s) {
            if forced.contains(&(i as u32)) {
                if !pinned[k].contains(&(i as u32)) {
                    pinned[k].push(i as u32);
                }
            } else {
                strata[k].push(i as u32);
            }
        }
    }
    let mut rng = stream_rng(seed, stream::CLOUD);
    let mut nodes = Vec::with_capacity(size + forced.len());
    let mut weights = Vec::with_capacity(size + forced.len());
    for k in 0..STRATA {
        let members = &strata[k];
        let want = size / STRATA + usize::from(k < size % STRATA);
        let take = want.saturating_sub(pinned[k].len()).min(members.len());
        let mut picked: Vec<u32> = index::sample(&mut rng, members.len(), take).iter().map(|i| members[i]).collect();
        picked.extend_from_slice(&pinned[k]);
        if picked.is_empty() {
            continue;
        }
        picked.sort_unstable();
        let total: f64 = members.iter().chain(&pinned[k]).map(|&i| grid.weights()[i as usize]).sum();
        let w = total / picked.len() as f64;
        for i in picked {
            nodes.push(i);
            weights.push(w);
        }
    }
    Cloud::from_grid_nodes(u, &nodes, weights)
}

/// One grid function compared across exponents.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub norms: NormReport,
    /// Constant certified for `ĝ` on the default pairs and the cloud pairs.
    pub certified_constant: f64,
    pub pairs: PairDescriptor,
    /// `‖C·ĝ‖_p` on the cloud; bounds `optimal.norm` from above.
    pub cloud_constructive: f64,
    pub optimal: OptimalGradient,
    pub cloud_size: usize,
    pub thin_slices: usize,
}

/// Everything that does not depend on `p`: `ĝ`, its certified constant and
/// the cloud.
pub struct EquivalenceStudy<'a, 'g> {
    u: &'a GridFunction<'g>,
    pub parts: GradientParts<'g>,
    pub g: GridFunction<'g>,
    pub certified_constant: f64,
    pub pairs: PairDescriptor,
    pub cloud: Cloud,
}

impl<'a, 'g> EquivalenceStudy<'a, 'g> {
    /// Certifies `ĝ` on `pairs` together with all pairs of the stratified
    /// cloud, so that `C·ĝ` is feasible for the cloud problem.
    pub fn new(u: &'a GridFunction<'g>, domain: &CuspDomain, mut pairs: PairSet, cloud_size: usize, seed: u64) -> Result<Self> {
        let parts = constructive_parts(u, domain)?;
        let g = parts.total();
        let cloud = stratified_cloud(u, cloud_size, seed)?;
        pairs.extend(&cloud_pairs(cloud.nodes().unwrap_or(&[])));
        let certified_constant = super::certify_pointwise(u, &g, &pairs);
        Ok(Self { u, parts, g, certified_constant, pairs: pairs.descriptor(), cloud })
    }

    pub fn report(&self, p: Exponent, opts: &SolverOptions) -> Result<EquivalenceReport> {
        let sob = sobolev_norm(self.u, p)?;
        let c = self.certified_constant;
        let scaled = self.g.scale(c);
        let lp_u = sob.lp_u;
        let nodes = self.cloud.nodes().unwrap_or(&[]);
        let on_cloud: Vec<f64> = nodes.iter().map(|&i| scaled.values()[i as usize]).collect();
        let optimal = optimal_gradient_with(&self.cloud, p, opts)?;
        let norms = NormReport {
            p,
            lp_u,
            lp_grad: sob.lp_grad,
            sobolev: sob.sobolev,
            hajlasz_constructive: scaled.lp_norm(p) + lp_u,
            hajlasz_lower_bound: optimal.norm + self.cloud.lp_u(p),
        };
        Ok(EquivalenceReport {
            norms,
            certified_constant: c,
            pairs: self.pairs.clone(),
            cloud_constructive: self.cloud.lp_norm(&on_cloud, p),
            optimal,
            cloud_size: self.cloud.len(),
            thin_slices: self.parts.thin_slices,
        })
    }
}

/// [`EquivalenceStudy`] on the default pairs for `seed`, reported at `p`.
pub fn norm_equivalence_report(
    u: &GridFunction<'_>,
    domain: &CuspDomain,
    p: Exponent,
    cloud_size: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    let study = EquivalenceStudy::new(u, domain, PairSet::default_for(u.grid(), seed), cloud_size, seed)?;
    study.report(p, &SolverOptions::default())
}
