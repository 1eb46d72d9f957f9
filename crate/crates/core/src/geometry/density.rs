use alloc::format;
use alloc::vec;

use rand::Rng;

use super::CuspDomain;
use crate::math;
use crate::rng::{self, stream_rng};
use crate::{Error, Result};

/// Samples per independently seeded block.
const BLOCK: usize = 4096;

/// Monte Carlo estimate of `|B(z, r) ∩ Ω| / |B(z, r)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub ratio: f64,
    /// Binomial standard error `sqrt(ratio (1 − ratio) / samples)`.
    pub std_error: f64,
    pub samples: usize,
}

/// Estimates the measure-density ratio at `z` with `samples` uniform points of
/// the ball. Block `b` draws from stream `b` of `seed`, so the estimate does
/// not depend on how blocks are scheduled.
pub fn measure_density_ratio(
    domain: &CuspDomain,
    z: &[f64],
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("measure density needs at least one sample".into()));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("radius must lie in (0, 1), got {r}")));
    }
    domain.require_inside(z, "density centre")?;

    let n = domain.dim();
    let mut point = vec![0.0; n];
    let mut offset = vec![0.0; n];
    let mut hits = 0usize;
    let blocks = samples.div_ceil(BLOCK);
    for b in 0..blocks {
        let mut rng = stream_rng(seed, rng::stream::DENSITY + b as u64);
        let count = BLOCK.min(samples - b * BLOCK);
        for _ in 0..count {
            loop {
                for o in offset.iter_mut() {
                    *o = rng.random_range(-1.0..1.0);
                }
                if offset.iter().map(|v| v * v).sum::<f64>() < 1.0 {
                    break;
                }
            }
            for ((p, c), o) in point.iter_mut().zip(z).zip(&offset) {
                *p = c + r * o;
            }
            if domain.contains(&point) {
                hits += 1;
            }
        }
    }
    let ratio = hits as f64 / samples as f64;
    Ok(DensityEstimate {
        ratio,
        std_error: math::sqrt(ratio * (1.0 - ratio) / samples as f64),
        samples,
    })
}

/// Deterministic value of the same ratio.
///
/// For a centre on the axis the ball and the domain share the centre of
/// every `t`-section, so each section is a ball of radius
/// `min(ρ(t), ψ(t))` and only `t` is discretised: `cells` midpoint slices.
/// Other centres use the midpoint rule on `cells` cells per axis of the cube
/// around the ball.
pub fn density_quadrature(domain: &CuspDomain, z: &[f64], r: f64, cells: usize) -> Result<f64> {
    if cells == 0 || !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("quadrature needs cells > 0 and r > 0 (got {cells}, {r})")));
    }
    domain.require_inside(z, "density centre")?;
    if z[1..].iter().all(|&x| x == 0.0) {
        Ok(axis_quadrature(domain, z[0], r, cells))
    } else {
        Ok(cube_quadrature(domain, z, r, cells))
    }
}

fn axis_quadrature(domain: &CuspDomain, t0: f64, r: f64, cells: usize) -> f64 {
    let m = (domain.dim() - 1) as i32;
    let step = 2.0 * r / cells as f64;
    let (mut ball, mut both) = (0.0, 0.0);
    for i in 0..cells {
        let o = -r + (i as f64 + 0.5) * step;
        let rho = math::sqrt(r * r - o * o);
        let t = t0 + o;
        ball += math::powf(rho, m as f64);
        if t > 0.0 && t < 2.0 {
            let psi = domain.profile().eval_unchecked(t);
            both += math::powf(rho.min(psi), m as f64);
        }
    }
    both / ball
}

fn cube_quadrature(domain: &CuspDomain, z: &[f64], r: f64, cells: usize) -> f64 {
    let n = domain.dim();
    let step = 2.0 * r / cells as f64;
    let mut idx = vec![0usize; n];
    let mut point = vec![0.0; n];
    let (mut ball, mut both) = (0u64, 0u64);
    loop {
        let mut d2 = 0.0;
        for k in 0..n {
            let o = -r + (idx[k] as f64 + 0.5) * step;
            d2 += o * o;
            point[k] = z[k] + o;
        }
        if d2 < r * r {
            ball += 1;
            if domain.contains(&point) {
                both += 1;
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                return both as f64 / ball as f64;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < cells {
                break;
            }
            idx[k] = 0;
        }
    }
}
