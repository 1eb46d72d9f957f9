//! Minimal-norm pointwise gradient on a finite cloud.
//!
//! ```text
//! minimise  ‖g‖_{p,w} = (Σ wᵢ gᵢᵖ)^{1/p}
//! subject to gᵢ + gⱼ ≥ cᵢⱼ = |uᵢ − uⱼ| / |zᵢ − zⱼ|,   g ≥ 0
//! ```
//!
//! Finite `p ≥ 1` is solved by a primal log-barrier method with Newton
//! centring steps; iterates stay strictly feasible and the barrier parameter
//! bounds the optimality gap. `p = ∞` has the closed form `g ≡ ½·max cᵢⱼ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::fields::{lp_norm, Exponent, GridFunction};
use crate::math;
use crate::{Error, Result};

pub const DEFAULT_CLOUD_BUDGET: usize = 400;

/// Points `zᵢ ∈ ℝⁿ` with values `uᵢ` and quadrature weights `wᵢ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    dim: usize,
    points: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
    nodes: Option<Vec<u32>>,
}

impl Cloud {
    pub fn new(dim: usize, points: Vec<f64>, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if dim == 0 || points.len() != n * dim || weights.len() != n {
            return Err(Error::InvalidArgument(format!(
                "cloud of {n} values needs {} coordinates and {n} weights, got {} and {}",
                n * dim,
                points.len(),
                weights.len()
            )));
        }
        if points.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("cloud coordinates and values must be finite".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("cloud weights must be positive".into()));
        }
        Ok(Self { dim, points, values, weights, nodes: None })
    }

    /// Restriction of `u` to some grid nodes, with the given weights.
    pub fn from_grid_nodes(u: &GridFunction<'_>, nodes: &[u32], weights: Vec<f64>) -> Result<Self> {
        let grid = u.grid();
        let mut points = Vec::with_capacity(nodes.len() * grid.dim());
        let mut z = vec![0.0; grid.dim()];
        for &i in nodes {
            if i as usize >= grid.len() {
                return Err(Error::InvalidArgument(format!("node {i} is not on the grid")));
            }
            grid.point_into(i as usize, &mut z);
            points.extend_from_slice(&z);
        }
        let values = nodes.iter().map(|&i| u.values()[i as usize]).collect();
        let mut cloud = Self::new(grid.dim(), points, values, weights)?;
        cloud.nodes = Some(nodes.to_vec());
        Ok(cloud)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// Grid nodes the cloud was taken from, if any.
    pub fn nodes(&self) -> Option<&[u32]> {
        self.nodes.as_deref()
    }

    /// `(i, j, cᵢⱼ)` for every pair with `cᵢⱼ > 0`.
    pub fn slopes(&self) -> Result<Vec<(u32, u32, f64)>> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let du = math::abs(self.values[i] - self.values[j]);
                if du == 0.0 {
                    continue;
                }
                let dz = math::dist(self.point(i), self.point(j));
                if dz == 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "cloud points {i} and {j} coincide but carry different values"
                    )));
                }
                out.push((i as u32, j as u32, du / dz));
            }
        }
        Ok(out)
    }

    /// `‖v‖_{p,w}` with the cloud weights.
    pub fn lp_norm(&self, v: &[f64], p: Exponent) -> f64 {
        lp_norm(v, &self.weights, p)
    }

    /// `‖u‖_{p,w}` on the cloud.
    pub fn lp_u(&self, p: Exponent) -> f64 {
        self.lp_norm(&self.values, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest cloud accepted.
    pub budget: usize,
    /// Stop once the barrier gap bound is below `tolerance·‖g‖`.
    pub tolerance: f64,
    /// Newton steps per centring.
    pub max_newton: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_CLOUD_BUDGET, tolerance: 1e-9, max_newton: 100 }
    }
}

/// Result of [`optimal_gradient`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalGradient {
    pub g: Vec<f64>,
    pub norm: f64,
    /// The gap bound met the tolerance and every centring converged.
    pub converged: bool,
    /// Upper bound on `norm − optimum`.
    pub gap_bound: f64,
    /// `max (cᵢⱼ − gᵢ − gⱼ)⁺`; zero for strictly feasible iterates.
    pub residual: f64,
    pub newton_steps: usize,
}

pub fn optimal_gradient(cloud: &Cloud, p: Exponent) -> Result<OptimalGradient> {
    optimal_gradient_with(cloud, p, &SolverOptions::default())
}

pub fn optimal_gradient_with(cloud: &Cloud, p: Exponent, opts: &SolverOptions) -> Result<OptimalGradient> {
    let n = cloud.len();
    if n > opts.budget {
        return Err(Error::CloudBudget { size: n, budget: opts.budget });
    }
    let slopes = cloud.slopes()?;
    let c_max = slopes.iter().fold(0.0f64, |m, s| m.max(s.2));
    if c_max == 0.0 {
        return Ok(OptimalGradient {
            g: vec![0.0; n],
            norm: 0.0,
            converged: true,
            gap_bound: 0.0,
            residual: 0.0,
            newton_steps: 0,
        });
    }
    if p.is_infinite() {
        let g = vec![0.5 * c_max; n];
        return Ok(OptimalGradient {
            norm: 0.5 * c_max,
            g,
            converged: true,
            gap_bound: 0.0,
            residual: 0.0,
            newton_steps: 0,
        });
    }
    let total_w: f64 = cloud.weights.iter().sum();
    let w: Vec<f64> = cloud.weights.iter().map(|x| x / total_w).collect();
    let cons: Vec<(usize, usize, f64)> = slopes.iter().map(|&(i, j, c)| (i as usize, j as usize, c / c_max)).collect();
    let sol = Barrier::new(&w, &cons, p.value()).solve(opts);
    let g: Vec<f64> = sol.g.iter().map(|v| v * c_max).collect();
    let norm = cloud.lp_norm(&g, p);
    let scale = c_max * math::powf(total_w, 1.0 / p.value());
    let residual = slopes
        .iter()
        .fold(0.0f64, |r, &(i, j, c)| r.max(c - g[i as usize] - g[j as usize]));
    Ok(OptimalGradient {
        g,
        norm,
        converged: sol.converged,
        gap_bound: sol.gap * scale,
        residual,
        newton_steps: sol.steps,
    })
}

struct Barrier<'a> {
    w: &'a [f64],
    cons: &'a [(usize, usize, f64)],
    p: f64,
}

struct BarrierSolution {
    g: Vec<f64>,
    converged: bool,
    gap: f64,
    steps: usize,
}

impl<'a> Barrier<'a> {
    fn new(w: &'a [f64], cons: &'a [(usize, usize, f64)], p: f64) -> Self {
        Self { w, cons, p }
    }

    /// `‖g‖_{p,w}`, scaled by the maximum to avoid overflow.
    fn norm(&self, g: &[f64]) -> f64 {
        let m = g.iter().fold(0.0f64, |a, b| a.max(*b));
        if m == 0.0 {
            return 0.0;
        }
        if self.p == 1.0 {
            return g.iter().zip(self.w).map(|(x, w)| w * x).sum();
        }
        let s: f64 = g.iter().zip(self.w).map(|(x, w)| w * math::powf(x / m, self.p)).sum();
        m * math::powf(s, 1.0 / self.p)
    }

    /// Barrier objective; `+∞` outside the feasible interior.
    fn phi(&self, g: &[f64], mu: f64) -> f64 {
        if g.iter().any(|v| *v <= 0.0) {
            return f64::INFINITY;
        }
        let mut logs = 0.0;
        for &(i, j, c) in self.cons {
            let s = g[i] + g[j] - c;
            if s <= 0.0 {
                return f64::INFINITY;
            }
            logs += math::ln(s);
        }
        logs += g.iter().map(|v| math::ln(*v)).sum::<f64>();
        self.norm(g) - mu * logs
    }

    fn solve(&self, opts: &SolverOptions) -> BarrierSolution {
        let n = self.w.len();
        let total = (self.cons.len() + n) as f64;
        let mut g = vec![1.0; n];
        let mut mu = 1.0 / total;
        let mut steps = 0;
        let mut all_centred = true;
        loop {
            let (centred, k) = self.centre(&mut g, mu, opts.max_newton);
            steps += k;
            all_centred &= centred;
            let gap = total * mu;
            let f = self.norm(&g);
            if gap <= opts.tolerance * f.max(f64::MIN_POSITIVE) || mu < 1e-300 {
                return BarrierSolution { g, converged: all_centred && gap <= opts.tolerance * f, gap, steps };
            }
            if !centred && k == 0 {
                // stalled at this barrier weight
                return BarrierSolution { g, converged: false, gap, steps };
            }
            mu /= 10.0;
        }
    }

    /// Newton iterations on the barrier objective; returns whether the Newton
    /// decrement became negligible and the number of steps taken.
    fn centre(&self, g: &mut [f64], mu: f64, max_newton: usize) -> (bool, usize) {
        let n = g.len();
        let p = self.p;
        let mut grad = DVector::<f64>::zeros(n);
        let mut hess = DMatrix::<f64>::zeros(n, n);
        let mut trial = vec![0.0; n];
        for step in 0..max_newton {
            let f = self.norm(g);
            grad.fill(0.0);
            hess.fill(0.0);
            // objective
            let v: Vec<f64> = (0..n)
                .map(|i| if p == 1.0 { self.w[i] } else { self.w[i] * math::powf(g[i] / f, p - 1.0) })
                .collect();
            for i in 0..n {
                grad[i] += v[i];
            }
            if p > 1.0 {
                let k = (p - 1.0) / f;
                for i in 0..n {
                    let d = self.w[i] * math::powf(g[i] / f, p - 2.0);
                    hess[(i, i)] += k * d;
                    for j in 0..n {
                        hess[(i, j)] -= k * v[i] * v[j];
                    }
                }
            }
            // barrier
            for &(i, j, c) in self.cons {
                let s = g[i] + g[j] - c;
                let a = mu / s;
                let b = a / s;
                grad[i] -= a;
                grad[j] -= a;
                hess[(i, i)] += b;
                hess[(j, j)] += b;
                hess[(i, j)] += b;
                hess[(j, i)] += b;
            }
            for i in 0..n {
                grad[i] -= mu / g[i];
                hess[(i, i)] += mu / (g[i] * g[i]);
            }
            let Some(dir) = solve_spd(hess.clone(), &grad) else {
                return (false, step);
            };
            let dec = -grad.dot(&dir);
            let phi0 = self.phi(g, mu);
            if dec <= 1e-14 * (1.0 + math::abs(phi0)) {
                return (true, step);
            }
            // stay strictly inside
            let mut alpha = 1.0f64;
            for &(i, j, c) in self.cons {
                let ds = dir[i] + dir[j];
                if ds < 0.0 {
                    alpha = alpha.min(0.99 * (g[i] + g[j] - c) / -ds);
                }
            }
            for i in 0..n {
                if dir[i] < 0.0 {
                    alpha = alpha.min(0.99 * g[i] / -dir[i]);
                }
            }
            let slope = grad.dot(&dir);
            let mut accepted = false;
            for _ in 0..60 {
                for i in 0..n {
                    trial[i] = g[i] + alpha * dir[i];
                }
                if self.phi(&trial, mu) <= phi0 + 0.25 * alpha * slope {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                // rounding noise dominates the decrease
                return (dec <= 1e-8 * (1.0 + math::abs(phi0)), step);
            }
            g.copy_from_slice(&trial);
        }
        (false, max_newton)
    }
}

/// Solves `H x = −b` for symmetric positive definite `H`, with a small
/// diagonal shift if the factorisation fails.
fn solve_spd(hess: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let rhs = -b;
    if let Some(ch) = hess.clone().cholesky() {
        return Some(ch.solve(&rhs));
    }
    let scale = hess.diagonal().amax().max(1.0);
    let mut shift = 1e-14 * scale;
    for _ in 0..8 {
        let mut h = hess.clone();
        for i in 0..h.nrows() {
            h[(i, i)] += shift;
        }
        if let Some(ch) = h.cholesky() {
            return Some(ch.solve(&rhs));
        }
        shift *= 100.0;
    }
    None
}
