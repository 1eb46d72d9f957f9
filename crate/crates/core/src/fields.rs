//! Grid functions, finite-difference gradients and `Lᵖ` / Sobolev norms.
//!
//! All reductions run over nodes in grid order (t-major, then lexicographic
//! x), so results are reproducible bit for bit.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{Grid, Lattice};
use crate::math;
use crate::{Error, Result};

/// An exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidArgument(format!("exponent must be at least 1, got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `(Σ wᵢ |fᵢ|ᵖ)^{1/p}`, or `max |fᵢ|` for `p = ∞`.
///
/// Finite `p` is evaluated as `M·(Σ wᵢ (|fᵢ|/M)ᵖ)^{1/p}` with `M = max |fᵢ|`
/// so large exponents do not overflow.
pub fn lp_norm(values: &[f64], weights: &[f64], p: Exponent) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(math::abs(*v)));
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    let p = p.value();
    let sum: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * math::powf(math::abs(*v) / max, p))
        .sum();
    max * math::powf(sum, 1.0 / p)
}

/// Node values of a function on a [`Grid`].
#[derive(Debug, Clone)]
pub struct GridFunction<'g> {
    grid: &'g Grid,
    values: Vec<f64>,
}

impl<'g> GridFunction<'g> {
    pub fn new(grid: &'g Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Sampling { node, coords: coords_string(&grid.point(node)) });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: &'g Grid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    /// Evaluates `f` at every node.
    pub fn from_fn(grid: &'g Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut z = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|node| {
                grid.point_into(node, &mut z);
                f(&z)
            })
            .collect();
        Self::new(grid, values)
    }

    pub(crate) fn from_values_unchecked(grid: &'g Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn abs(&self) -> Self {
        self.map(math::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Node-wise sum; both functions must live on the same grid.
    pub fn add(&self, other: &GridFunction<'_>) -> Self {
        assert!(core::ptr::eq(self.grid, other.grid), "grid functions on different grids");
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn lp_norm(&self, p: Exponent) -> f64 {
        lp_norm(&self.values, self.grid.weights(), p)
    }
}

/// Values on every node of a dense [`Lattice`], used for functions on the
/// strip `(0, 2) × ℝⁿ⁻¹` (zero beyond the lattice).
#[derive(Debug, Clone, PartialEq)]
pub struct StripFunction {
    lattice: Lattice,
    values: Vec<f64>,
}

impl StripFunction {
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a lattice of {} nodes",
                values.len(),
                lattice.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            let mut z = vec![0.0; lattice.dim()];
            lattice.point(idx, &mut z);
            return Err(Error::Sampling { node: idx, coords: coords_string(&z) });
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        let values = vec![0.0; lattice.len()];
        Self { lattice, values }
    }

    /// Embeds a grid function, zero at unmasked lattice nodes.
    pub fn from_grid_function(u: &GridFunction<'_>) -> Self {
        let grid = u.grid();
        let mut out = Self::zeros(grid.lattice().clone());
        for (node, v) in u.values().iter().enumerate() {
            out.values[grid.lattice_index(node)] = *v;
        }
        out
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn slice(&self, s: usize) -> &[f64] {
        let len = self.lattice.slice_len();
        &self.values[s * len..(s + 1) * len]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { lattice: self.lattice.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `Lᵖ` norm with the uniform cell weight `h_t·h_xⁿ⁻¹`.
    pub fn lp_norm(&self, p: Exponent) -> f64 {
        let l = &self.lattice;
        let cell = l.h_t() * math::powf(l.h_x(), (l.dim() - 1) as f64);
        let weights = vec![cell; self.values.len()];
        lp_norm(&self.values, &weights, p)
    }

    /// `|∇^χ f|` slice by slice: central differences inside the lattice,
    /// one-sided at its edge.
    pub fn chi_gradient_magnitude(&self) -> Self {
        let l = &self.lattice;
        let m = l.dim() - 1;
        let side = l.side();
        let len = l.slice_len();
        let h = l.h_x();
        let mut out = vec![0.0; self.values.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let off = idx % len;
            let mut sq = 0.0;
            for k in 0..m {
                let stride = l.stride(k);
                let digit = off / stride % side;
                let lo = digit > 0;
                let hi = digit + 1 < side;
                let d = match (lo, hi) {
                    (true, true) => (self.values[idx + stride] - self.values[idx - stride]) / (2.0 * h),
                    (false, true) => (self.values[idx + stride] - self.values[idx]) / h,
                    (true, false) => (self.values[idx] - self.values[idx - stride]) / h,
                    (false, false) => 0.0,
                };
                sq += d * d;
            }
            *o = math::sqrt(sq);
        }
        Self { lattice: l.clone(), values: out }
    }
}

/// Test-function families sampled by [`sample_function`].
#[derive(Clone)]
pub enum Family {
    /// `u = c_t·t + c_x·x`; missing `c_x` components are zero.
    Linear { c_t: f64, c_x: Vec<f64> },
    /// `u = t^{−α}`.
    PowerT { alpha: f64 },
    /// `u = |x|^β`.
    Radial { beta: f64 },
    /// `u = θ/(2π)` with `θ ∈ [0, 2π)` the polar angle of `(t, x₁)`, cut
    /// along the positive t-axis.
    AngleSlit,
    /// Any function of the point `(t, x)`.
    Custom { name: String, f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Linear { c_t, c_x } => write!(f, "Linear({c_t}, {c_x:?})"),
            Family::PowerT { alpha } => write!(f, "PowerT({alpha})"),
            Family::Radial { beta } => write!(f, "Radial({beta})"),
            Family::AngleSlit => f.write_str("AngleSlit"),
            Family::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Family {
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            Family::Linear { c_t, c_x } => {
                c_t * z[0] + c_x.iter().zip(&z[1..]).map(|(c, x)| c * x).sum::<f64>()
            }
            Family::PowerT { alpha } => math::powf(z[0], -alpha),
            Family::Radial { beta } => math::powf(math::norm(&z[1..]), *beta),
            Family::AngleSlit => {
                let mut theta = math::atan2(z[1], z[0]);
                if theta < 0.0 {
                    theta += 2.0 * core::f64::consts::PI;
                }
                theta / (2.0 * core::f64::consts::PI)
            }
            Family::Custom { f, .. } => f(z),
        }
    }
}

/// Samples `family` at every node of `grid`.
pub fn sample_function<'g>(grid: &'g Grid, family: &Family) -> Result<GridFunction<'g>> {
    if let Family::Linear { c_x, .. } = family {
        if c_x.len() >= grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "linear family has {} x-coefficients for dimension {}",
                c_x.len(),
                grid.dim()
            )));
        }
    }
    GridFunction::from_fn(grid, |z| family.eval(z))
}

/// Per-node finite-difference gradient `(∂_t u, ∇^χ u)`.
#[derive(Debug, Clone)]
pub struct GradientField<'g> {
    grid: &'g Grid,
    d_t: Vec<f64>,
    d_x: Vec<f64>,
    full: Vec<bool>,
}

impl<'g> GradientField<'g> {
    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn d_t(&self, node: usize) -> f64 {
        self.d_t[node]
    }

    pub fn d_x(&self, node: usize) -> &[f64] {
        let m = self.grid.dim() - 1;
        &self.d_x[node * m..(node + 1) * m]
    }

    /// Whether every axis had at least one masked neighbour. Nodes in slices
    /// too thin to hold a neighbour along some `x` axis get a zero component
    /// there.
    pub fn full_stencil(&self, node: usize) -> bool {
        self.full[node]
    }

    /// Number of nodes with a zeroed `x` component.
    pub fn thin_nodes(&self) -> usize {
        self.full.iter().filter(|f| !**f).count()
    }

    /// `|∇u| = sqrt(d_t² + |d_x|²)`.
    pub fn magnitude(&self) -> GridFunction<'g> {
        let values = (0..self.grid.len())
            .map(|i| {
                let dx = self.d_x(i);
                math::sqrt(self.d_t[i] * self.d_t[i] + dx.iter().map(|v| v * v).sum::<f64>())
            })
            .collect();
        GridFunction::from_values_unchecked(self.grid, values)
    }

    /// `|∇^χ u| = |d_x|`.
    pub fn chi_magnitude(&self) -> GridFunction<'g> {
        let values = (0..self.grid.len()).map(|i| math::norm(self.d_x(i))).collect();
        GridFunction::from_values_unchecked(self.grid, values)
    }
}

/// Central differences where both lattice neighbours are masked, one-sided
/// differences where only one is.
///
/// A node without a masked neighbour along `t` is a stencil error. Along an
/// `x` axis the same situation occurs at every cusp tip (the slice holds only
/// the axis node), so the component is set to zero and the node is reported by
/// [`GradientField::full_stencil`].
pub fn weak_gradient<'g>(u: &GridFunction<'g>) -> Result<GradientField<'g>> {
    let grid = u.grid;
    let n = grid.dim();
    let v = &u.values;
    let mut d_t = vec![0.0; grid.len()];
    let mut d_x = vec![0.0; grid.len() * (n - 1)];
    let mut full = vec![true; grid.len()];
    for node in 0..grid.len() {
        for axis in 0..n {
            let h = if axis == 0 { grid.h_t() } else { grid.h_x() };
            let d = match (grid.neighbour(node, axis, false), grid.neighbour(node, axis, true)) {
                (Some(a), Some(b)) => (v[b] - v[a]) / (2.0 * h),
                (None, Some(b)) => (v[b] - v[node]) / h,
                (Some(a), None) => (v[node] - v[a]) / h,
                (None, None) if axis == 0 => {
                    return Err(Error::Stencil { node, axis, coords: coords_string(&grid.point(node)) })
                }
                (None, None) => {
                    full[node] = false;
                    0.0
                }
            };
            if axis == 0 {
                d_t[node] = d;
            } else {
                d_x[node * (n - 1) + axis - 1] = d;
            }
        }
    }
    Ok(GradientField { grid, d_t, d_x, full })
}

/// `‖u‖_p`, `‖∇u‖_p` and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorm {
    pub lp_u: f64,
    pub lp_grad: f64,
    pub sobolev: f64,
}

pub fn sobolev_norm(u: &GridFunction<'_>, p: Exponent) -> Result<SobolevNorm> {
    let grad = weak_gradient(u)?.magnitude();
    let lp_u = u.lp_norm(p);
    let lp_grad = grad.lp_norm(p);
    Ok(SobolevNorm { lp_u, lp_grad, sobolev: lp_u + lp_grad })
}

/// One row of the norm comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub p: Exponent,
    pub lp_u: f64,
    pub lp_grad: f64,
    pub sobolev: f64,
    pub hajlasz_constructive: f64,
    pub hajlasz_lower_bound: f64,
}

pub(crate) fn coords_string(z: &[f64]) -> String {
    let mut s = String::new();
    for (k, v) in z.iter().enumerate() {
        if k > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("{v}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, CuspDomain, CuspProfile, GridSpec};
    use proptest::prelude::*;

    fn cylinder_grid(h: f64) -> Grid {
        let d = CuspDomain::new(2, CuspProfile::table(&[(1.0, 1.0)]).unwrap()).unwrap();
        build_grid(&d, &GridSpec::uniform(h)).unwrap()
    }

    fn cusp_grid(n: usize, h: f64) -> Grid {
        let d = CuspDomain::new(n, CuspProfile::power(1.0, 2.0).unwrap()).unwrap();
        build_grid(&d, &GridSpec::uniform(h)).unwrap()
    }

    #[test]
    fn families() {
        let g = cusp_grid(2, 0.125);
        let lin = sample_function(&g, &Family::Linear { c_t: 1.0, c_x: vec![0.0] }).unwrap();
        for node in 0..g.len() {
            assert_eq!(lin.values()[node], g.point(node)[0]);
        }
        let one = sample_function(&g, &Family::PowerT { alpha: 0.0 }).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        assert!((Family::PowerT { alpha: 0.3 }.eval(&[0.5, 0.0]) - 1.231144413).abs() < 1e-9);
    }

    #[test]
    fn non_finite_sample_names_the_node() {
        let g = cusp_grid(2, 0.125);
        let err = sample_function(&g, &Family::Radial { beta: -1.0 }).unwrap_err();
        assert!(matches!(err, Error::Sampling { .. }));
        assert!(alloc::format!("{err}").contains(", 0"));
    }

    #[test]
    fn angle_family_is_cut_along_positive_axis() {
        let f = Family::AngleSlit;
        assert!(f.eval(&[0.5, 1e-12]) < 1e-9);
        assert!(f.eval(&[0.5, -1e-12]) > 1.0 - 1e-9);
        assert!((f.eval(&[-0.5, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_exact_on_affine_dyadic_grid() {
        let g = cusp_grid(2, 0.125);
        let u = sample_function(&g, &Family::Linear { c_t: 2.0, c_x: vec![3.0] }).unwrap();
        let grad = weak_gradient(&u).unwrap();
        assert!(grad.thin_nodes() > 0);
        for node in 0..g.len() {
            assert_eq!(grad.d_t(node), 2.0);
            if !grad.full_stencil(node) {
                assert_eq!(grad.d_x(node), &[0.0]);
                continue;
            }
            assert_eq!(grad.d_x(node), &[3.0]);
        }
        let c = GridFunction::constant(&g, 4.0);
        let zero = weak_gradient(&c).unwrap().magnitude();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn central_difference_of_square() {
        let g = cylinder_grid(0.1);
        let u = GridFunction::from_fn(&g, |z| z[0] * z[0]).unwrap();
        let grad = weak_gradient(&u).unwrap();
        let s = (0..g.slices()).find(|&s| (g.lattice().t(s) - 1.0).abs() < 1e-9).unwrap();
        let node = g.node(s, &[0]).unwrap();
        assert!((grad.d_t(node) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_node_is_a_stencil_error() {
        use crate::geometry::Lattice;
        let lattice = Lattice::new(2, 0.5, 0.5, 0.5, 3, 1).unwrap();
        let g = Grid::from_predicate(lattice, 0, 100, |z| z[1] == 0.0 && z[0] < 0.75).unwrap();
        assert_eq!(g.len(), 1);
        let u = GridFunction::constant(&g, 1.0);
        assert!(matches!(weak_gradient(&u), Err(Error::Stencil { node: 0, axis: 0, .. })));
    }

    #[test]
    fn norms_of_constants_and_linear() {
        let g = cylinder_grid(0.125);
        let w = g.total_weight();
        let c = GridFunction::constant(&g, -3.0);
        for p in [1.0, 2.0, 4.5] {
            let s = sobolev_norm(&c, Exponent::new(p).unwrap()).unwrap();
            assert!((s.lp_u - 3.0 * w.powf(1.0 / p)).abs() < 1e-12);
            assert_eq!(s.lp_grad, 0.0);
        }
        let lin = sample_function(&g, &Family::Linear { c_t: 1.0, c_x: vec![] }).unwrap();
        let s = sobolev_norm(&lin, Exponent::new(2.0).unwrap()).unwrap();
        assert!((s.lp_grad - w.sqrt()).abs() < 1e-12);
        assert!(s.sobolev >= s.lp_u);
    }

    #[test]
    fn sup_norm() {
        let g = cylinder_grid(0.5);
        let mut values = vec![0.0; g.len()];
        values[0] = -3.0;
        values[1] = 2.0;
        let f = GridFunction::new(&g, values).unwrap();
        assert_eq!(f.lp_norm(Exponent::INFINITY), 3.0);
    }

    #[test]
    fn l2_norm_of_t_on_rectangle_converges() {
        // ∫_{0.5}^{2} ∫_{-1}^{1} t² = 2 (8 − 0.125) / 3
        let exact = (2.0 * (8.0 - 0.125) / 3.0f64).sqrt();
        let d = CuspDomain::new(2, CuspProfile::table(&[(1.0, 1.0)]).unwrap()).unwrap();
        let mut errs = vec![];
        for level in 2..6 {
            let h = 0.5 / (1 << level) as f64;
            let g = build_grid(&d, &GridSpec::uniform(h).with_t_min(0.5 + h / 2.0)).unwrap();
            let u = sample_function(&g, &Family::Linear { c_t: 1.0, c_x: vec![] }).unwrap();
            errs.push((u.lp_norm(Exponent::new(2.0).unwrap()) - exact).abs());
        }
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(errs[3] < 0.05);
    }

    proptest! {
        #[test]
        fn lp_norm_is_homogeneous(vals in prop::collection::vec(-10.0f64..10.0, 12), lambda in -50.0f64..50.0, p in 1.0f64..8.0) {
            let w = vec![0.25; 12];
            let p = Exponent::new(p).unwrap();
            let scaled: Vec<f64> = vals.iter().map(|v| lambda * v).collect();
            let a = lp_norm(&scaled, &w, p);
            let b = lambda.abs() * lp_norm(&vals, &w, p);
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }

        #[test]
        fn lp_norm_triangle(f in prop::collection::vec(-10.0f64..10.0, 9), g in prop::collection::vec(-10.0f64..10.0, 9), p in 1.0f64..6.0) {
            let w = vec![0.1; 9];
            let p = Exponent::new(p).unwrap();
            let s: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
            prop_assert!(lp_norm(&s, &w, p) <= (lp_norm(&f, &w, p) + lp_norm(&g, &w, p)) * (1.0 + 1e-12));
        }

        #[test]
        fn lp_norm_monotone_in_p_on_probability_weights(f in prop::collection::vec(-5.0f64..5.0, 1..20)) {
            let w = vec![1.0 / f.len() as f64; f.len()];
            let norms: Vec<f64> = [1.0, 2.0, 4.0, f64::INFINITY]
                .iter()
                .map(|&p| lp_norm(&f, &w, Exponent::new(p).unwrap()))
                .collect();
            for pair in norms.windows(2) {
                prop_assert!(pair[0] <= pair[1] * (1.0 + 1e-12));
            }
        }
    }
}
