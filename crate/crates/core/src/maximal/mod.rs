//! Directional maximal operators.
//!
//! * `Mτ[f](t, x)`: sup over t-windows of the column over `x` containing `t`
//!   of the weighted average of `|f|`.
//! * `Mχ[f](t, x)`: sup over balls of the slice `{t} × ℝⁿ⁻¹` containing `x`;
//!   defined on the strip lattice.
//! * `M̃χ[f](t, x)` (`n = 2` only): sup over x-windows of the slice of the
//!   domain itself.
//!
//! Windows are unions of whole cells and averages use the grid's quadrature
//! weights. Every operator has an [`Algorithm::Exhaustive`] reference that
//! enumerates windows directly.

mod chi;
mod window;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use chi::{dyadic_ladder, uncentred_slice_exhaustive};
pub use window::{window_maximal, window_maximal_exhaustive};

use crate::fields::{GridFunction, StripFunction};
use crate::geometry::Grid;
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Tau,
    Chi,
    ChiInterval,
    TauOfChi,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Tau => "tau",
            Operator::Chi => "chi",
            Operator::ChiInterval => "chi_interval",
            Operator::TauOfChi => "tau_of_chi",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Fast,
    Exhaustive,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fast => "fast",
            Algorithm::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output of a maximal operator.
#[derive(Debug, Clone)]
pub struct MaximalResult<F> {
    pub function: F,
    pub operator: Operator,
    pub algorithm: Algorithm,
    /// Factor turning `function` into an upper bound for the uncentred
    /// operator: `1` when the supremum is exact, `2ⁿ⁻¹` for the centred
    /// ladder.
    pub comparison_factor: f64,
}

impl<'g> MaximalResult<GridFunction<'g>> {
    pub fn values(&self) -> &[f64] {
        self.function.values()
    }

    /// `comparison_factor · function`.
    pub fn upper_bound(&self) -> GridFunction<'g> {
        self.function.scale(self.comparison_factor)
    }
}

impl MaximalResult<StripFunction> {
    pub fn values(&self) -> &[f64] {
        self.function.values()
    }

    pub fn upper_bound(&self) -> StripFunction {
        let c = self.comparison_factor;
        self.function.map(|v| c * v)
    }
}

fn run_windows(values: &[f64], weights: &[f64], algorithm: Algorithm, out: &mut [f64]) {
    match algorithm {
        Algorithm::Fast => window_maximal(values, weights, out),
        Algorithm::Exhaustive => window_maximal_exhaustive(values, weights, out),
    }
}

/// `Mτ` with the `O(m²)` window sweep.
pub fn m_tau<'g>(f: &GridFunction<'g>) -> MaximalResult<GridFunction<'g>> {
    m_tau_with(f, Algorithm::Fast)
}

pub fn m_tau_with<'g>(f: &GridFunction<'g>, algorithm: Algorithm) -> MaximalResult<GridFunction<'g>> {
    let grid = f.grid();
    let abs: Vec<f64> = f.values().iter().map(|v| math::abs(*v)).collect();
    let mut result = vec![0.0; grid.len()];
    let (mut vals, mut wts, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for column in grid.columns() {
        vals.clear();
        wts.clear();
        vals.extend(column.iter().map(|&i| abs[i as usize]));
        wts.extend(column.iter().map(|&i| grid.weights()[i as usize]));
        out.resize(column.len(), 0.0);
        run_windows(&vals, &wts, algorithm, &mut out);
        for (&i, &v) in column.iter().zip(&out) {
            result[i as usize] = v;
        }
    }
    MaximalResult {
        function: GridFunction::from_values_unchecked(grid, result),
        operator: Operator::Tau,
        algorithm,
        comparison_factor: 1.0,
    }
}

/// `M̃χ` for planar domains.
pub fn m_chi_interval<'g>(f: &GridFunction<'g>) -> Result<MaximalResult<GridFunction<'g>>> {
    m_chi_interval_with(f, Algorithm::Fast)
}

pub fn m_chi_interval_with<'g>(
    f: &GridFunction<'g>,
    algorithm: Algorithm,
) -> Result<MaximalResult<GridFunction<'g>>> {
    let grid = f.grid();
    if grid.dim() != 2 {
        return Err(Error::UnsupportedDimension { n: grid.dim(), expected: 2 });
    }
    let abs: Vec<f64> = f.values().iter().map(|v| math::abs(*v)).collect();
    let mut result = vec![0.0; grid.len()];
    for s in 0..grid.slices() {
        let range = grid.slice_nodes(s);
        let w = &grid.weights()[range.clone()];
        run_windows(&abs[range.clone()], w, algorithm, &mut result[range]);
    }
    Ok(MaximalResult {
        function: GridFunction::from_values_unchecked(grid, result),
        operator: Operator::ChiInterval,
        algorithm,
        comparison_factor: 1.0,
    })
}

/// Default ladder top: the diameter of a slice of the lattice.
fn lattice_diameter(f: &StripFunction) -> f64 {
    let l = f.lattice();
    2.0 * l.half_width() as f64 * l.h_x() * math::sqrt((l.dim() - 1) as f64)
}

fn chi_comparison_factor(n: usize) -> f64 {
    if n == 2 {
        1.0
    } else {
        (1u64 << (n - 1)) as f64
    }
}

/// `Mχ` on the whole strip lattice.
pub fn m_chi(f: &StripFunction) -> MaximalResult<StripFunction> {
    m_chi_with(f, Algorithm::Fast, None)
}

/// `Mχ` with an explicit algorithm and ladder top radius (length units;
/// `None` uses the slice diameter).
pub fn m_chi_with(f: &StripFunction, algorithm: Algorithm, ladder_top: Option<f64>) -> MaximalResult<StripFunction> {
    let l = f.lattice().clone();
    let abs = f.map(math::abs);
    let len = l.slice_len();
    let mut out = vec![0.0; l.len()];
    if l.dim() == 2 {
        for s in 0..l.slices() {
            chi::interval_row(abs.slice(s), algorithm, &mut out[s * len..(s + 1) * len]);
        }
    } else {
        let top = ladder_top.unwrap_or_else(|| lattice_diameter(f));
        let ladder = chi::CentredLadder::new(&l, top);
        let offsets: Vec<usize> = (0..len).collect();
        for s in 0..l.slices() {
            chi::centred_slice_values(abs.slice(s), &l, &ladder, &offsets, algorithm, &mut out[s * len..(s + 1) * len]);
        }
    }
    MaximalResult {
        function: StripFunction::new(l.clone(), out).expect("maximal values are finite"),
        operator: Operator::Chi,
        algorithm,
        comparison_factor: chi_comparison_factor(l.dim()),
    }
}

fn check_strip_covers(strip: &StripFunction, grid: &Grid) -> Result<()> {
    let (a, b) = (strip.lattice(), grid.lattice());
    if !a.shares_slices_with(b) || a.half_width() < b.half_width() {
        return Err(Error::InvalidArgument(
            "strip lattice does not cover the grid (slices or x-range differ)".into(),
        ));
    }
    Ok(())
}

/// `Mχ[f]` evaluated only at the nodes of `grid`.
pub fn m_chi_on_grid<'g>(
    f: &StripFunction,
    grid: &'g Grid,
    algorithm: Algorithm,
    ladder_top: Option<f64>,
) -> Result<MaximalResult<GridFunction<'g>>> {
    check_strip_covers(f, grid)?;
    let l = f.lattice();
    let len = l.slice_len();
    let mut result = vec![0.0; grid.len()];
    let mut js = vec![0i32; l.dim() - 1];
    if l.dim() == 2 {
        let abs = f.map(math::abs);
        let mut row = vec![0.0; len];
        for s in 0..grid.slices() {
            chi::interval_row(abs.slice(s), algorithm, &mut row);
            for node in grid.slice_nodes(s) {
                grid.multi_index(node, &mut js);
                result[node] = row[l.slice_offset(&js).expect("covered")];
            }
        }
    } else {
        let abs = f.map(math::abs);
        let top = ladder_top.unwrap_or_else(|| lattice_diameter(f));
        let ladder = chi::CentredLadder::new(l, top);
        let mut offsets = Vec::new();
        for s in 0..grid.slices() {
            let range = grid.slice_nodes(s);
            offsets.clear();
            for node in range.clone() {
                grid.multi_index(node, &mut js);
                offsets.push(l.slice_offset(&js).expect("covered"));
            }
            chi::centred_slice_values(abs.slice(s), l, &ladder, &offsets, algorithm, &mut result[range]);
        }
    }
    Ok(MaximalResult {
        function: GridFunction::from_values_unchecked(grid, result),
        operator: Operator::Chi,
        algorithm,
        comparison_factor: chi_comparison_factor(l.dim()),
    })
}

/// `Mτ[Mχ[f]]` on the nodes of `grid`.
pub fn m_tau_of_m_chi<'g>(f: &StripFunction, grid: &'g Grid) -> Result<MaximalResult<GridFunction<'g>>> {
    m_tau_of_m_chi_with(f, grid, Algorithm::Fast, None)
}

pub fn m_tau_of_m_chi_with<'g>(
    f: &StripFunction,
    grid: &'g Grid,
    algorithm: Algorithm,
    ladder_top: Option<f64>,
) -> Result<MaximalResult<GridFunction<'g>>> {
    let inner = m_chi_on_grid(f, grid, algorithm, ladder_top)?;
    let outer = m_tau_with(&inner.function, algorithm);
    Ok(MaximalResult {
        function: outer.function,
        operator: Operator::TauOfChi,
        algorithm,
        comparison_factor: inner.comparison_factor,
    })
}

/// Exact uncentred `Mχ` by enumeration (tiny lattices; see
/// [`uncentred_slice_exhaustive`]).
pub fn m_chi_uncentred_exhaustive(f: &StripFunction) -> StripFunction {
    let l = f.lattice();
    let abs = f.map(math::abs);
    let len = l.slice_len();
    let mut out = vec![0.0; l.len()];
    for s in 0..l.slices() {
        uncentred_slice_exhaustive(abs.slice(s), l.side(), l.dim() - 1, &mut out[s * len..(s + 1) * len]);
    }
    StripFunction::new(l.clone(), out).expect("finite")
}
