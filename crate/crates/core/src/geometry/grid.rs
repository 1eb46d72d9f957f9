use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::CuspDomain;
use crate::math;
use crate::{Error, Result};

/// Lattice node count allowed when no budget is configured.
pub const DEFAULT_NODE_BUDGET: usize = 1 << 23;

const NONE: u32 = u32::MAX;

/// Tensor lattice `{t0 + i·h_t} × (h_x·ℤ)ⁿ⁻¹` truncated to
/// `0 ≤ i < slices` and `|j_k| ≤ half_width`.
///
/// Linear indices are t-major, then lexicographic in `(j_1, …, j_{n−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    n: usize,
    h_t: f64,
    h_x: f64,
    t0: f64,
    slices: usize,
    half_width: usize,
}

impl Lattice {
    pub fn new(n: usize, h_t: f64, h_x: f64, t0: f64, slices: usize, half_width: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {n}")));
        }
        if !(h_t > 0.0 && h_t.is_finite() && h_x > 0.0 && h_x.is_finite() && t0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lattice spacings must be positive (h_t = {h_t}, h_x = {h_x})"
            )));
        }
        Ok(Self { n, h_t, h_x, t0, slices, half_width })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn h_t(&self) -> f64 {
        self.h_t
    }
    pub fn h_x(&self) -> f64 {
        self.h_x
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn slices(&self) -> usize {
        self.slices
    }
    pub fn half_width(&self) -> usize {
        self.half_width
    }
    /// Nodes per axis in a slice.
    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }
    pub fn slice_len(&self) -> usize {
        self.side().pow(self.n as u32 - 1)
    }
    pub fn len(&self) -> usize {
        self.slices * self.slice_len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn requested(&self) -> u128 {
        (self.slices as u128) * (self.side() as u128).pow(self.n as u32 - 1)
    }

    #[inline]
    pub fn t(&self, slice: usize) -> f64 {
        self.t0 + slice as f64 * self.h_t
    }

    #[inline]
    pub fn x(&self, j: i32) -> f64 {
        j as f64 * self.h_x
    }

    /// Stride of x-axis `k` (0-based) inside a slice.
    #[inline]
    pub fn stride(&self, k: usize) -> usize {
        self.side().pow((self.n - 2 - k) as u32)
    }

    /// Offset of multi-index `js` inside a slice, if it is in range.
    pub fn slice_offset(&self, js: &[i32]) -> Option<usize> {
        let k = self.half_width as i64;
        let side = self.side();
        let mut off = 0usize;
        for &j in js {
            let j = j as i64;
            if j < -k || j > k {
                return None;
            }
            off = off * side + (j + k) as usize;
        }
        Some(off)
    }

    pub fn index(&self, slice: usize, js: &[i32]) -> Option<usize> {
        if slice >= self.slices || js.len() + 1 != self.n {
            return None;
        }
        Some(slice * self.slice_len() + self.slice_offset(js)?)
    }

    /// Writes the x multi-index of a slice offset into `js`.
    pub fn offset_to_multi(&self, mut off: usize, js: &mut [i32]) {
        let side = self.side();
        let k = self.half_width as i32;
        for j in js.iter_mut().rev() {
            *j = (off % side) as i32 - k;
            off /= side;
        }
    }

    /// Splits a linear index into slice number and x multi-index.
    pub fn decompose(&self, idx: usize, js: &mut [i32]) -> usize {
        let len = self.slice_len();
        self.offset_to_multi(idx % len, js);
        idx / len
    }

    /// Coordinates `(t, x)` of a lattice node.
    pub fn point(&self, idx: usize, out: &mut [f64]) {
        let mut js = [0i32; 8];
        let m = self.n - 1;
        let mut heap;
        let js: &mut [i32] = if m <= js.len() {
            &mut js[..m]
        } else {
            heap = vec![0; m];
            &mut heap
        };
        let slice = self.decompose(idx, js);
        out[0] = self.t(slice);
        for (o, &j) in out[1..].iter_mut().zip(js.iter()) {
            *o = self.x(j);
        }
    }

    /// Same slicing in `t` and the same x spacing.
    pub fn shares_slices_with(&self, other: &Lattice) -> bool {
        self.n == other.n
            && self.h_t == other.h_t
            && self.h_x == other.h_x
            && self.t0 == other.t0
            && self.slices == other.slices
    }
}

/// Spacing and truncation of a cusp grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub h_t: f64,
    pub h_x: f64,
    /// First slice height; `None` means `h_t`.
    pub t_min: Option<f64>,
    pub node_budget: usize,
}

impl GridSpec {
    pub fn new(h_t: f64, h_x: f64) -> Self {
        Self { h_t, h_x, t_min: None, node_budget: DEFAULT_NODE_BUDGET }
    }

    pub fn uniform(h: f64) -> Self {
        Self::new(h, h)
    }

    pub fn with_t_min(mut self, t_min: f64) -> Self {
        self.t_min = Some(t_min);
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self
    }

    /// Both spacings divided by `2^level`; `t_min` follows `h_t` when unset.
    pub fn refined(&self, level: u32) -> Self {
        let f = (1u64 << level) as f64;
        Self { h_t: self.h_t / f, h_x: self.h_x / f, t_min: self.t_min, node_budget: self.node_budget }
    }
}

/// A masked lattice with per-node quadrature weights.
///
/// Masked nodes ("nodes") are numbered in lattice order. Columns (fixed x,
/// varying t) and slices (fixed t) are precomputed.
#[derive(Debug, Clone)]
pub struct Grid {
    lattice: Lattice,
    t_min: f64,
    fingerprint: u64,
    lattice_index: Vec<u32>,
    lookup: Vec<u32>,
    weights: Vec<f64>,
    slice_ranges: Vec<(u32, u32)>,
    column_nodes: Vec<u32>,
    column_ranges: Vec<(u32, u32)>,
}

impl Grid {
    /// Masks the nodes satisfying `inside` and weights each by the fraction of
    /// its cell's `3ⁿ` subsample points (offsets `−h/3, 0, h/3` per axis) that
    /// satisfy `inside`, times the cell volume.
    pub fn from_predicate<F>(lattice: Lattice, fingerprint: u64, budget: usize, inside: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> bool,
    {
        let requested = lattice.requested();
        if requested > budget as u128 {
            return Err(Error::NodeBudget { budget, requested });
        }
        let n = lattice.dim();
        let cell = lattice.h_t() * math::powf(lattice.h_x(), (n - 1) as f64);
        let sub_total = 3usize.pow(n as u32);
        let mut centre = vec![0.0; n];
        let mut probe = vec![0.0; n];
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for idx in 0..lattice.len() {
            lattice.point(idx, &mut centre);
            if !inside(&centre) {
                continue;
            }
            let mut hits = 0usize;
            for s in 0..sub_total {
                let mut code = s;
                for (k, p) in probe.iter_mut().enumerate() {
                    let h = if k == 0 { lattice.h_t() } else { lattice.h_x() };
                    let digit = (code % 3) as f64 - 1.0;
                    code /= 3;
                    *p = centre[k] + digit * h / 3.0;
                }
                if inside(&probe) {
                    hits += 1;
                }
            }
            nodes.push(idx);
            weights.push(cell * (hits as f64 / sub_total as f64));
        }
        let t_min = lattice.t0();
        Self::from_nodes(lattice, fingerprint, t_min, nodes, weights)
    }

    /// Assembles a grid from masked lattice indices (strictly increasing) and
    /// their weights.
    pub fn from_nodes(
        lattice: Lattice,
        fingerprint: u64,
        t_min: f64,
        nodes: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.len() >= NONE as usize || lattice.len() >= NONE as usize {
            return Err(Error::NodeBudget { budget: NONE as usize - 1, requested: lattice.requested() });
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) || nodes.last().is_some_and(|&l| l >= lattice.len()) {
            return Err(Error::InvalidArgument("grid nodes must be increasing lattice indices".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!("quadrature weight {w} is not positive")));
        }
        let mut lookup = vec![NONE; lattice.len()];
        for (node, &idx) in nodes.iter().enumerate() {
            lookup[idx] = node as u32;
        }
        let slice_len = lattice.slice_len();
        let mut slice_ranges = vec![(0u32, 0u32); lattice.slices()];
        let mut start = 0usize;
        for (s, range) in slice_ranges.iter_mut().enumerate() {
            let end = start + nodes[start..].partition_point(|&idx| idx / slice_len == s);
            *range = (start as u32, end as u32);
            start = end;
        }
        // counting sort by x offset keeps t order within a column
        let mut counts = vec![0u32; slice_len + 1];
        for &idx in &nodes {
            counts[idx % slice_len + 1] += 1;
        }
        for k in 0..slice_len {
            counts[k + 1] += counts[k];
        }
        let mut fill = counts.clone();
        let mut column_nodes = vec![0u32; nodes.len()];
        for (node, &idx) in nodes.iter().enumerate() {
            let off = idx % slice_len;
            column_nodes[fill[off] as usize] = node as u32;
            fill[off] += 1;
        }
        let column_ranges = (0..slice_len)
            .filter(|&k| counts[k + 1] > counts[k])
            .map(|k| (counts[k], counts[k + 1]))
            .collect();
        Ok(Self {
            lattice,
            t_min,
            fingerprint,
            lattice_index: nodes.into_iter().map(|i| i as u32).collect(),
            lookup,
            weights,
            slice_ranges,
            column_nodes,
            column_ranges,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }
    pub fn h_t(&self) -> f64 {
        self.lattice.h_t()
    }
    pub fn h_x(&self) -> f64 {
        self.lattice.h_x()
    }
    pub fn t_min(&self) -> f64 {
        self.t_min
    }
    /// Fingerprint of whatever produced the mask (profile hash for cusp grids).
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
    /// Number of masked nodes.
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn lattice_index(&self, node: usize) -> usize {
        self.lattice_index[node] as usize
    }

    /// Masked node at a lattice index.
    #[inline]
    pub fn node_at(&self, idx: usize) -> Option<usize> {
        match self.lookup.get(idx) {
            Some(&v) if v != NONE => Some(v as usize),
            _ => None,
        }
    }

    pub fn node(&self, slice: usize, js: &[i32]) -> Option<usize> {
        self.node_at(self.lattice.index(slice, js)?)
    }

    pub fn slice_of(&self, node: usize) -> usize {
        self.lattice_index(node) / self.lattice.slice_len()
    }

    pub fn multi_index(&self, node: usize, js: &mut [i32]) -> usize {
        self.lattice.decompose(self.lattice_index(node), js)
    }

    pub fn point_into(&self, node: usize, out: &mut [f64]) {
        self.lattice.point(self.lattice_index(node), out)
    }

    pub fn point(&self, node: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(node, &mut p);
        p
    }

    /// All node coordinates, flattened `n` per node.
    pub fn points(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * self.len()];
        for (node, chunk) in out.chunks_exact_mut(n).enumerate() {
            self.point_into(node, chunk);
        }
        out
    }

    /// Nodes of slice `s`, in lexicographic x order.
    pub fn slice_nodes(&self, s: usize) -> core::ops::Range<usize> {
        let (a, b) = self.slice_ranges[s];
        a as usize..b as usize
    }

    pub fn slices(&self) -> usize {
        self.lattice.slices()
    }

    /// Nonempty columns, each as node numbers in increasing t.
    pub fn columns(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.column_ranges.iter().map(|&(a, b)| &self.column_nodes[a as usize..b as usize])
    }

    pub fn column_count(&self) -> usize {
        self.column_ranges.len()
    }

    /// Masked neighbour of `node` one step along `axis` (0 is t).
    pub fn neighbour(&self, node: usize, axis: usize, forward: bool) -> Option<usize> {
        let idx = self.lattice_index(node);
        let len = self.lattice.slice_len();
        if axis == 0 {
            let s = idx / len;
            let target = if forward { s + 1 } else { s.checked_sub(1)? };
            if target >= self.lattice.slices() {
                return None;
            }
            return self.node_at(target * len + idx % len);
        }
        let stride = self.lattice.stride(axis - 1);
        let side = self.lattice.side();
        let digit = (idx % len) / stride % side;
        let moved = if forward {
            if digit + 1 >= side {
                return None;
            }
            idx + stride
        } else {
            if digit == 0 {
                return None;
            }
            idx - stride
        };
        self.node_at(moved)
    }
}

/// Masks `Ω_ψ ∩ {t ≥ t_min}` on the lattice with slices `t_min + i·h_t < 2`
/// and x-nodes up to `ψ(1)`.
pub fn build_grid(domain: &CuspDomain, spec: &GridSpec) -> Result<Grid> {
    let t_min = spec.t_min.unwrap_or(spec.h_t);
    if !(spec.h_t > 0.0 && spec.h_x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "grid spacings must be positive (h_t = {}, h_x = {})",
            spec.h_t, spec.h_x
        )));
    }
    if !(t_min > 0.0 && t_min < 2.0) {
        return Err(Error::InvalidArgument(format!("t_min must lie in (0, 2), got {t_min}")));
    }
    let mut slices = math::ceil((2.0 - t_min) / spec.h_t).max(1.0) as usize;
    while slices > 0 && t_min + (slices - 1) as f64 * spec.h_t >= 2.0 {
        slices -= 1;
    }
    while t_min + slices as f64 * spec.h_t < 2.0 {
        slices += 1;
    }
    let half_width = math::ceil(domain.profile().top() / spec.h_x) as usize;
    let lattice = Lattice::new(domain.dim(), spec.h_t, spec.h_x, t_min, slices, half_width)?;
    Grid::from_predicate(lattice, domain.profile().fingerprint(), spec.node_budget, |z| domain.contains(z))
}
