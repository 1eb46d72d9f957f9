//! Slice-wise reflection extension.
//!
//! For a function `u` on the ball `B(0, R) ⊂ ℝᵐ` the extension is
//!
//! ```text
//! E^R u(x) = u(x)                     |x| < R
//!            0                        |x| = R
//!            u(R²x/|x|²)·q(|x|/R)     R < |x| < 2R
//!            0                        |x| ≥ 2R
//! ```
//!
//! with the cutoff `q(r) = 1 − S(r − 1)` and `S` the quintic smoothstep.
//! Reflected points fall between lattice nodes and are interpolated from the
//! masked nodes of the ball.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fields::{lp_norm, Exponent, GridFunction, StripFunction};
use crate::geometry::{CuspDomain, Lattice};
use crate::math;
use crate::{Error, Result};

/// Quintic smoothstep on `[0, 1]`, clamped outside.
fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

/// `q(r)`: 1 on `[0, 1]`, 0 on `[2, ∞)`, quintic in between.
pub fn cutoff(r: f64) -> f64 {
    1.0 - smoothstep(r - 1.0)
}

/// `η(x) = q(|x|)`.
pub fn cutoff_eval(x: &[f64]) -> f64 {
    cutoff(math::norm(x))
}

/// Values of a function on the lattice nodes `h·ℤᵐ` inside `B(0, R)`.
///
/// The lattice is the cube `[-K, K]ᵐ` of multi-indices; `mask` marks the
/// nodes where `values` is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSlice {
    dim: usize,
    h: f64,
    radius: f64,
    half_width: usize,
    values: Vec<f64>,
    mask: Vec<bool>,
}

fn side_len(half_width: usize) -> usize {
    2 * half_width + 1
}

fn cube_len(m: usize, half_width: usize) -> usize {
    side_len(half_width).pow(m as u32)
}

fn offset_to_multi(mut off: usize, half_width: usize, js: &mut [i32]) {
    let side = side_len(half_width);
    for j in js.iter_mut().rev() {
        *j = (off % side) as i32 - half_width as i32;
        off /= side;
    }
}

fn multi_to_offset(js: &[i32], half_width: usize) -> Option<usize> {
    let k = half_width as i64;
    let side = side_len(half_width);
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

impl BallSlice {
    pub fn new(dim: usize, h: f64, radius: f64, half_width: usize, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("slice dimension must be at least 1".into()));
        }
        if !(h > 0.0 && h.is_finite() && radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "slice needs positive spacing and radius (h = {h}, R = {radius})"
            )));
        }
        let len = cube_len(dim, half_width);
        if values.len() != len || mask.len() != len {
            return Err(Error::InvalidArgument(format!(
                "slice of half-width {half_width} in dimension {dim} has {len} nodes, got {} values and {} mask entries",
                values.len(),
                mask.len()
            )));
        }
        if values.iter().zip(&mask).any(|(v, m)| *m && !v.is_finite()) {
            return Err(Error::InvalidArgument("slice values must be finite".into()));
        }
        Ok(Self { dim, h, radius, half_width, values, mask })
    }

    /// Samples `f` at every node with `|x| < R` on the smallest cube that
    /// holds the ball.
    pub fn from_fn(dim: usize, h: f64, radius: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if !(h > 0.0 && radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "slice needs positive spacing and radius (h = {h}, R = {radius})"
            )));
        }
        let half_width = math::ceil(radius / h) as usize;
        let len = cube_len(dim, half_width);
        let mut values = vec![0.0; len];
        let mut mask = vec![false; len];
        let mut js = vec![0i32; dim];
        let mut x = vec![0.0; dim];
        for off in 0..len {
            offset_to_multi(off, half_width, &mut js);
            for (xi, &j) in x.iter_mut().zip(&js) {
                *xi = j as f64 * h;
            }
            if math::norm(&x) < radius {
                mask[off] = true;
                values[off] = f(&x);
            }
        }
        Self::new(dim, h, radius, half_width, values, mask)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn half_width(&self) -> usize {
        self.half_width
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// Only the axis node is masked.
    pub fn is_thin(&self) -> bool {
        self.masked_count() <= 1
    }

    fn value_at(&self, js: &[i32]) -> Option<f64> {
        let off = multi_to_offset(js, self.half_width)?;
        self.mask[off].then(|| self.values[off])
    }

    /// Half-width of the output cube used by [`extend_slice`] by default.
    pub fn extended_half_width(&self) -> usize {
        math::ceil(2.0 * self.radius / self.h) as usize + 2
    }

    /// Value at an arbitrary point of the ball.
    ///
    /// Multilinear interpolation on the cell containing `y`; when that cell
    /// has unmasked corners the cell is shifted towards the origin (one-sided
    /// cells near the sphere). Failing that, the masked corners are
    /// renormalised, and finally the nearest masked node is used.
    pub fn interpolate(&self, y: &[f64]) -> Result<f64> {
        let m = self.dim;
        let mut base = vec![0i32; m];
        let mut frac = vec![0.0; m];
        let mut toward = vec![0i32; m];
        for k in 0..m {
            let s = y[k] / self.h;
            let b = math::floor(s);
            base[k] = b as i32;
            frac[k] = s - b;
            toward[k] = if y[k] >= 0.0 { -1 } else { 1 };
        }
        let corners = 1usize << m;
        let mut js = vec![0i32; m];
        let mut cell = vec![0i32; m];
        let mut vals = vec![0.0; corners];
        // shifts by subsets of axes, fewest shifts first
        let mut shifts: Vec<usize> = (0..corners).collect();
        shifts.sort_by_key(|s| s.count_ones());
        'shift: for &shift in &shifts {
            for k in 0..m {
                cell[k] = base[k] + if shift >> k & 1 == 1 { toward[k] } else { 0 };
            }
            for (c, v) in vals.iter_mut().enumerate() {
                for k in 0..m {
                    js[k] = cell[k] + (c >> k & 1) as i32;
                }
                match self.value_at(&js) {
                    Some(x) => *v = x,
                    None => continue 'shift,
                }
            }
            if vals.iter().all(|v| *v == vals[0]) {
                return Ok(vals[0]);
            }
            let mut acc = 0.0;
            for (c, v) in vals.iter().enumerate() {
                let mut w = 1.0;
                for k in 0..m {
                    let s = y[k] / self.h - cell[k] as f64;
                    w *= if c >> k & 1 == 1 { s } else { 1.0 - s };
                }
                acc += w * v;
            }
            return Ok(acc);
        }
        // no complete cell nearby: renormalise over masked corners
        let (mut acc, mut wsum) = (0.0, 0.0);
        let mut first = None;
        let mut same = true;
        for c in 0..corners {
            for k in 0..m {
                js[k] = base[k] + (c >> k & 1) as i32;
            }
            if let Some(v) = self.value_at(&js) {
                let mut w = 1.0;
                for k in 0..m {
                    w *= if c >> k & 1 == 1 { frac[k] } else { 1.0 - frac[k] };
                }
                if w > 0.0 {
                    match first {
                        None => first = Some(v),
                        Some(f) => same &= f == v,
                    }
                    acc += w * v;
                    wsum += w;
                }
            }
        }
        if wsum > 0.0 {
            return Ok(if same { first.unwrap_or(0.0) } else { acc / wsum });
        }
        self.nearest(y)
    }

    fn nearest(&self, y: &[f64]) -> Result<f64> {
        let m = self.dim;
        let mut js = vec![0i32; m];
        let mut x = vec![0.0; m];
        let mut best: Option<(f64, f64)> = None;
        for off in 0..self.values.len() {
            if !self.mask[off] {
                continue;
            }
            offset_to_multi(off, self.half_width, &mut js);
            for (xi, &j) in x.iter_mut().zip(&js) {
                *xi = j as f64 * self.h;
            }
            let d = math::dist(&x, y);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, self.values[off]));
            }
        }
        match best {
            Some((d, v)) if d <= (1.0 + math::sqrt(m as f64)) * self.h => Ok(v),
            Some((d, _)) => Err(Error::Internal(format!(
                "interpolation target {d} away from the nearest masked node (h = {})",
                self.h
            ))),
            None => Err(Error::InvalidArgument("slice has no masked nodes".into())),
        }
    }
}

/// `E^R u` on the cube `[-K_out, K_out]ᵐ` with the slice's spacing.
pub fn extend_slice(slice: &BallSlice, out_half_width: usize) -> Result<Vec<f64>> {
    Ok(extend_slice_marked(slice, out_half_width)?.0)
}

/// [`extend_slice`] plus the nodes lying exactly on the sphere `|x| = R`.
///
/// Those nodes carry the value 0 of the formula but are not used as
/// neighbours in difference stencils: a measure-zero value would otherwise
/// show up as an `O(1/h)` spike in the discrete gradient.
pub fn extend_slice_marked(slice: &BallSlice, out_half_width: usize) -> Result<(Vec<f64>, Vec<bool>)> {
    let m = slice.dim;
    let r_ball = slice.radius;
    let len = cube_len(m, out_half_width);
    let mut out = vec![0.0; len];
    let mut sphere = vec![false; len];
    let mut js = vec![0i32; m];
    let mut x = vec![0.0; m];
    let mut y = vec![0.0; m];
    for (off, o) in out.iter_mut().enumerate() {
        offset_to_multi(off, out_half_width, &mut js);
        if let Some(v) = slice.value_at(&js) {
            *o = v;
            continue;
        }
        for (xi, &j) in x.iter_mut().zip(&js) {
            *xi = j as f64 * slice.h;
        }
        let r = math::norm(&x);
        if r == r_ball {
            sphere[off] = true;
            continue;
        }
        if r >= 2.0 * r_ball {
            continue;
        }
        if r < r_ball {
            // not in the mask although inside: fill from the neighbours
            *o = slice.interpolate(&x)?;
            continue;
        }
        let scale = r_ball * r_ball / (r * r);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi = scale * xi;
        }
        *o = slice.interpolate(&y)? * cutoff(r / r_ball);
    }
    Ok((out, sphere))
}

/// Strip extension `ũ(t, ·) = E^{ψ(t)} u(t, ·)`.
#[derive(Debug, Clone)]
pub struct ExtendedField {
    pub strip: StripFunction,
    /// `2ψ(t)` per slice.
    pub support_radius: Vec<f64>,
    /// Slices holding only the axis node (extended as constants times the
    /// cutoff).
    pub thin_slices: usize,
    /// Strip nodes exactly on `|x| = ψ(t)`; see [`extend_slice_marked`].
    pub on_sphere: Vec<bool>,
}

impl ExtendedField {
    /// `|∇χ ũ|` slice by slice, with sphere nodes left out of the stencils.
    pub fn chi_gradient_magnitude(&self) -> StripFunction {
        let l = self.strip.lattice();
        let len = l.slice_len();
        let mut out = Vec::with_capacity(l.len());
        let usable: Vec<bool> = self.on_sphere.iter().map(|s| !s).collect();
        for s in 0..l.slices() {
            let range = s * len..(s + 1) * len;
            out.extend(cube_gradient(
                &self.strip.values()[range.clone()],
                None,
                Some(&usable[range]),
                l.dim() - 1,
                l.half_width(),
                l.h_x(),
            ));
        }
        StripFunction::new(l.clone(), out).expect("finite differences of finite values")
    }
}

/// Extends a grid function on `Ω_ψ` slice by slice to the strip lattice with
/// `|x| ≤ 2ψ(1) + 2h_x`.
pub fn extend_domain(u: &GridFunction<'_>, domain: &CuspDomain) -> Result<ExtendedField> {
    let grid = u.grid();
    if grid.fingerprint() != domain.profile().fingerprint() || grid.dim() != domain.dim() {
        return Err(Error::InvalidArgument("grid was not built for this domain".into()));
    }
    let src = grid.lattice();
    let m = grid.dim() - 1;
    let h = grid.h_x();
    let top = domain.profile().top();
    let k_ext = (math::ceil(2.0 * top / h) as usize + 2).max(src.half_width());
    let lattice = Lattice::new(grid.dim(), grid.h_t(), h, src.t0(), src.slices(), k_ext)?;
    let slice_len = lattice.slice_len();
    let src_len = src.slice_len();
    let mut values = vec![0.0; lattice.len()];
    let mut support_radius = Vec::with_capacity(src.slices());
    let mut thin_slices = 0;
    let mut on_sphere = vec![false; lattice.len()];
    let mut js = vec![0i32; m];
    for s in 0..src.slices() {
        let radius = domain.profile().eval(src.t(s))?;
        support_radius.push(2.0 * radius);
        let mut vals = vec![0.0; src_len];
        let mut mask = vec![false; src_len];
        for node in grid.slice_nodes(s) {
            let off = grid.lattice_index(node) - s * src_len;
            vals[off] = u.values()[node];
            mask[off] = true;
        }
        let ball = BallSlice::new(m, h, radius, src.half_width(), vals, mask)?;
        if ball.is_thin() {
            thin_slices += 1;
        }
        let (ext, sphere) = extend_slice_marked(&ball, k_ext)?;
        values[s * slice_len..(s + 1) * slice_len].copy_from_slice(&ext);
        on_sphere[s * slice_len..(s + 1) * slice_len].copy_from_slice(&sphere);
        // identity on the masked nodes, whatever the lattice rounding
        for node in grid.slice_nodes(s) {
            grid.multi_index(node, &mut js);
            let off = multi_to_offset(&js, k_ext).expect("output cube covers the grid");
            values[s * slice_len + off] = u.values()[node];
        }
    }
    Ok(ExtendedField { strip: StripFunction::new(lattice, values)?, support_radius, thin_slices, on_sphere })
}

/// `|∇f|` on a cube of nodes by finite differences at the nodes selected by
/// `compute`, using only `usable` nodes as neighbours. Axes without a usable
/// neighbour contribute zero; an unusable node gets central differences only.
fn cube_gradient(
    values: &[f64],
    compute: Option<&[bool]>,
    usable: Option<&[bool]>,
    m: usize,
    half_width: usize,
    h: f64,
) -> Vec<f64> {
    let side = side_len(half_width);
    let ok = |off: usize| usable.is_none_or(|u| u[off]);
    let mut out = vec![0.0; values.len()];
    for (off, o) in out.iter_mut().enumerate() {
        if !compute.is_none_or(|c| c[off]) {
            continue;
        }
        let own = ok(off);
        let mut sq = 0.0;
        for k in 0..m {
            let stride = side.pow((m - 1 - k) as u32);
            let digit = off / stride % side;
            let lo = (digit > 0 && ok(off - stride)).then(|| values[off - stride]);
            let hi = (digit + 1 < side && ok(off + stride)).then(|| values[off + stride]);
            let d = match (lo, hi) {
                (Some(a), Some(b)) => (b - a) / (2.0 * h),
                (None, Some(b)) if own => (b - values[off]) / h,
                (Some(a), None) if own => (values[off] - a) / h,
                _ => 0.0,
            };
            sq += d * d;
        }
        *o = math::sqrt(sq);
    }
    out
}

/// Ratio of gradient norms of an extension and its source slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientRatio {
    Ratio(f64),
    /// The source gradient vanishes; only the numerator is meaningful.
    Flagged { numerator: f64 },
}

impl GradientRatio {
    pub fn ratio(self) -> Option<f64> {
        match self {
            GradientRatio::Ratio(r) => Some(r),
            GradientRatio::Flagged { .. } => None,
        }
    }
}

/// `‖∇(E^R u)‖_p / ‖∇u‖_{p, B(0,R)}`, both by finite differences with cell
/// volume `hᵐ`.
pub fn extension_gradient_ratio(slice: &BallSlice, p: Exponent) -> Result<GradientRatio> {
    let m = slice.dim;
    let k_out = slice.extended_half_width();
    let (ext, sphere) = extend_slice_marked(slice, k_out)?;
    let usable: Vec<bool> = sphere.iter().map(|s| !s).collect();
    let cell = math::powf(slice.h, m as f64);
    let num_grad = cube_gradient(&ext, None, Some(&usable), m, k_out, slice.h);
    let numerator = lp_norm(&num_grad, &vec![cell; num_grad.len()], p);
    let den_grad = cube_gradient(&slice.values, Some(&slice.mask), Some(&slice.mask), m, slice.half_width, slice.h);
    let (vals, wts): (Vec<f64>, Vec<f64>) =
        den_grad.iter().zip(&slice.mask).filter(|(_, mk)| **mk).map(|(g, _)| (*g, cell)).unzip();
    let denominator = lp_norm(&vals, &wts, p);
    Ok(if denominator > 0.0 {
        GradientRatio::Ratio(numerator / denominator)
    } else {
        GradientRatio::Flagged { numerator }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{sample_function, Family};
    use crate::geometry::{build_grid, CuspProfile, GridSpec};

    #[test]
    fn cutoff_values() {
        assert_eq!(cutoff_eval(&[0.5]), 1.0);
        assert_eq!(cutoff_eval(&[2.5]), 0.0);
        assert_eq!(cutoff(1.5), 0.5);
        assert_eq!(cutoff(1.25), 0.896484375);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let q = cutoff(1.0 + i as f64 / 1000.0);
            assert!(q <= prev && (0.0..=1.0).contains(&q));
            prev = q;
        }
        // flat at both ends
        assert!((1.0 - cutoff(1.0 + 1e-4)) < 1e-10);
        assert!(cutoff(2.0 - 1e-4) < 1e-10);
    }

    #[test]
    fn reflection_of_a_line() {
        let slice = BallSlice::from_fn(1, 0.25, 1.0, |y| y[0]).unwrap();
        let ext = extend_slice(&slice, 9).unwrap();
        let at = |j: i32| ext[(j + 9) as usize];
        // x = 1.25 reflects to 0.8
        assert!((at(5) - 0.7171875).abs() < 1e-14);
        assert!((at(-5) + 0.7171875).abs() < 1e-14);
        assert_eq!(at(4), 0.0);
        assert_eq!(at(8), 0.0);
        assert_eq!(at(9), 0.0);
        for j in -3..=3 {
            assert_eq!(at(j), j as f64 * 0.25);
        }
    }

    #[test]
    fn constant_slice_is_constant_times_cutoff() {
        for m in [1, 2] {
            let h = 0.1;
            let slice = BallSlice::from_fn(m, h, 1.0, |_| 3.0).unwrap();
            let k = slice.extended_half_width();
            let ext = extend_slice(&slice, k).unwrap();
            let mut js = vec![0i32; m];
            let mut x = vec![0.0; m];
            for (off, v) in ext.iter().enumerate() {
                offset_to_multi(off, k, &mut js);
                for (xi, &j) in x.iter_mut().zip(&js) {
                    *xi = j as f64 * h;
                }
                let r = math::norm(&x);
                let expected = if r == 1.0 { 0.0 } else { 3.0 * cutoff(r) };
                assert!((v - expected).abs() < 1e-14, "m = {m}, x = {x:?}: {v} vs {expected}");
            }
        }
    }

    #[test]
    fn identity_and_support_are_exact() {
        let f = |y: &[f64]| (3.0 * y[0]).sin() + y[1] * y[1];
        let slice = BallSlice::from_fn(2, 0.05, 0.7, f).unwrap();
        let k = slice.extended_half_width();
        let ext = extend_slice(&slice, k).unwrap();
        let mut js = [0i32; 2];
        for (off, v) in ext.iter().enumerate() {
            offset_to_multi(off, k, &mut js);
            let x = [js[0] as f64 * 0.05, js[1] as f64 * 0.05];
            let r = math::norm(&x);
            if r < 0.7 {
                assert_eq!(*v, f(&x));
            } else if r >= 1.4 {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn reflection_round_trip() {
        // dividing by the cutoff and reflecting back recovers u up to the
        // interpolation error 2h·Lip(u)
        let h = 0.02;
        let f = |y: &[f64]| (2.0 * y[0]).sin() * (y[1] + 1.0);
        let lip = 2.0 * 2.0 + 1.0;
        let slice = BallSlice::from_fn(2, h, 0.5, f).unwrap();
        let k = slice.extended_half_width();
        let ext = extend_slice(&slice, k).unwrap();
        let mut js = [0i32; 2];
        let mut checked = 0;
        for (off, v) in ext.iter().enumerate() {
            offset_to_multi(off, k, &mut js);
            let x = [js[0] as f64 * h, js[1] as f64 * h];
            let r = math::norm(&x);
            if r > 0.5 && r < 0.95 {
                let y = [0.25 * x[0] / (r * r), 0.25 * x[1] / (r * r)];
                let back = v / cutoff(r / 0.5);
                assert!((back - f(&y)).abs() <= 2.0 * h * lip, "x = {x:?}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn thin_slice_uses_the_axis_value() {
        let slice = BallSlice::from_fn(2, 0.1, 0.05, |_| 2.0).unwrap();
        assert!(slice.is_thin());
        let ext = extend_slice(&slice, 3).unwrap();
        assert_eq!(ext[multi_to_offset(&[0, 0], 3).unwrap()], 2.0);
        assert_eq!(ext[multi_to_offset(&[1, 0], 3).unwrap()], 0.0);
        let wide = BallSlice::from_fn(1, 0.1, 0.15, |_| 2.0).unwrap();
        assert_eq!(wide.masked_count(), 3);
    }

    #[test]
    fn gradient_ratio_is_scale_invariant_for_lines() {
        let p = Exponent::new(2.0).unwrap();
        let ratios: Vec<f64> = [1.0, 0.1, 0.01]
            .iter()
            .map(|&r| {
                let s = BallSlice::from_fn(1, r / 32.0, r, |y| y[0]).unwrap();
                extension_gradient_ratio(&s, p).unwrap().ratio().unwrap()
            })
            .collect();
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).abs() < 0.05, "{ratios:?}");
        }
        let flat = BallSlice::from_fn(1, 1.0 / 32.0, 1.0, |_| 1.0).unwrap();
        match extension_gradient_ratio(&flat, p).unwrap() {
            GradientRatio::Flagged { numerator } => assert!(numerator > 0.0),
            other => panic!("expected a flagged ratio, got {other:?}"),
        }
    }

    #[test]
    fn domain_extension_restricts_to_u() {
        let d = CuspDomain::new(2, CuspProfile::power(1.0, 2.0).unwrap()).unwrap();
        let g = build_grid(&d, &GridSpec::uniform(1.0 / 16.0)).unwrap();
        let u = sample_function(&g, &Family::Linear { c_t: 1.0, c_x: vec![0.5] }).unwrap();
        let ext = extend_domain(&u, &d).unwrap();
        let l = ext.strip.lattice();
        let mut js = [0i32];
        for node in 0..g.len() {
            let s = g.multi_index(node, &mut js);
            assert_eq!(ext.strip.values()[l.index(s, &js).unwrap()], u.values()[node]);
        }
        assert!(ext.thin_slices > 0);
        let mut z = [0.0; 2];
        for (idx, v) in ext.strip.values().iter().enumerate() {
            l.point(idx, &mut z);
            let s = idx / l.slice_len();
            if z[1].abs() >= ext.support_radius[s] {
                assert_eq!(*v, 0.0);
            }
        }
        assert!(l.half_width() as f64 * l.h_x() >= 2.0 + 2.0 * l.h_x() - 1e-12);
    }

    #[test]
    fn constant_on_a_cylinder_extends_with_the_cutoff() {
        let d = CuspDomain::new(2, CuspProfile::table(&[(1.0, 1.0)]).unwrap()).unwrap();
        let g = build_grid(&d, &GridSpec::uniform(0.125)).unwrap();
        let u = GridFunction::constant(&g, 2.0);
        let ext = extend_domain(&u, &d).unwrap();
        let l = ext.strip.lattice();
        let mut z = [0.0; 2];
        for (idx, v) in ext.strip.values().iter().enumerate() {
            l.point(idx, &mut z);
            let r = z[1].abs();
            let expected = if r == 1.0 { 0.0 } else { 2.0 * cutoff(r) };
            assert!((v - expected).abs() < 1e-14);
        }
        assert_eq!(ext.thin_slices, 0);
    }

    #[test]
    fn foreign_grid_is_rejected() {
        let d = CuspDomain::new(2, CuspProfile::power(1.0, 2.0).unwrap()).unwrap();
        let other = CuspDomain::new(2, CuspProfile::power(1.0, 1.0).unwrap()).unwrap();
        let g = build_grid(&d, &GridSpec::uniform(0.125)).unwrap();
        let u = GridFunction::constant(&g, 1.0);
        assert!(extend_domain(&u, &other).is_err());
    }
}
