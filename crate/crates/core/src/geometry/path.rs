use alloc::vec;
use alloc::vec::Vec;

use super::CuspDomain;
use crate::math;
use crate::Result;

/// A piecewise linear curve through `vertices`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub vertices: Vec<Vec<f64>>,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| math::dist(&w[0], &w[1])).sum()
    }

    /// Points along the curve no further than `spacing` apart, vertices included.
    pub fn sample(&self, spacing: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        if let Some(first) = self.vertices.first() {
            out.push(first.clone());
        }
        for w in self.vertices.windows(2) {
            let len = math::dist(&w[0], &w[1]);
            let steps = (math::ceil(len / spacing) as usize).max(1);
            for k in 1..=steps {
                let s = k as f64 / steps as f64;
                out.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + s * (b - a)).collect());
            }
        }
        out
    }
}

/// Joins `z1` to `z2` inside `Ω_ψ` by going up in `t` from the lower point and
/// then straight across the higher slice.
///
/// The corner is `(max t, x of the lower point)`; its length is
/// `|t₂ − t₁| + |x₁ − x₂| ≤ √2 |z₁ − z₂|`.
pub fn quasiconvex_path(domain: &CuspDomain, z1: &[f64], z2: &[f64]) -> Result<Polyline> {
    domain.require_inside(z1, "path endpoint")?;
    domain.require_inside(z2, "path endpoint")?;
    let corner: Vec<f64> = if z1[0] <= z2[0] {
        let mut c = z1.to_vec();
        c[0] = z2[0];
        c
    } else {
        let mut c = z2.to_vec();
        c[0] = z1[0];
        c
    };
    let mut vertices = vec![z1.to_vec()];
    for p in [corner, z2.to_vec()] {
        if vertices.last() != Some(&p) {
            vertices.push(p);
        }
    }
    Ok(Polyline { vertices })
}
