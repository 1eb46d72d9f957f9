use alloc::format;

use super::CuspProfile;
use crate::math;
use crate::{Error, Result};

/// `Ω_ψ ⊂ ℝⁿ`, points written `z = (t, x)` with `x ∈ ℝⁿ⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspDomain {
    n: usize,
    profile: CuspProfile,
}

/// `S_x = (τ(x), 2)`: the heights at which `(t, x)` lies in the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSection {
    pub start: f64,
    pub end: f64,
}

impl SliceSection {
    pub fn contains(&self, t: f64) -> bool {
        t > self.start && t < self.end
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

impl CuspDomain {
    pub fn new(n: usize, profile: CuspProfile) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {n}")));
        }
        Ok(Self { n, profile })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> &CuspProfile {
        &self.profile
    }

    /// `0 < t < 2` and `|x| < ψ(t)`.
    pub fn contains(&self, z: &[f64]) -> bool {
        if z.len() != self.n {
            return false;
        }
        let t = z[0];
        t > 0.0 && t < 2.0 && math::norm(&z[1..]) < self.profile.eval_unchecked(t)
    }

    pub fn t_section(&self, x: &[f64]) -> Result<SliceSection> {
        if x.len() + 1 != self.n {
            return Err(Error::InvalidArgument(format!(
                "section point has {} coordinates, expected {}",
                x.len(),
                self.n - 1
            )));
        }
        let start = self.profile.first_exceeding(math::norm(x))?;
        Ok(SliceSection { start, end: 2.0 })
    }

    /// `|Ω_ψ ∩ {t > t_min}|` in closed form.
    pub fn volume_above(&self, t_min: f64) -> f64 {
        let m = self.n - 1;
        math::unit_ball_volume(m) * self.profile.power_integral(m, t_min)
    }

    pub(crate) fn require_inside(&self, z: &[f64], label: &str) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { what: format!("{label} {z:?}") })
        }
    }
}
