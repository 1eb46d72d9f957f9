use alloc::format;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::math;
use crate::{Error, Result};

/// How the profile is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `ψ(t) = a·tˢ` on `(0, 1]`.
    Power { amplitude: f64, exponent: f64 },
    /// Left-continuous step function: `ψ(t) = ψₖ` for `t ∈ (tₖ₋₁, tₖ]`.
    ///
    /// Stored normalised: every breakpoint lies in `(0, 1]` and the last one
    /// is exactly `t = 1`.
    Table { breakpoints: Vec<(f64, f64)> },
}

/// The increasing, left-continuous cusp profile `ψ`, extended to `(0, 2)` by
/// `ψ(t) = ψ(1)` on `(1, 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspProfile {
    kind: ProfileKind,
}

impl CuspProfile {
    pub fn power(amplitude: f64, exponent: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "power amplitude must be positive, got {amplitude}"
            )));
        }
        if !(exponent.is_finite() && exponent >= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "power exponent must be nonnegative, got {exponent}"
            )));
        }
        Ok(Self { kind: ProfileKind::Power { amplitude, exponent } })
    }

    /// Builds a step profile from `(t, ψ(t))` breakpoints.
    ///
    /// Breakpoints must have strictly increasing positive `t` and
    /// nondecreasing positive values. Breakpoints past `t = 1` only matter
    /// through `ψ(1)`.
    pub fn table(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidProfile("table has no breakpoints".into()));
        }
        for (k, &(t, v)) in points.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidProfile(format!("breakpoint t = {t} is not positive")));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "profile value {v} at t = {t} is not positive"
                )));
            }
            if k > 0 {
                let (tp, vp) = points[k - 1];
                if t <= tp {
                    return Err(Error::InvalidProfile(format!(
                        "breakpoints not strictly increasing at t = {t}"
                    )));
                }
                if v < vp {
                    return Err(Error::InvalidProfile(format!(
                        "profile decreases between t = {tp} and t = {t}"
                    )));
                }
            }
        }
        let psi_one = points
            .iter()
            .find(|&&(t, _)| t >= 1.0)
            .or(points.last())
            .map(|&(_, v)| v)
            .unwrap_or_default();
        let mut breakpoints: Vec<(f64, f64)> = points.iter().copied().filter(|&(t, _)| t < 1.0).collect();
        breakpoints.push((1.0, psi_one));
        Ok(Self { kind: ProfileKind::Table { breakpoints } })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// `ψ(t)` for `t ∈ (0, 2)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 2.0) {
            return Err(Error::OutOfDomain { what: format!("profile argument t = {t}") });
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        let t = if t > 1.0 { 1.0 } else { t };
        match &self.kind {
            ProfileKind::Power { amplitude, exponent } => amplitude * math::powf(t, *exponent),
            ProfileKind::Table { breakpoints } => {
                let k = breakpoints.partition_point(|&(tk, _)| tk < t);
                breakpoints[k.min(breakpoints.len() - 1)].1
            }
        }
    }

    /// `ψ(1)`, the radius of the cylindrical annex.
    pub fn top(&self) -> f64 {
        self.eval_unchecked(1.0)
    }

    /// `τ(r) = inf { t : ψ(t) > r }` for `0 ≤ r < ψ(1)`.
    pub fn first_exceeding(&self, r: f64) -> Result<f64> {
        let limit = self.top();
        if !(r >= 0.0 && r < limit) {
            return Err(Error::EmptySection { radius: r, limit });
        }
        Ok(match &self.kind {
            ProfileKind::Power { amplitude, exponent } => {
                if *exponent == 0.0 || r == 0.0 {
                    0.0
                } else {
                    math::powf(r / amplitude, 1.0 / exponent)
                }
            }
            ProfileKind::Table { breakpoints } => {
                let k = breakpoints.partition_point(|&(_, v)| v <= r);
                if k == 0 {
                    0.0
                } else {
                    breakpoints[k - 1].0
                }
            }
        })
    }

    /// `∫ ψ(t)^m dt` over `(a, 2)`, exact for both profile kinds.
    pub(crate) fn power_integral(&self, m: usize, a: f64) -> f64 {
        let a = a.max(0.0);
        let tail = (2.0 - a.max(1.0)).max(0.0) * libm::pow(self.top(), m as f64);
        if a >= 1.0 {
            return tail;
        }
        let head = match &self.kind {
            ProfileKind::Power { amplitude, exponent } => {
                let q = exponent * m as f64 + 1.0;
                libm::pow(*amplitude, m as f64) * (1.0 - math::powf(a, q)) / q
            }
            ProfileKind::Table { breakpoints } => {
                let mut acc = 0.0;
                let mut left = 0.0f64;
                for &(tk, v) in breakpoints {
                    let lo = left.max(a);
                    if tk > lo {
                        acc += (tk - lo) * libm::pow(v, m as f64);
                    }
                    left = tk;
                }
                acc
            }
        };
        head + tail
    }

    /// FNV-1a fingerprint of the canonical description, used in file headers.
    pub fn fingerprint(&self) -> u64 {
        let mut s = alloc::string::String::new();
        match &self.kind {
            ProfileKind::Power { amplitude, exponent } => {
                let _ = write!(s, "power:{amplitude}:{exponent}");
            }
            ProfileKind::Table { breakpoints } => {
                s.push_str("table");
                for (t, v) in breakpoints {
                    let _ = write!(s, ":{t},{v}");
                }
            }
        }
        fnv1a(s.as_bytes())
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
