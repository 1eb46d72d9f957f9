//! Thin wrappers over `libm` so the rest of the crate reads like std code.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Euclidean norm of a coordinate slice.
#[inline]
pub fn norm(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|v| v * v).sum())
}

/// Euclidean distance between two points of equal dimension.
#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum())
}

/// Volume of the unit ball in ℝ^m.
pub fn unit_ball_volume(m: usize) -> f64 {
    let (mut v, mut k) = if m % 2 == 0 { (1.0, 0) } else { (2.0, 1) };
    while k < m {
        k += 2;
        v *= 2.0 * core::f64::consts::PI / k as f64;
    }
    v
}
