//! Thin wrappers over `libm` so the rest of the crate reads like `std` float code.

pub(crate) use core::f64::consts::{PI, TAU};

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn tan(x: f64) -> f64 {
    libm::tan(x)
}

#[inline]
pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Reduce an angle to `[0, 2π)`.
pub(crate) fn wrap_angle(t: f64) -> f64 {
    let r = t - TAU * libm::floor(t / TAU);
    // `floor` can leave r == TAU for inputs a hair below a multiple of 2π.
    if !(0.0..TAU).contains(&r) {
        0.0
    } else {
        r
    }
}

/// Distance between two angles measured along the circle, in `[0, π]`.
pub(crate) fn circular_gap(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// `2|sin((a-b)/2)|`, the chord length `|e^{ia} - e^{ib}|`.
#[inline]
pub(crate) fn chord_length(a: f64, b: f64) -> f64 {
    2.0 * libm::fabs(sin(0.5 * (a - b)))
}
