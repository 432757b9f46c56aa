//! Floating-point helpers shared across the crate.
//!
//! The crate builds without `std` when the `libm` feature supplies the
//! transcendental functions; the shims below pick whichever backend is
//! available.

/// ln(2π)/2, used by the Lanczos series.
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

const PI: f64 = core::f64::consts::PI;

#[cfg(feature = "std")]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[cfg(feature = "std")]
#[inline]
fn sin(x: f64) -> f64 {
    x.sin()
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline]
fn sin(x: f64) -> f64 {
    libm::sin(x)
}

/// Lanczos coefficients for g = 7, nine terms. Good to ~1e-15 relative
/// error over the positive reals, comfortably past the 1e-12 the scoring
/// code needs.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)] // published constants, kept verbatim
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the Gamma function for positive arguments.
///
/// Uses the Lanczos approximation with reflection below 1/2. Arguments
/// at or below zero are outside the domain this crate needs and return
/// NaN (or +inf at the pole x = 0).
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.5 {
        // Reflection: ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x)
        return ln(PI / sin(PI * x)) - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * ln(t) - t + ln(series)
}
