//! Float helpers routed through `libm` so the crate stays `no_std`.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn powi(x: f64, n: u32) -> f64 {
    libm::pow(x, n as f64)
}

/// Ceiling to an integer count, never below `min`.
#[inline]
pub(crate) fn ceil_count(x: f64, min: u64) -> u64 {
    let c = libm::ceil(x);
    if !(c >= min as f64) {
        return min;
    }
    if c >= u64::MAX as f64 {
        u64::MAX
    } else {
        c as u64
    }
}
