// Thin wrappers so the rest of the crate reads like std float code.

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
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
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// True when `x` is exactly an integer `<= 0`.
pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == floor(x)
}

/// True when `x` is exactly an odd negative integer.
pub(crate) fn is_odd_negative_integer(x: f64) -> bool {
    x < 0.0 && x == floor(x) && {
        let half = x / 2.0;
        half != floor(half)
    }
}

/// Distance from `x` to the next representable f64 above `|x|`.
pub(crate) fn ulp(x: f64) -> f64 {
    let a = libm::fabs(x);
    if a == 0.0 {
        f64::MIN_POSITIVE
    } else {
        libm::nextafter(a, f64::INFINITY) - a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_predicates() {
        assert!(is_odd_negative_integer(-1.0));
        assert!(is_odd_negative_integer(-3.0));
        assert!(!is_odd_negative_integer(-2.0));
        assert!(!is_odd_negative_integer(-1.5));
        assert!(!is_odd_negative_integer(1.0));
        assert!(is_nonpositive_integer(0.0));
        assert!(is_nonpositive_integer(-4.0));
        assert!(!is_nonpositive_integer(-0.5));
        assert!(!is_nonpositive_integer(2.0));
    }
}
