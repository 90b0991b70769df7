//! Arithmetic backends for the series engine: plain `f64` and a binary
//! multi-precision float with a caller-chosen mantissa width.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

/// Smallest mantissa used in extended mode (about 57 decimal digits).
pub(crate) const MIN_EXTENDED_BITS: usize = 192;

/// The operations the series engine needs from a number type.
pub(crate) trait Arith: Clone {
    type Ctx: Copy;

    /// Exact embedding of an `f64`.
    fn lift(x: f64, ctx: Self::Ctx) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// Unit roundoff of one operation.
    fn unit_roundoff(ctx: Self::Ctx) -> f64;
}

impl Arith for f64 {
    type Ctx = ();

    #[inline]
    fn lift(x: f64, _: ()) -> Self {
        x
    }
    #[inline]
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    #[inline]
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    #[inline]
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }
    fn unit_roundoff(_: ()) -> f64 {
        f64::EPSILON / 2.0
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Bits(pub usize);

/// Multi-precision binary float rounded to `Bits` after every operation.
#[derive(Clone, Debug)]
pub(crate) struct Ext(FBig<HalfEven, 2>);

impl Arith for Ext {
    type Ctx = Bits;

    fn lift(x: f64, ctx: Bits) -> Self {
        // f64 -> FBig is exact; widening the precision never rounds.
        let v = FBig::<HalfEven, 2>::try_from(x).unwrap_or(FBig::ZERO);
        Ext(v.with_precision(ctx.0).value())
    }
    fn add(&self, other: &Self) -> Self {
        Ext(&self.0 + &other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        Ext(&self.0 * &other.0)
    }
    fn div(&self, other: &Self) -> Self {
        Ext(&self.0 / &other.0)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn unit_roundoff(ctx: Bits) -> f64 {
        libm::ldexp(1.0, -(ctx.0 as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_keeps_digits_f64_loses() {
        let ctx = Bits(MIN_EXTENDED_BITS);
        let big = Ext::lift(1e30, ctx);
        let one = Ext::lift(1.0, ctx);
        let neg = Ext::lift(-1e30, ctx);
        let r = big.add(&one).add(&neg);
        assert_eq!(r.to_f64(), 1.0);
        assert_eq!(1e30_f64 + 1.0 - 1e30, 0.0);
    }

    #[test]
    fn division_rounds_to_context() {
        let ctx = Bits(MIN_EXTENDED_BITS);
        let third = Ext::lift(1.0, ctx).div(&Ext::lift(3.0, ctx));
        let back = third.mul(&Ext::lift(3.0, ctx));
        assert!((back.to_f64() - 1.0).abs() < 1e-16);
    }
}
