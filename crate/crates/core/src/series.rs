//! Summation engine for the alternating hypergeometric-type series used by
//! every evaluator in the crate.
//!
//! A series is described by its first term and the ratio of consecutive
//! terms, both built from exactly representable `f64` pieces so that the
//! extended backend sees the exact parameters.

use crate::error::{Error, Result};
use crate::extended::{Arith, Bits, Ext, MIN_EXTENDED_BITS};
use crate::math;

/// Relative truncation threshold for the last terms.
pub(crate) const TRUNCATION_EPS: f64 = 1e-17;
/// Consecutive negligible terms required before stopping.
pub(crate) const NEGLIGIBLE_RUN: usize = 3;
pub(crate) const WORKING_TERM_CAP: usize = 500;
pub(crate) const EXTENDED_TERM_CAP: usize = 2000;
/// Above this cancellation index the working-precision sum is redone in
/// extended precision.
pub(crate) const CANCELLATION_LIMIT: f64 = 1e6;
/// Rounding-error growth per recurrence step (flops in one ratio update).
const STEP_ROUNDING: f64 = 6.0;

/// Term recurrence `t_{n+1} = t_n * num(n) / den(n)`.
pub(crate) trait Recurrence {
    fn first<T: Arith>(&self, ctx: T::Ctx) -> T;
    fn ratio<T: Arith>(&self, n: usize, ctx: T::Ctx) -> (T, T);
    /// Index after which the terms decrease in magnitude.
    fn hump(&self) -> f64;
    /// Optional weight multiplying term `n` (used for termwise derivatives).
    fn weight<T: Arith>(&self, _n: usize, _ctx: T::Ctx) -> Option<T> {
        None
    }
}

/// Raw outcome of a summation before it is scaled into an `Evaluation`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SeriesSum {
    pub value: f64,
    pub abs_sum: f64,
    pub first_omitted: f64,
    pub rounding_bound: f64,
    pub terms: usize,
    pub extended: bool,
}

impl SeriesSum {
    pub fn cancellation_index(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_sum == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.abs_sum / self.value.abs()).max(1.0)
        }
    }

    pub fn error_estimate(&self) -> f64 {
        self.first_omitted.abs() + self.rounding_bound
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

trait Accumulator<T> {
    fn push(&mut self, t: &T);
    fn total(&self) -> T;
}

impl Accumulator<f64> for CompensatedSum {
    fn push(&mut self, t: &f64) {
        self.add(*t);
    }
    fn total(&self) -> f64 {
        self.value()
    }
}

struct PlainSum(Ext);

impl Accumulator<Ext> for PlainSum {
    fn push(&mut self, t: &Ext) {
        self.0 = self.0.add(t);
    }
    fn total(&self) -> Ext {
        self.0.clone()
    }
}

fn run<T: Arith, R: Recurrence, A: Accumulator<T>>(
    rec: &R,
    ctx: T::Ctx,
    mut acc: A,
    cap: usize,
    z: f64,
) -> Result<SeriesSum> {
    let unit = T::unit_roundoff(ctx);
    let hump = rec.hump();
    let mut term: T = rec.first(ctx);
    let mut abs_sum = 0.0;
    let mut step_weighted = 0.0;
    let mut run_len = 0;
    let mut n = 0usize;
    loop {
        let weighted = match rec.weight::<T>(n, ctx) {
            Some(w) => term.mul(&w),
            None => term.clone(),
        };
        acc.push(&weighted);
        let mag = weighted.to_f64().abs();
        if !mag.is_finite() {
            return Err(Error::NonConvergence { terms: n + 1, z });
        }
        abs_sum += mag;
        step_weighted += (STEP_ROUNDING * n as f64 + 1.0) * mag;

        let partial = acc.total().to_f64().abs();
        let floor = partial.max(unit * abs_sum);
        if n as f64 > hump && mag <= TRUNCATION_EPS * floor {
            run_len += 1;
        } else {
            run_len = 0;
        }

        let (num, den) = rec.ratio::<T>(n, ctx);
        term = term.mul(&num).div(&den);

        if run_len >= NEGLIGIBLE_RUN {
            let next = match rec.weight::<T>(n + 1, ctx) {
                Some(w) => term.mul(&w),
                None => term,
            };
            let value = acc.total().to_f64();
            return Ok(SeriesSum {
                value,
                abs_sum,
                first_omitted: next.to_f64().abs(),
                rounding_bound: unit * (step_weighted + abs_sum),
                terms: n + 1,
                extended: false,
            });
        }
        n += 1;
        if n >= cap {
            return Err(Error::NonConvergence { terms: n, z });
        }
    }
}

/// Base-2 logarithm of the largest term magnitude, traced in `f64` logs.
fn log2_peak<R: Recurrence>(rec: &R) -> f64 {
    let mut log_t = {
        let t: f64 = rec.first(());
        math::ln(t.abs())
    };
    let mut peak = log_t;
    let hump = rec.hump();
    for n in 0..EXTENDED_TERM_CAP {
        let (num, den): (f64, f64) = rec.ratio(n, ());
        log_t += math::ln(num.abs()) - math::ln(den.abs());
        let w = rec.weight::<f64>(n + 1, ()).map_or(0.0, |w| math::ln(w.abs().max(1.0)));
        peak = peak.max(log_t + w);
        if n as f64 > hump + 2.0 && log_t < peak - 60.0 {
            break;
        }
    }
    peak / core::f64::consts::LN_2
}

pub(crate) fn sum_working<R: Recurrence>(rec: &R, z: f64) -> Result<SeriesSum> {
    run::<f64, R, _>(rec, (), CompensatedSum::default(), WORKING_TERM_CAP, z)
}

pub(crate) fn sum_extended<R: Recurrence>(rec: &R, z: f64) -> Result<SeriesSum> {
    let peak = log2_peak(rec);
    let extra = if peak.is_finite() && peak > 0.0 { math::ceil(peak) as usize } else { 0 };
    let bits = MIN_EXTENDED_BITS.max(extra + 128);
    let ctx = Bits(bits);
    let acc = PlainSum(Ext::lift(0.0, ctx));
    let mut s = run::<Ext, R, _>(rec, ctx, acc, EXTENDED_TERM_CAP, z)?;
    // The result is handed back as f64.
    s.rounding_bound += f64::EPSILON * s.value.abs();
    s.extended = true;
    Ok(s)
}

/// Working precision first; extended when cancellation or the term cap
/// demands it.
pub(crate) fn sum_auto<R: Recurrence>(rec: &R, z: f64) -> Result<SeriesSum> {
    match sum_working(rec, z) {
        Ok(s) if s.cancellation_index() <= CANCELLATION_LIMIT => Ok(s),
        _ => sum_extended(rec, z),
    }
}

// ---------------------------------------------------------------------------
// Recurrences

/// `1F2(1; b1, b2; coeff * z^2)`, term `n` is `x^n / ((b1)_n (b2)_n)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Hyp1F2 {
    pub b1: f64,
    pub b2: f64,
    pub z: f64,
    /// Exact multiplier of `z^2` forming the argument (e.g. -1/4).
    pub coeff: f64,
    /// When set, term `n` is weighted by `w0 + 2n`.
    pub weight_base: Option<f64>,
}

impl Hyp1F2 {
    pub fn new(b1: f64, b2: f64, z: f64, coeff: f64) -> Self {
        Hyp1F2 { b1, b2, z, coeff, weight_base: None }
    }

    /// Series in a raw argument `x` (taken as `1 * x`).
    pub fn with_argument(b1: f64, b2: f64, x: f64) -> Self {
        Hyp1F2 { b1, b2, z: 1.0, coeff: x, weight_base: None }
    }
}

impl Recurrence for Hyp1F2 {
    fn first<T: Arith>(&self, ctx: T::Ctx) -> T {
        T::lift(1.0, ctx)
    }

    fn ratio<T: Arith>(&self, n: usize, ctx: T::Ctx) -> (T, T) {
        let z = T::lift(self.z, ctx);
        let num = z.mul(&z).mul(&T::lift(self.coeff, ctx));
        let nn = T::lift(n as f64, ctx);
        let den = T::lift(self.b1, ctx)
            .add(&nn)
            .mul(&T::lift(self.b2, ctx).add(&nn));
        (num, den)
    }

    fn hump(&self) -> f64 {
        let x = (self.coeff * self.z * self.z).abs();
        math::sqrt(x)
    }

    fn weight<T: Arith>(&self, n: usize, ctx: T::Ctx) -> Option<T> {
        self.weight_base
            .map(|w0| T::lift(w0, ctx).add(&T::lift(2.0 * n as f64, ctx)))
    }
}

/// `m`-th derivative of `sum_n (-1)^n z^{2n} / (a)_{2n}`, summed from the first
/// term that survives differentiation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PhiSeries {
    pub a: f64,
    pub z: f64,
    pub m: u8,
}

impl PhiSeries {
    fn start(&self) -> usize {
        (self.m as usize).div_ceil(2)
    }
}

impl Recurrence for PhiSeries {
    fn first<T: Arith>(&self, ctx: T::Ctx) -> T {
        let a = T::lift(self.a, ctx);
        let a1 = a.add(&T::lift(1.0, ctx));
        match self.m {
            0 => T::lift(1.0, ctx),
            1 => T::lift(-2.0, ctx).mul(&T::lift(self.z, ctx)).div(&a.mul(&a1)),
            _ => T::lift(-2.0, ctx).div(&a.mul(&a1)),
        }
    }

    fn ratio<T: Arith>(&self, i: usize, ctx: T::Ctx) -> (T, T) {
        let n = (self.start() + i) as f64;
        let m = self.m as f64;
        let z = T::lift(self.z, ctx);
        let num = z
            .mul(&z)
            .mul(&T::lift(-(2.0 * n + 2.0) * (2.0 * n + 1.0), ctx));
        let a = T::lift(self.a, ctx);
        let den = T::lift((2.0 * n + 2.0 - m) * (2.0 * n + 1.0 - m), ctx)
            .mul(&a.add(&T::lift(2.0 * n, ctx)))
            .mul(&a.add(&T::lift(2.0 * n + 1.0, ctx)));
        (num, den)
    }

    fn hump(&self) -> f64 {
        self.z.abs() / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn compensated_sum_recovers_lost_bits() {
        let mut s = CompensatedSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn hyp_at_zero_argument_is_one() {
        let s = sum_auto(&Hyp1F2::new(0.3, 1.7, 0.0, -0.25), 0.0).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.cancellation_index(), 1.0);
    }

    #[test]
    fn phi_series_at_mu_zero_is_sinc() {
        // a = 2 gives (2)_{2n} = (2n+1)!, i.e. sin z / z.
        for &z in &[0.5, 3.0, 9.0] {
            let s = sum_auto(&PhiSeries { a: 2.0, z, m: 0 }, z).unwrap();
            assert!(close(s.value, libm::sin(z) / z, 1e-14), "{z}");
        }
    }

    #[test]
    fn large_argument_switches_to_extended() {
        let z = 40.0;
        let s = sum_auto(&PhiSeries { a: 2.0, z, m: 0 }, z).unwrap();
        assert!(s.extended);
        assert!((s.value - libm::sin(z) / z).abs() < 1e-16);
    }

    #[test]
    fn working_precision_reports_cap() {
        let err = sum_working(&PhiSeries { a: 2.0, z: 700.0, m: 0 }, 700.0).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
