//! Evaluation of `s_{mu,nu}(z)`, `phi_k(z)`, their derivatives, the
//! half-integer closed forms, and the residuals of the classical recurrences.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;
use crate::series::{self, Hyp1F2, PhiSeries, Recurrence, SeriesSum};

/// Validated `(mu, nu)` for `s_{mu,nu}`.
///
/// `s_{mu,nu}` is undefined when `mu + nu` or `mu - nu` is an odd negative
/// integer; such pairs are rejected at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LommelParams {
    mu: f64,
    nu: f64,
}

impl LommelParams {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !mu.is_finite() || !nu.is_finite() {
            return Err(Error::domain("mu and nu must be finite"));
        }
        if math::is_odd_negative_integer(mu - nu) {
            return Err(Error::domain(format!(
                "mu-nu is an odd negative integer (mu={mu}, nu={nu})"
            )));
        }
        if math::is_odd_negative_integer(mu + nu) {
            return Err(Error::domain(format!(
                "mu+nu is an odd negative integer (mu={mu}, nu={nu})"
            )));
        }
        Ok(LommelParams { mu, nu })
    }

    /// `(mu, 1/2)`, the family all the inequalities live in.
    pub fn half(mu: f64) -> Result<Self> {
        Self::new(mu, 0.5)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Validated `(mu, k)` for `phi_k`; requires `mu - k` not in `{0, -1, -2, ...}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiParams {
    mu: f64,
    k: u32,
}

impl PhiParams {
    pub fn new(mu: f64, k: u32) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain("mu must be finite"));
        }
        if math::is_nonpositive_integer(mu - k as f64) {
            return Err(Error::domain(format!(
                "mu-k is a nonpositive integer (mu={mu}, k={k})"
            )));
        }
        Ok(PhiParams { mu, k })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Parameters of `phi_{k+1}` for the same `mu`.
    pub fn next(&self) -> Result<Self> {
        Self::new(self.mu, self.k + 1)
    }

    /// `mu - k + 2`, the Pochhammer base of the series.
    fn pochhammer_base(&self) -> f64 {
        self.mu - self.k as f64 + 2.0
    }
}

/// Order of differentiation, `0..=2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DerivativeOrder(u8);

impl DerivativeOrder {
    pub const VALUE: Self = DerivativeOrder(0);
    pub const FIRST: Self = DerivativeOrder(1);
    pub const SECOND: Self = DerivativeOrder(2);

    pub fn new(m: u8) -> Result<Self> {
        if m > 2 {
            return Err(Error::domain(format!("derivative order {m} not in 0..=2")));
        }
        Ok(DerivativeOrder(m))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Series,
    Quadrature,
    ClosedForm,
    Product,
    Recurrence,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed-form",
            Method::Product => "product",
            Method::Recurrence => "recurrence",
        }
    }
}

/// A computed value with its error bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Claimed upper bound on `|value - exact|`.
    pub abs_error_estimate: f64,
    pub terms_used: usize,
    pub method: Method,
    /// `sum |term| / |result|`, at least 1.
    pub cancellation_index: f64,
    /// Whether the extended-precision backend produced the value.
    pub extended: bool,
}

impl Evaluation {
    fn from_series(s: &SeriesSum, scale: f64) -> Self {
        let value = s.value * scale;
        Evaluation {
            value,
            // The scale factor carries a few roundings of its own.
            abs_error_estimate: s.error_estimate() * scale.abs() + 4.0 * f64::EPSILON * value.abs(),
            terms_used: s.terms,
            method: Method::Series,
            cancellation_index: s.cancellation_index(),
            extended: s.extended,
        }
    }

    /// Relative error estimate (infinite for a zero value with nonzero error).
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_error_estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_error_estimate / self.value.abs()
        }
    }
}

/// Working precision escalates automatically; extended always uses the
/// multi-precision backend.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Working,
    Extended,
}

/// Series evaluator carrying the precision policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Evaluator {
    pub precision: Precision,
}

impl Evaluator {
    pub fn new(precision: Precision) -> Self {
        Evaluator { precision }
    }

    fn sum<R: Recurrence>(&self, rec: &R, z: f64) -> Result<SeriesSum> {
        match self.precision {
            Precision::Working => series::sum_auto(rec, z),
            Precision::Extended => series::sum_extended(rec, z),
        }
    }

    /// `1F2(1; b1, b2; x)`.
    pub fn hyp1f2_unit(&self, b1: f64, b2: f64, x: f64) -> Result<Evaluation> {
        if math::is_nonpositive_integer(b1) || math::is_nonpositive_integer(b2) {
            return Err(Error::domain(format!(
                "1F2 lower parameter is a nonpositive integer (b1={b1}, b2={b2})"
            )));
        }
        if !x.is_finite() {
            return Err(Error::domain("1F2 argument must be finite"));
        }
        let s = self.sum(&Hyp1F2::with_argument(b1, b2, x), math::sqrt(4.0 * x.abs()))?;
        Ok(Evaluation::from_series(&s, 1.0))
    }

    /// `s_{mu,nu}(z)` for `z > 0`.
    pub fn lommel_s(&self, p: LommelParams, z: f64) -> Result<Evaluation> {
        check_positive(z)?;
        let (mu, nu) = (p.mu, p.nu);
        let scale = math::powf(z, mu + 1.0) / ((mu - nu + 1.0) * (mu + nu + 1.0));
        let rec = Hyp1F2::new((mu - nu + 3.0) / 2.0, (mu + nu + 3.0) / 2.0, z, -0.25);
        let s = self.sum(&rec, z)?;
        Ok(Evaluation::from_series(&s, scale))
    }

    /// `d/dz s_{mu,nu}(z)` by termwise differentiation.
    pub fn lommel_s_derivative(&self, p: LommelParams, z: f64) -> Result<Evaluation> {
        check_positive(z)?;
        let (mu, nu) = (p.mu, p.nu);
        let scale = math::powf(z, mu) / ((mu - nu + 1.0) * (mu + nu + 1.0));
        let mut rec = Hyp1F2::new((mu - nu + 3.0) / 2.0, (mu + nu + 3.0) / 2.0, z, -0.25);
        rec.weight_base = Some(mu + 1.0);
        let s = self.sum(&rec, z)?;
        Ok(Evaluation::from_series(&s, scale))
    }

    /// `m`-th derivative of `phi_k` at any real `z`.
    pub fn phi(&self, p: PhiParams, z: f64, m: DerivativeOrder) -> Result<Evaluation> {
        if !z.is_finite() {
            return Err(Error::domain("z must be finite"));
        }
        let rec = PhiSeries { a: p.pochhammer_base(), z, m: m.get() };
        let s = self.sum(&rec, z)?;
        Ok(Evaluation::from_series(&s, 1.0))
    }
}

fn check_positive(z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("z must be positive (z={z})")))
    }
}

/// Rising factorial `a (a+1) ... (a+n-1)` as a running product.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (a + i as f64))
}

pub fn hyp1f2_unit(b1: f64, b2: f64, x: f64) -> Result<Evaluation> {
    Evaluator::default().hyp1f2_unit(b1, b2, x)
}

pub fn lommel_s(p: LommelParams, z: f64) -> Result<Evaluation> {
    Evaluator::default().lommel_s(p, z)
}

pub fn lommel_s_derivative(p: LommelParams, z: f64) -> Result<Evaluation> {
    Evaluator::default().lommel_s_derivative(p, z)
}

pub fn phi(p: PhiParams, z: f64, m: DerivativeOrder) -> Result<Evaluation> {
    Evaluator::default().phi(p, z, m)
}

/// Elementary forms of `s_{mu,1/2}` at `mu = 1/2, 3/2, 5/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    S12,
    S32,
    S52,
}

impl ClosedForm {
    pub fn mu(self) -> f64 {
        match self {
            ClosedForm::S12 => 0.5,
            ClosedForm::S32 => 1.5,
            ClosedForm::S52 => 2.5,
        }
    }

    pub fn from_mu(mu: f64) -> Option<Self> {
        [ClosedForm::S12, ClosedForm::S32, ClosedForm::S52].into_iter().find(|c| c.mu() == mu)
    }
}

/// `(1 - cos z)/sqrt z`, `(z - sin z)/sqrt z`, `(z^2 + 2 cos z - 2)/sqrt z`.
pub fn closed_form_half(which: ClosedForm, z: f64) -> f64 {
    let half_sin = math::sin(z / 2.0);
    // 1 - cos z = 2 sin^2(z/2) avoids the cancellation near 0.
    let one_minus_cos = 2.0 * half_sin * half_sin;
    let num = match which {
        ClosedForm::S12 => one_minus_cos,
        ClosedForm::S32 => z - math::sin(z),
        ClosedForm::S52 => z * z - 2.0 * one_minus_cos,
    };
    num / math::sqrt(z)
}

/// A recurrence residual together with the size of the terms it balances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// Largest magnitude among the terms of the identity.
    pub scale: f64,
    /// Propagated evaluation error of the terms.
    pub error_estimate: f64,
}

impl Residual {
    pub(crate) fn from_terms(terms: &[(f64, f64)]) -> Self {
        let mut value = series::CompensatedSum::default();
        let mut scale = 0.0f64;
        let mut err = 0.0;
        for &(v, e) in terms {
            value.add(v);
            scale = scale.max(v.abs());
            err += e + f64::EPSILON * v.abs();
        }
        Residual { value: value.value(), scale, error_estimate: err }
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.abs()
        } else {
            self.value.abs() / self.scale
        }
    }
}

/// `(mu-k+1) phi_{k+1}(z) - (mu-k+1) phi_k(z) - z phi_k'(z)`.
pub fn residual_lemma2(p: PhiParams, z: f64) -> Result<Residual> {
    let ev = Evaluator::default();
    let c = p.mu - p.k as f64 + 1.0;
    let next = ev.phi(p.next()?, z, DerivativeOrder::VALUE)?;
    let cur = ev.phi(p, z, DerivativeOrder::VALUE)?;
    let der = ev.phi(p, z, DerivativeOrder::FIRST)?;
    // Rounding of the coefficient itself.
    let dc = f64::EPSILON * (p.mu.abs() + p.k as f64 + 1.0);
    Ok(Residual::from_terms(&[
        (c * next.value, c.abs() * next.abs_error_estimate + dc * next.value.abs()),
        (-c * cur.value, c.abs() * cur.abs_error_estimate + dc * cur.value.abs()),
        (-z * der.value, z.abs() * der.abs_error_estimate),
    ]))
}

/// `s'_{mu,1/2}(z) + s_{mu,1/2}(z)/(2z) - (mu - 1/2) s_{mu-1,1/2}(z)`.
pub fn residual_recurrence_b(mu: f64, z: f64) -> Result<Residual> {
    let ev = Evaluator::default();
    let p = LommelParams::half(mu)?;
    let lower = LommelParams::half(mu - 1.0)?;
    let d = ev.lommel_s_derivative(p, z)?;
    let s = ev.lommel_s(p, z)?;
    let sl = ev.lommel_s(lower, z)?;
    let dc = f64::EPSILON * mu.abs();
    Ok(Residual::from_terms(&[
        (d.value, d.abs_error_estimate),
        (s.value / (2.0 * z), s.abs_error_estimate / (2.0 * z)),
        (-(mu - 0.5) * sl.value, (mu - 0.5).abs() * sl.abs_error_estimate + dc * sl.value.abs()),
    ]))
}

/// `[z^nu s_{mu,nu}]' - (mu+nu-1) z^nu s_{mu-1,nu-1}`, expanded with the
/// product rule.
pub fn residual_diff(p: LommelParams, z: f64) -> Result<Residual> {
    let ev = Evaluator::default();
    let (mu, nu) = (p.mu, p.nu);
    let lower = LommelParams::new(mu - 1.0, nu - 1.0)?;
    let s = ev.lommel_s(p, z)?;
    let d = ev.lommel_s_derivative(p, z)?;
    let sl = ev.lommel_s(lower, z)?;
    let znu = math::powf(z, nu);
    let c = mu + nu - 1.0;
    let dc = f64::EPSILON * (mu.abs() + nu.abs() + 1.0);
    Ok(Residual::from_terms(&[
        (nu * znu / z * s.value, (nu * znu / z).abs() * s.abs_error_estimate),
        (znu * d.value, znu * d.abs_error_estimate),
        (-c * znu * sl.value, (c * znu).abs() * sl.abs_error_estimate + dc * (znu * sl.value).abs()),
    ]))
}

/// `s_{mu+2,nu}(z) - z^{mu+1} + ((mu+1)^2 - nu^2) s_{mu,nu}(z)`.
pub fn residual_shift_two(p: LommelParams, z: f64) -> Result<Residual> {
    let ev = Evaluator::default();
    let (mu, nu) = (p.mu, p.nu);
    let up = LommelParams::new(mu + 2.0, nu)?;
    let s2 = ev.lommel_s(up, z)?;
    let s = ev.lommel_s(p, z)?;
    let c = (mu + 1.0) * (mu + 1.0) - nu * nu;
    let zp = math::powf(z, mu + 1.0);
    Ok(Residual::from_terms(&[
        (s2.value, s2.abs_error_estimate),
        (-zp, f64::EPSILON * zp),
        (c * s.value, c.abs() * s.abs_error_estimate),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn s_half(mu: f64, z: f64) -> Evaluation {
        lommel_s(LommelParams::half(mu).unwrap(), z).unwrap()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(7.3, 0), 1.0);
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert_eq!(pochhammer(-2.5, 3), -2.5 * -1.5 * -0.5);
        // (2a)_{2n} = (a)_n (a+1/2)_n 4^n with a = 1, n = 2
        assert_eq!(pochhammer(2.0, 4), 120.0);
        assert_eq!(pochhammer(1.0, 2) * pochhammer(1.5, 2) * 16.0, 120.0);
    }

    #[test]
    fn params_reject_watson_exclusions() {
        let err = LommelParams::new(-1.5, 0.5).unwrap_err();
        assert!(matches!(&err, Error::Domain(m) if m.contains("mu+nu is an odd negative integer")));
        let err = LommelParams::new(-0.5, 0.5).unwrap_err();
        assert!(matches!(&err, Error::Domain(m) if m.contains("mu-nu is an odd negative integer")));
        assert!(LommelParams::new(-2.0, 0.0).is_ok());
        assert!(LommelParams::new(-3.5, 0.5).is_err());
        assert!(PhiParams::new(1.0, 1).is_err());
        assert!(PhiParams::new(0.0, 0).is_err());
        assert!(PhiParams::new(0.5, 3).is_ok());
        assert!(DerivativeOrder::new(3).is_err());
    }

    #[test]
    fn hyp_examples() {
        assert_eq!(hyp1f2_unit(0.7, 2.2, 0.0).unwrap().value, 1.0);
        assert!(hyp1f2_unit(-1.0, 2.0, 0.3).is_err());
        // (1, 3/2) is phi_0 at mu = 0, i.e. sin z / z
        let v = hyp1f2_unit(1.0, 1.5, -0.25).unwrap();
        assert_relative_eq!(v.value, libm::sin(1.0), max_relative = 1e-14);
        // (3/2, 2) is phi_0 at mu = 1, i.e. 2(1 - cos z)/z^2
        let v = hyp1f2_unit(1.5, 2.0, -0.25).unwrap();
        assert_relative_eq!(v.value, 2.0 * (1.0 - libm::cos(1.0)), max_relative = 1e-14);
    }

    #[test]
    fn lommel_small_z_leading_factor() {
        // s_{1,1/2}(z) / z^2 -> 1/((3/2)(5/2))
        let z = 1e-4;
        let v = lommel_s(LommelParams::half(1.0).unwrap(), z).unwrap();
        assert_relative_eq!(v.value / (z * z), 4.0 / 15.0, max_relative = 1e-8);
    }

    #[test]
    fn lommel_closed_form_points() {
        assert_relative_eq!(s_half(0.5, PI).value, 2.0 / PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s_half(1.5, PI).value, PI.sqrt(), max_relative = 1e-14);
        let a = lommel_s(LommelParams::new(2.3, -0.5).unwrap(), 7.0).unwrap();
        let b = s_half(2.3, 7.0);
        assert_relative_eq!(a.value, b.value, max_relative = 1e-14);
    }

    #[test]
    fn lommel_rejects_nonpositive_z() {
        let p = LommelParams::half(0.5).unwrap();
        assert!(lommel_s(p, 0.0).is_err());
        assert!(lommel_s(p, -1.0).is_err());
        assert!(lommel_s_derivative(p, f64::NAN).is_err());
    }

    #[test]
    fn derivative_examples() {
        let p = LommelParams::half(1.5).unwrap();
        let d = lommel_s_derivative(p, PI).unwrap();
        let expect = 2.0 / PI.sqrt() - PI.sqrt() / (2.0 * PI);
        assert_relative_eq!(d.value, expect, max_relative = 1e-13);

        // z -> 0: derivative ~ (mu+1) z^mu / ((mu-nu+1)(mu+nu+1))
        let (mu, nu, z) = (2.0, 0.5, 1e-5);
        let d = lommel_s_derivative(LommelParams::new(mu, nu).unwrap(), z).unwrap();
        let lead = (mu + 1.0) * z.powf(mu) / ((mu - nu + 1.0) * (mu + nu + 1.0));
        assert_relative_eq!(d.value, lead, max_relative = 1e-8);
    }

    #[test]
    fn phi_examples() {
        let p = PhiParams::new(0.4, 0).unwrap();
        assert_eq!(phi(p, 0.0, DerivativeOrder::VALUE).unwrap().value, 1.0);
        assert_eq!(phi(PhiParams::new(0.4, 1).unwrap(), 0.0, DerivativeOrder::VALUE).unwrap().value, 1.0);
        assert_eq!(phi(p, 0.0, DerivativeOrder::FIRST).unwrap().value, 0.0);

        let one = PhiParams::new(1.0, 0).unwrap();
        let v = phi(one, 2.0 * PI, DerivativeOrder::VALUE).unwrap();
        assert!(v.value.abs() <= v.abs_error_estimate + 1e-15, "{v:?}");

        for &z in &[0.3, 4.0, 17.0, 29.0] {
            let a = phi(p, z, DerivativeOrder::FIRST).unwrap();
            let b = phi(p, -z, DerivativeOrder::FIRST).unwrap();
            assert_eq!(a.value, -b.value);
        }
    }

    #[test]
    fn phi_second_derivative_at_origin() {
        // phi''(0) = -2/((a)(a+1)), a = mu - k + 2
        let p = PhiParams::new(0.5, 0).unwrap();
        let v = phi(p, 0.0, DerivativeOrder::SECOND).unwrap();
        assert_relative_eq!(v.value, -2.0 / (2.5 * 3.5), max_relative = 1e-15);
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(closed_form_half(ClosedForm::S12, PI), 2.0 / PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(
            closed_form_half(ClosedForm::S32, 2.0 * PI),
            (2.0 * PI).sqrt(),
            max_relative = 1e-15
        );
        for &z in &[0.1, 1.0, 5.5, 20.0] {
            let lhs = closed_form_half(ClosedForm::S52, z);
            let rhs = z.powf(1.5) - 2.0 * closed_form_half(ClosedForm::S12, z);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn lemma2_residual_examples() {
        let r = residual_lemma2(PhiParams::new(0.5, 0).unwrap(), 0.0).unwrap();
        assert_eq!(r.value, 0.0);
        let r = residual_lemma2(PhiParams::new(0.5, 0).unwrap(), 3.0).unwrap();
        assert!(r.value.abs() < 1e-10, "{r:?}");
        let r = residual_lemma2(PhiParams::new(0.7, 1).unwrap(), 10.0).unwrap();
        assert!(r.value.abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn recurrence_b_examples() {
        for &(mu, z, tol) in &[(1.5, PI, 1e-13), (2.5, 1.0, 1e-10), (3.0, 0.1, 1e-12)] {
            let r = residual_recurrence_b(mu, z).unwrap();
            assert!(r.value.abs() < tol * r.scale.max(1.0), "{mu} {z} {r:?}");
        }
    }

    #[test]
    fn diff_and_shift_residuals() {
        let r = residual_diff(LommelParams::new(2.5, 0.5).unwrap(), 2.0).unwrap();
        assert!(r.relative() < 1e-13, "{r:?}");
        let r = residual_shift_two(LommelParams::new(0.5, 0.5).unwrap(), 3.0).unwrap();
        assert!(r.relative() < 1e-13, "{r:?}");
    }

    #[test]
    fn extended_mode_agrees_with_working() {
        let p = LommelParams::half(0.3).unwrap();
        let w = Evaluator::new(Precision::Working).lommel_s(p, 4.0).unwrap();
        let e = Evaluator::new(Precision::Extended).lommel_s(p, 4.0).unwrap();
        assert!(!w.extended && e.extended);
        assert!((w.value - e.value).abs() <= w.abs_error_estimate + e.abs_error_estimate);
    }
}
