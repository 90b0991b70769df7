//! Signed margins of the Turan, Wronskian, Laguerre and positivity
//! inequalities for `s_{mu,1/2}` and `phi_k`, with first-order error
//! propagation through the products.

use alloc::format;

use crate::lommel::{
    DerivativeOrder, Evaluation, Evaluator, LommelParams, Method, PhiParams, Precision, Residual,
};
use crate::math;
use crate::{Error, Result};

/// A value carried with an absolute error bound and the magnitude of the
/// terms that produced it.
#[derive(Clone, Copy, Debug)]
struct Tracked {
    v: f64,
    e: f64,
    mag: f64,
    terms: usize,
    extended: bool,
}

impl Tracked {
    fn of(ev: &Evaluation) -> Self {
        Tracked {
            v: ev.value,
            e: ev.abs_error_estimate,
            mag: ev.value.abs(),
            terms: ev.terms_used,
            extended: ev.extended,
        }
    }

    fn exact(v: f64) -> Self {
        Tracked { v, e: 0.0, mag: v.abs(), terms: 0, extended: false }
    }

    fn mul(self, o: Self) -> Self {
        let v = self.v * o.v;
        Tracked {
            v,
            e: self.v.abs() * o.e + o.v.abs() * self.e + self.e * o.e + f64::EPSILON * v.abs(),
            mag: v.abs(),
            terms: self.terms.max(o.terms),
            extended: self.extended || o.extended,
        }
    }

    fn add(self, o: Self) -> Self {
        let v = self.v + o.v;
        Tracked {
            v,
            e: self.e + o.e + f64::EPSILON * v.abs(),
            mag: self.mag + o.mag,
            terms: self.terms.max(o.terms),
            extended: self.extended || o.extended,
        }
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.scale(-1.0))
    }

    fn scale(self, c: f64) -> Self {
        Tracked {
            v: c * self.v,
            e: c.abs() * self.e + f64::EPSILON * (c * self.v).abs(),
            mag: c.abs() * self.mag,
            ..self
        }
    }

    fn sq(self) -> Self {
        self.mul(self)
    }

    fn finish(self) -> Evaluation {
        let ci = if self.v == 0.0 { f64::INFINITY } else { self.mag / self.v.abs() };
        Evaluation {
            value: self.v,
            abs_error_estimate: self.e,
            terms_used: self.terms,
            method: Method::Series,
            cancellation_index: ci.max(1.0),
            extended: self.extended,
        }
    }
}

/// Which consecutive pair the Wronskian expression is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WronskianLevel {
    /// `phi_0`, `phi_1`.
    Phi01,
    /// `phi_1`, `phi_2`.
    Phi12,
}

impl WronskianLevel {
    fn lower_k(self) -> u32 {
        match self {
            WronskianLevel::Phi01 => 0,
            WronskianLevel::Phi12 => 1,
        }
    }
}

/// The Wronskian `s'_{mu+1} s_mu - s_{mu+1} s'_mu` computed directly and
/// through the recurrence form `(mu+1/2) s_mu^2 - (mu-1/2) s_{mu-1} s_{mu+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioMonotone {
    pub direct: Evaluation,
    pub identity: Evaluation,
    pub residual: Residual,
}

/// Expected sign of a margin on the domain where the inequality is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedSign {
    Positive,
    Negative,
}

impl ExpectedSign {
    pub fn as_f64(self) -> f64 {
        match self {
            ExpectedSign::Positive => 1.0,
            ExpectedSign::Negative => -1.0,
        }
    }
}

/// Every inequality expression the lab knows how to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequalityKind {
    /// `Delta_mu - s_mu^2 / (1/2 - mu)`.
    Turan1,
    /// `Delta_mu = s_mu^2 - s_{mu-1} s_{mu+1}`.
    TuranDelta,
    /// `(mu-2) s_{mu-5/2} s_{mu-1/2} - (mu-1) s_{mu-3/2}^2`.
    IneqVarphi0,
    /// `(mu-3) s_{mu-7/2} s_{mu-3/2} - (mu-2) s_{mu-5/2}^2`.
    IneqVarphi1,
    /// `z phi_0 phi_1' - phi_0 phi_1 - z phi_1 phi_0'`.
    Eq5,
    /// `z phi_1 phi_2' - phi_1 phi_2 - z phi_2 phi_1'`.
    Eq7,
    /// `phi_k'^2 - phi_k phi_k''`.
    Laguerre,
    /// `s'_{mu+1} s_mu - s_{mu+1} s'_mu`.
    RatioMonotone,
    /// `s_{mu,1/2}`.
    SteinigPositivity,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 9] = [
        InequalityKind::Turan1,
        InequalityKind::TuranDelta,
        InequalityKind::IneqVarphi0,
        InequalityKind::IneqVarphi1,
        InequalityKind::Eq5,
        InequalityKind::Eq7,
        InequalityKind::Laguerre,
        InequalityKind::RatioMonotone,
        InequalityKind::SteinigPositivity,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            InequalityKind::Turan1 => "turan1",
            InequalityKind::TuranDelta => "turan-delta",
            InequalityKind::IneqVarphi0 => "ineq-varphi0",
            InequalityKind::IneqVarphi1 => "ineq-varphi1",
            InequalityKind::Eq5 => "eq5",
            InequalityKind::Eq7 => "eq7",
            InequalityKind::Laguerre => "laguerre",
            InequalityKind::RatioMonotone => "ratio-monotone",
            InequalityKind::SteinigPositivity => "steinig",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn expected_sign(self) -> ExpectedSign {
        match self {
            InequalityKind::Eq5 | InequalityKind::Eq7 | InequalityKind::RatioMonotone => {
                ExpectedSign::Negative
            }
            _ => ExpectedSign::Positive,
        }
    }

    /// Whether the expected sign is established for this `mu`.
    /// [`InequalityKind::TuranDelta`] has no such domain.
    pub fn guaranteed(self, mu: f64) -> bool {
        match self {
            InequalityKind::Turan1 | InequalityKind::RatioMonotone => {
                mu > -2.5 && mu < -0.5 && mu != -1.5
            }
            InequalityKind::TuranDelta => false,
            InequalityKind::IneqVarphi0
            | InequalityKind::IneqVarphi1
            | InequalityKind::Eq5
            | InequalityKind::Eq7
            | InequalityKind::Laguerre => mu > 0.0 && mu < 1.0,
            InequalityKind::SteinigPositivity => mu > 0.5,
        }
    }

    /// The nearest parameter at which the expression is undefined, if it is
    /// within `band` of `mu`. `k` is only used by [`InequalityKind::Laguerre`].
    pub fn excluded_near(self, mu: f64, k: u32, band: f64) -> Option<f64> {
        // (lattice offset, largest excluded point)
        let (offset, top) = match self {
            InequalityKind::Turan1 | InequalityKind::TuranDelta | InequalityKind::RatioMonotone => {
                (0.5, 0.5)
            }
            InequalityKind::SteinigPositivity => (0.5, -0.5),
            InequalityKind::IneqVarphi0 => (0.0, 2.0),
            InequalityKind::IneqVarphi1 => (0.0, 3.0),
            InequalityKind::Eq5 => (0.0, 1.0),
            InequalityKind::Eq7 => (0.0, 2.0),
            InequalityKind::Laguerre => (0.0, k as f64),
        };
        let nearest = math::round(mu - offset) + offset;
        ((mu - nearest).abs() < band && nearest <= top).then_some(nearest)
    }

    pub fn margin(self, lab: &Lab, mu: f64, z: f64, k: u32) -> Result<Evaluation> {
        match self {
            InequalityKind::Turan1 => lab.turan_theorem1_margin(mu, z),
            InequalityKind::TuranDelta => lab.turan_delta(mu, z),
            InequalityKind::IneqVarphi0 => lab.ineq_varphi0(mu, z),
            InequalityKind::IneqVarphi1 => lab.ineq_varphi1(mu, z),
            InequalityKind::Eq5 => lab.wronskian(mu, z, WronskianLevel::Phi01),
            InequalityKind::Eq7 => lab.wronskian(mu, z, WronskianLevel::Phi12),
            InequalityKind::Laguerre => lab.laguerre_margin(PhiParams::new(mu, k)?, z),
            InequalityKind::RatioMonotone => lab.ratio_monotone_margin(mu, z).map(|r| r.direct),
            InequalityKind::SteinigPositivity => lab.steinig(mu, z),
        }
    }
}

/// `eta(z) = z Delta_{3/2}(z) = (z^2 - 4) cos z + cos^2 z - 2 z sin z + 3`.
pub fn eta_closed(z: f64) -> f64 {
    let (s, c) = (math::sin(z), math::cos(z));
    (z * z - 4.0) * c + c * c - 2.0 * z * s + 3.0
}

/// Error bound for [`eta_closed`]: a few roundings of its largest term.
pub fn eta_closed_error(z: f64) -> f64 {
    8.0 * f64::EPSILON * (z * z + 4.0 + 2.0 * z.abs() + 4.0)
}

/// Composite values whose propagated relative error exceeds this are
/// recomputed with the extended backend when working precision is selected.
pub const ESCALATE_RELATIVE: f64 = 1e-12;

/// Evaluates the inequality expressions with one precision policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Lab {
    pub ev: Evaluator,
}

impl Lab {
    pub fn new(ev: Evaluator) -> Self {
        Lab { ev }
    }

    fn escalate(&self, f: impl Fn(&Lab) -> Result<Evaluation>) -> Result<Evaluation> {
        let e = f(self)?;
        if self.ev.precision == Precision::Working && !(e.abs_error_estimate <= ESCALATE_RELATIVE * e.value.abs()) {
            return f(&Lab::new(Evaluator::new(Precision::Extended)));
        }
        Ok(e)
    }

    fn s(&self, mu: f64, z: f64) -> Result<Tracked> {
        Ok(Tracked::of(&self.ev.lommel_s(LommelParams::half(mu)?, z)?))
    }

    fn ds(&self, mu: f64, z: f64) -> Result<Tracked> {
        Ok(Tracked::of(&self.ev.lommel_s_derivative(LommelParams::half(mu)?, z)?))
    }

    fn phi(&self, p: PhiParams, z: f64, m: DerivativeOrder) -> Result<Tracked> {
        Ok(Tracked::of(&self.ev.phi(p, z, m)?))
    }

    fn delta(&self, mu: f64, z: f64) -> Result<(Tracked, Tracked)> {
        let s = self.s(mu, z)?;
        let lower = self.s(mu - 1.0, z)?;
        let upper = self.s(mu + 1.0, z)?;
        Ok((s.sq().sub(lower.mul(upper)), s))
    }

    /// `Delta_mu(z) = s_mu^2 - s_{mu-1} s_{mu+1}` (all with `nu = 1/2`).
    pub fn turan_delta(&self, mu: f64, z: f64) -> Result<Evaluation> {
        self.escalate(|lab| Ok(lab.delta(mu, z)?.0.finish()))
    }

    /// `Delta_mu(z) - s_mu(z)^2 / (1/2 - mu)`.
    pub fn turan_theorem1_margin(&self, mu: f64, z: f64) -> Result<Evaluation> {
        if mu == 0.5 {
            return Err(Error::domain("mu = 1/2 makes 1/(1/2-mu) undefined"));
        }
        self.escalate(|lab| {
            let (delta, s) = lab.delta(mu, z)?;
            Ok(delta.sub(s.sq().scale(1.0 / (0.5 - mu))).finish())
        })
    }

    /// `(mu-2) s_{mu-5/2} s_{mu-1/2} - (mu-1) s_{mu-3/2}^2`.
    pub fn ineq_varphi0(&self, mu: f64, z: f64) -> Result<Evaluation> {
        self.shifted_turan(mu - 1.0, z)
    }

    /// `(mu-3) s_{mu-7/2} s_{mu-3/2} - (mu-2) s_{mu-5/2}^2`.
    pub fn ineq_varphi1(&self, mu: f64, z: f64) -> Result<Evaluation> {
        self.shifted_turan(mu - 2.0, z)
    }

    /// `(a-1) s_{a-3/2} s_{a+1/2} - a s_{a-1/2}^2`.
    fn shifted_turan(&self, a: f64, z: f64) -> Result<Evaluation> {
        self.escalate(|lab| {
            let lo = lab.s(a - 1.5, z)?;
            let mid = lab.s(a - 0.5, z)?;
            let hi = lab.s(a + 0.5, z)?;
            Ok(lo.mul(hi).scale(a - 1.0).sub(mid.sq().scale(a)).finish())
        })
    }

    fn phi_pair(&self, mu: f64, level: WronskianLevel) -> Result<(PhiParams, PhiParams)> {
        let lower = PhiParams::new(mu, level.lower_k())?;
        Ok((lower, lower.next()?))
    }

    /// `z f g' - f g - z g f'` with `(f, g) = (phi_0, phi_1)` or `(phi_1, phi_2)`.
    pub fn wronskian(&self, mu: f64, z: f64, level: WronskianLevel) -> Result<Evaluation> {
        let (pa, pb) = self.phi_pair(mu, level)?;
        self.escalate(|lab| {
            let f = lab.phi(pa, z, DerivativeOrder::VALUE)?;
            let df = lab.phi(pa, z, DerivativeOrder::FIRST)?;
            let g = lab.phi(pb, z, DerivativeOrder::VALUE)?;
            let dg = lab.phi(pb, z, DerivativeOrder::FIRST)?;
            let zt = Tracked::exact(z);
            Ok(zt.mul(f).mul(dg).sub(f.mul(g)).sub(zt.mul(g).mul(df)).finish())
        })
    }

    /// The same expression through the single-function form
    /// `-f^2 + (z^2/(mu-k+1)) (f f'' - f'^2)`.
    pub fn wronskian_by_laguerre(&self, mu: f64, z: f64, level: WronskianLevel) -> Result<Evaluation> {
        let (pa, _) = self.phi_pair(mu, level)?;
        let w = z * z / (mu - level.lower_k() as f64 + 1.0);
        self.escalate(|lab| {
            let f = lab.phi(pa, z, DerivativeOrder::VALUE)?;
            let df = lab.phi(pa, z, DerivativeOrder::FIRST)?;
            let d2f = lab.phi(pa, z, DerivativeOrder::SECOND)?;
            Ok(f.sq().scale(-1.0).add(f.mul(d2f).sub(df.sq()).scale(w)).finish())
        })
    }

    /// Difference of [`Lab::wronskian`] and [`Lab::wronskian_by_laguerre`].
    pub fn wronskian_identity(&self, mu: f64, z: f64, level: WronskianLevel) -> Result<Residual> {
        let a = self.wronskian(mu, z, level)?;
        let b = self.wronskian_by_laguerre(mu, z, level)?;
        Ok(Residual::from_terms(&[
            (a.value, a.abs_error_estimate),
            (-b.value, b.abs_error_estimate),
        ]))
    }

    /// `phi_k'(z)^2 - phi_k(z) phi_k''(z)`.
    pub fn laguerre_margin(&self, p: PhiParams, z: f64) -> Result<Evaluation> {
        self.escalate(|lab| {
            let f = lab.phi(p, z, DerivativeOrder::VALUE)?;
            let df = lab.phi(p, z, DerivativeOrder::FIRST)?;
            let d2f = lab.phi(p, z, DerivativeOrder::SECOND)?;
            Ok(df.sq().sub(f.mul(d2f)).finish())
        })
    }

    pub fn ratio_monotone_margin(&self, mu: f64, z: f64) -> Result<RatioMonotone> {
        let r = self.ratio_monotone_at(mu, z)?;
        let loose = |e: &Evaluation| !(e.abs_error_estimate <= ESCALATE_RELATIVE * e.value.abs());
        if self.ev.precision == Precision::Working && (loose(&r.direct) || loose(&r.identity)) {
            return Lab::new(Evaluator::new(Precision::Extended)).ratio_monotone_at(mu, z);
        }
        Ok(r)
    }

    fn ratio_monotone_at(&self, mu: f64, z: f64) -> Result<RatioMonotone> {
        let s = self.s(mu, z)?;
        let ds = self.ds(mu, z)?;
        let up = self.s(mu + 1.0, z)?;
        let dup = self.ds(mu + 1.0, z)?;
        let lower = self.s(mu - 1.0, z)?;
        let direct = dup.mul(s).sub(up.mul(ds)).finish();
        let identity = s
            .sq()
            .scale(mu + 0.5)
            .sub(lower.mul(up).scale(mu - 0.5))
            .finish();
        let residual = Residual::from_terms(&[
            (direct.value, direct.abs_error_estimate),
            (-identity.value, identity.abs_error_estimate),
        ]);
        Ok(RatioMonotone { direct, identity, residual })
    }

    /// `s_{mu,1/2}(z)`.
    pub fn steinig(&self, mu: f64, z: f64) -> Result<Evaluation> {
        self.ev.lommel_s(LommelParams::half(mu)?, z)
    }

    /// `z Delta_{3/2}(z) - eta(z)`.
    pub fn eta_identity(&self, z: f64) -> Result<Residual> {
        if !(z > 0.0) {
            return Err(Error::domain(format!("z must be positive (z={z})")));
        }
        let d = self.turan_delta(1.5, z)?;
        let eta = eta_closed(z);
        Ok(Residual::from_terms(&[
            (z * d.value, z * d.abs_error_estimate),
            (-eta, eta_closed_error(z)),
        ]))
    }
}

/// Leading coefficient `c` in `Delta_mu(z) ~ c z^{2 mu + 2}` as `z -> 0`.
pub fn turan_delta_small_z_coefficient(mu: f64) -> f64 {
    let a = (mu + 0.5) * (mu + 1.5);
    1.0 / (a * a) - 1.0 / ((mu - 0.5) * (mu + 0.5) * (mu + 1.5) * (mu + 2.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn lab() -> Lab {
        Lab::default()
    }

    #[test]
    fn delta_at_three_halves() {
        let d = lab().turan_delta(1.5, PI).unwrap();
        assert_relative_eq!(d.value, (8.0 - PI * PI) / PI, max_relative = 1e-12);
        assert_relative_eq!(d.value, -0.595_11, epsilon = 1e-5);
        let d = lab().turan_delta(1.5, 2.0 * PI).unwrap();
        assert_relative_eq!(d.value, 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn delta_small_z_leading_order() {
        let lab = Lab::new(Evaluator::new(crate::Precision::Extended));
        for mu in [1.0, 2.0, 3.7] {
            let z: f64 = 1e-3;
            let d = lab.turan_delta(mu, z).unwrap().value;
            let lead = turan_delta_small_z_coefficient(mu) * libm::pow(z, 2.0 * mu + 2.0);
            assert_relative_eq!(d, lead, max_relative = 1e-4);
        }
        // Not a positive multiple for every mu.
        assert!(turan_delta_small_z_coefficient(2.0) < 0.0);
    }

    #[test]
    fn theorem1_examples() {
        assert!(lab().turan_theorem1_margin(-1.0, 1.0).unwrap().value > 0.0);
        assert!(lab().turan_theorem1_margin(-2.0, 10.0).unwrap().value > 0.0);
        assert!(matches!(lab().turan_theorem1_margin(0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(lab().turan_theorem1_margin(-1.5, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn theorem1_margin_at_three_halves_two_pi() {
        let m = lab().turan_theorem1_margin(1.5, 2.0 * PI).unwrap();
        assert_relative_eq!(m.value, 4.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn wronskian_examples() {
        let w = lab().wronskian(0.5, 1e-3, WronskianLevel::Phi01).unwrap();
        assert!((w.value + 1.0).abs() < 1e-4);
        assert!(lab().wronskian(0.5, 5.0, WronskianLevel::Phi01).unwrap().value < 0.0);
        assert!(lab().wronskian(0.5, 5.0, WronskianLevel::Phi12).unwrap().value < 0.0);
        for level in [WronskianLevel::Phi01, WronskianLevel::Phi12] {
            let r = lab().wronskian_identity(0.3, 7.0, level).unwrap();
            assert!(r.relative() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn laguerre_examples() {
        let p = PhiParams::new(0.5, 0).unwrap();
        let m = lab().laguerre_margin(p, 0.0).unwrap();
        assert_relative_eq!(m.value, 2.0 / (2.5 * 3.5), max_relative = 1e-14);
        assert!(lab().laguerre_margin(p, 7.0).unwrap().value > 0.0);
        let p1 = PhiParams::new(0.5, 1).unwrap();
        assert!(lab().laguerre_margin(p1, 7.0).unwrap().value > 0.0);
    }

    #[test]
    fn ratio_monotone_two_routes() {
        let r = lab().ratio_monotone_margin(2.0, 3.0).unwrap();
        assert!(r.residual.relative() < 1e-12);
        let r = lab().ratio_monotone_margin(1.5, PI).unwrap();
        assert!(r.residual.relative() < 1e-10);
        // Quotient rule on (z^2 + 2 cos z - 2)/(z - sin z) at pi, times s_{3/2}^2.
        let (f, g) = (PI * PI - 4.0, PI);
        let (df, dg) = (2.0 * PI, 2.0);
        let direct = (df * g - f * dg) / (g * g) * (g * g / PI);
        assert_relative_eq!(r.direct.value, direct, max_relative = 1e-10);
        assert!(lab().ratio_monotone_margin(-1.0, 1.0).unwrap().direct.value < 0.0);
    }

    #[test]
    fn varphi_forms_match_wronskian_sign() {
        for z in [0.5, 3.0, 9.0] {
            assert!(lab().ineq_varphi0(0.4, z).unwrap().value > 0.0);
            assert!(lab().ineq_varphi1(0.4, z).unwrap().value > 0.0);
        }
    }

    #[test]
    fn eta_values() {
        for n in 1..=5 {
            let odd = (2 * n - 1) as f64 * PI;
            assert!((eta_closed(odd) - (8.0 - odd * odd)).abs() < 1e-9);
            let even = 2.0 * n as f64 * PI;
            assert!((eta_closed(even) - even * even).abs() < 1e-9);
        }
        let r = lab().eta_identity(3.3).unwrap();
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn tags_round_trip() {
        for k in InequalityKind::ALL {
            assert_eq!(InequalityKind::from_tag(k.tag()), Some(k));
        }
    }

    #[test]
    fn exclusion_bands() {
        let k = InequalityKind::Turan1;
        assert_eq!(k.excluded_near(0.5, 0, 1e-6), Some(0.5));
        assert_eq!(k.excluded_near(-1.5 + 1e-7, 0, 1e-6), Some(-1.5));
        assert_eq!(k.excluded_near(1.5, 0, 1e-6), None);
        assert_eq!(InequalityKind::Eq5.excluded_near(1.0, 0, 1e-6), Some(1.0));
        assert_eq!(InequalityKind::Eq5.excluded_near(2.0, 0, 1e-6), None);
    }
}
