//! Integral representations of `phi_0`, `phi_1` and `s_{mu-1/2,1/2}`:
//!
//! ```text
//! z phi_0(z) = mu (mu+1) int_0^1 (1-t)^{mu-1} sin(zt) dt
//!   phi_1(z) = mu        int_0^1 (1-t)^{mu-1} cos(zt) dt
//! sqrt(z) s_{mu-1/2,1/2}(z) = int_0^z t^{mu-1} sin(z-t) dt
//! ```
//!
//! These are independent of the series and serve as its cross-check. The
//! algebraic endpoint singularity for `mu < 1` is removed by the change of
//! variables `u = (1-t)^mu` (or `u = (t/z)^mu`), after which the integrand is
//! bounded and fixed-order Gauss-Legendre panels with adaptive bisection
//! finish the job.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lommel::{Evaluation, Method};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Gauss-Legendre nodes per panel.
    pub node_count: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-11, abs_tol: 1e-13, max_subdivisions: 1 << 14, node_count: 16 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| x > 0.0 && x < 1.0;
        if !in_unit(self.rel_tol) || !in_unit(self.abs_tol) {
            return Err(Error::InvalidConfig(format!(
                "quadrature tolerances must lie in (0, 1): rel={}, abs={}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.node_count < 4 {
            return Err(Error::InvalidConfig(format!("node_count {} < 4", self.node_count)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            let mut x = math::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by position so refinement order
        // never depends on anything but the inputs.
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn panel<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: &F, a: f64, b: f64) -> Panel {
    let coarse = rule.integrate(f, a, b);
    let m = 0.5 * (a + b);
    let fine = rule.integrate(f, a, m) + rule.integrate(f, m, b);
    Panel { a, b, value: fine, error: (fine - coarse).abs() }
}

/// Adaptive Gauss-Legendre on `[a, b]` with panels no wider than `max_width`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    max_width: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    let rule = GaussLegendre::new(spec.node_count);
    let width = b - a;
    let pieces = if max_width.is_finite() && max_width > 0.0 {
        (math::ceil(width / max_width) as usize).max(1)
    } else {
        1
    };
    let mut heap = BinaryHeap::with_capacity(pieces);
    for i in 0..pieces {
        let lo = a + width * i as f64 / pieces as f64;
        let hi = if i + 1 == pieces { b } else { a + width * (i + 1) as f64 / pieces as f64 };
        heap.push(panel(&rule, &f, lo, hi));
    }
    let mut subdivisions = 0;
    loop {
        // Sum in position order so the total is independent of heap layout.
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let rounding = 4.0 * f64::EPSILON * panels.iter().map(|p| p.value.abs()).sum::<f64>();
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(QuadratureResult { value: total, error: err + rounding, subdivisions });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureFailure { estimate: err, subdivisions });
        }
        let worst = heap.pop().expect("at least one panel");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel cannot be split further in f64.
            return Err(Error::QuadratureFailure { estimate: err, subdivisions });
        }
        heap.push(panel(&rule, &f, worst.a, m));
        heap.push(panel(&rule, &f, m, worst.b));
        subdivisions += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Sin,
    Cos,
}

impl Kernel {
    fn eval(self, x: f64) -> f64 {
        match self {
            Kernel::Sin => math::sin(x),
            Kernel::Cos => math::cos(x),
        }
    }
}

fn quarter_period(freq: f64) -> f64 {
    if freq > 0.0 {
        PI / (2.0 * freq)
    } else {
        f64::INFINITY
    }
}

/// `int_0^1 (1-t)^{mu-1} K(z t) dt` for `mu > 0`.
pub fn weighted_transform(mu: f64, z: f64, kernel: Kernel, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("integral representation needs mu > 0 (mu={mu})")));
    }
    if mu < 1.0 {
        // t = 1 - u^{1/mu}: (1-t)^{mu-1} dt = du / mu
        let inv = 1.0 / mu;
        let r = integrate(
            |u| kernel.eval(z * (1.0 - math::powf(u, inv))),
            0.0,
            1.0,
            quarter_period(z.abs() * inv),
            spec,
        )?;
        Ok(QuadratureResult { value: r.value * inv, error: r.error * inv, ..r })
    } else {
        integrate(
            |t| math::powf(1.0 - t, mu - 1.0) * kernel.eval(z * t),
            0.0,
            1.0,
            quarter_period(z.abs()),
            spec,
        )
    }
}

/// `int_0^z t^{mu-1} K(z - t) dt` for `mu > 0`, `z > 0`.
pub fn convolution(mu: f64, z: f64, kernel: Kernel, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("integral representation needs mu > 0 (mu={mu})")));
    }
    let zmu = math::powf(z, mu);
    if mu < 1.0 {
        // t = z u^{1/mu}: t^{mu-1} dt = z^mu du / mu
        let inv = 1.0 / mu;
        let r = integrate(
            |u| kernel.eval(z - z * math::powf(u, inv)),
            0.0,
            1.0,
            quarter_period(z * inv),
            spec,
        )?;
        let scale = zmu * inv;
        Ok(QuadratureResult { value: r.value * scale, error: r.error * scale, ..r })
    } else {
        // t = z w
        let r = integrate(
            |w| math::powf(w, mu - 1.0) * kernel.eval(z * (1.0 - w)),
            0.0,
            1.0,
            quarter_period(z),
            spec,
        )?;
        Ok(QuadratureResult { value: r.value * zmu, error: r.error * zmu, ..r })
    }
}

fn evaluation(value: f64, error: f64, r: &QuadratureResult) -> Evaluation {
    Evaluation {
        value,
        abs_error_estimate: error + 4.0 * f64::EPSILON * value.abs(),
        terms_used: r.subdivisions,
        method: Method::Quadrature,
        cancellation_index: 1.0,
        extended: false,
    }
}

/// `phi_0(z) = (mu (mu+1) / z) int_0^1 (1-t)^{mu-1} sin(zt) dt`.
pub fn phi0_by_integral(mu: f64, z: f64, spec: &QuadratureSpec) -> Result<Evaluation> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("z must be positive (z={z})")));
    }
    let r = weighted_transform(mu, z, Kernel::Sin, spec)?;
    let c = mu * (mu + 1.0) / z;
    Ok(evaluation(c * r.value, c.abs() * r.error, &r))
}

/// `phi_1(z) = mu int_0^1 (1-t)^{mu-1} cos(zt) dt`; `z = 0` is allowed.
pub fn phi1_by_integral(mu: f64, z: f64, spec: &QuadratureSpec) -> Result<Evaluation> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("z must be nonnegative (z={z})")));
    }
    let r = weighted_transform(mu, z, Kernel::Cos, spec)?;
    Ok(evaluation(mu * r.value, mu.abs() * r.error, &r))
}

/// `s_{mu-1/2,1/2}(z) = z^{-1/2} int_0^z t^{mu-1} sin(z-t) dt`.
pub fn s_by_convolution(mu: f64, z: f64, spec: &QuadratureSpec) -> Result<Evaluation> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("z must be positive (z={z})")));
    }
    let r = convolution(mu, z, Kernel::Sin, spec)?;
    let c = 1.0 / math::sqrt(z);
    Ok(evaluation(c * r.value, c * r.error, &r))
}

/// `int_0^z t^{mu-1} cos(z-t) dt`, which equals `(mu-1) sqrt(z) s_{mu-3/2,1/2}(z)`.
pub fn cosine_convolution(mu: f64, z: f64, spec: &QuadratureSpec) -> Result<Evaluation> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("z must be positive (z={z})")));
    }
    let r = convolution(mu, z, Kernel::Cos, spec)?;
    Ok(evaluation(r.value, r.error, &r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lommel::{lommel_s, phi, DerivativeOrder, LommelParams, PhiParams};
    use approx::assert_relative_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(16);
        let weight_sum: f64 = rule.weights.iter().sum();
        assert_relative_eq!(weight_sum, 2.0, max_relative = 1e-14);
        // degree 31 is integrated exactly by 16 nodes
        let v = rule.integrate(&|x: f64| x.powi(30), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 31.0, max_relative = 1e-13);
    }

    #[test]
    fn spec_validation() {
        assert!(spec().validate().is_ok());
        assert!(QuadratureSpec { node_count: 3, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { rel_tol: 1.5, ..spec() }.validate().is_err());
        assert!(QuadratureSpec { abs_tol: 0.0, ..spec() }.validate().is_err());
    }

    #[test]
    fn phi0_integral_examples() {
        let v = phi0_by_integral(0.5, 1e-4, &spec()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-6);
        let v = phi0_by_integral(1.0, PI, &spec()).unwrap();
        assert_relative_eq!(v.value, 4.0 / (PI * PI), max_relative = 1e-11);
        let q = phi0_by_integral(0.5, 5.0, &spec()).unwrap();
        let s = phi(PhiParams::new(0.5, 0).unwrap(), 5.0, DerivativeOrder::VALUE).unwrap();
        assert!((q.value - s.value).abs() <= q.abs_error_estimate + s.abs_error_estimate + 1e-12);
    }

    #[test]
    fn phi1_integral_examples() {
        let v = phi1_by_integral(0.5, 0.0, &spec()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let v = phi1_by_integral(2.0, PI, &spec()).unwrap();
        assert_relative_eq!(v.value, 4.0 / (PI * PI), max_relative = 1e-11);
        let q = phi1_by_integral(0.3, 12.0, &spec()).unwrap();
        let s = phi(PhiParams::new(0.3, 1).unwrap(), 12.0, DerivativeOrder::VALUE).unwrap();
        assert!((q.value - s.value).abs() <= q.abs_error_estimate + s.abs_error_estimate + 1e-12);
    }

    #[test]
    fn convolution_examples() {
        let v = s_by_convolution(1.0, PI, &spec()).unwrap();
        assert_relative_eq!(v.value, 2.0 / PI.sqrt(), max_relative = 1e-12);
        let v = s_by_convolution(2.0, 2.0 * PI, &spec()).unwrap();
        assert_relative_eq!(v.value, (2.0 * PI).sqrt(), max_relative = 1e-12);
        let q = s_by_convolution(0.4, 1.0, &spec()).unwrap();
        let s = lommel_s(LommelParams::half(-0.1).unwrap(), 1.0).unwrap();
        assert!((q.value - s.value).abs() <= q.abs_error_estimate + s.abs_error_estimate + 1e-12);
    }

    #[test]
    fn cosine_convolution_matches_lower_lommel() {
        let (mu, z) = (0.6, 3.0);
        let q = cosine_convolution(mu, z, &spec()).unwrap();
        let s = lommel_s(LommelParams::half(mu - 1.5).unwrap(), z).unwrap();
        assert_relative_eq!(q.value, (mu - 1.0) * z.sqrt() * s.value, max_relative = 1e-10);
    }

    #[test]
    fn rejects_nonpositive_mu() {
        assert!(phi0_by_integral(0.0, 1.0, &spec()).is_err());
        assert!(s_by_convolution(-0.5, 1.0, &spec()).is_err());
    }

    #[test]
    fn exhausting_subdivisions_is_reported() {
        let tight = QuadratureSpec { rel_tol: 1e-15, abs_tol: 1e-300, max_subdivisions: 1, node_count: 4 };
        let err = integrate(|x: f64| x.sqrt(), 0.0, 1.0, f64::INFINITY, &tight).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }
}
