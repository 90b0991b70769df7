//! Positive zeros of `phi_k`: sign-change scanning, bracketed refinement,
//! double-root detection, interlacing, and the truncated Hadamard product and
//! Mittag-Leffler sums built from a zero table.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::grid::{GridMap, Sequential};
use crate::lommel::{DerivativeOrder, Evaluation, Evaluator, Method, PhiParams};
use crate::math;
use crate::{Error, Result};

/// Local `|phi|` minima without a sign change below this are flagged as
/// suspected double roots.
pub const DOUBLE_ROOT_THRESHOLD: f64 = 1e-9;

/// A sample is sign-certified when `|value|` exceeds this multiple of its
/// error estimate.
const SIGN_CERTIFY_FACTOR: f64 = 2.0;

const REFINE_MAX_ITER: usize = 200;
const SAMPLE_CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootConfig {
    pub scan_step: f64,
    pub refine_tol: f64,
    pub max_zeros: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { scan_step: PI / 8.0, refine_tol: 1e-14, max_zeros: 1000 }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scan_step > 0.0 && self.scan_step <= PI / 4.0) {
            return Err(Error::InvalidConfig(format!(
                "scan_step must lie in (0, pi/4], got {}",
                self.scan_step
            )));
        }
        if !(self.refine_tol >= 1e-14) || !self.refine_tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "refine_tol must be at least 1e-14, got {}",
                self.refine_tol
            )));
        }
        if self.max_zeros == 0 {
            return Err(Error::InvalidConfig("max_zeros must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroFlag {
    /// `|phi|` dips to `min_abs` at `z` without changing sign.
    SuspectedDoubleRoot { z: f64, min_abs: f64 },
    /// Refinement of the bracket `[lo, hi]` did not meet the tolerance.
    ConvergenceFailure { lo: f64, hi: f64 },
}

impl ZeroFlag {
    pub fn location(&self) -> f64 {
        match *self {
            ZeroFlag::SuspectedDoubleRoot { z, .. } => z,
            ZeroFlag::ConvergenceFailure { lo, hi } => 0.5 * (lo + hi),
        }
    }
}

/// Ascending positive sign-change zeros of one `phi_k` on `(0, window_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTable {
    pub params: PhiParams,
    pub window_max: f64,
    pub zeros: Vec<f64>,
    /// Absolute refinement tolerance used for the brackets.
    pub bracket_tol: f64,
    /// `|phi_k(zero)|` as evaluated by the series.
    pub residuals: Vec<f64>,
    /// Per-zero bound the residual is expected to respect.
    pub residual_bounds: Vec<f64>,
    pub flags: Vec<ZeroFlag>,
    /// The scan stopped early at `max_zeros`.
    pub truncated: bool,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Right end of the interval on which the table is complete.
    pub fn coverage(&self) -> f64 {
        match (self.truncated, self.zeros.last()) {
            (true, Some(&z)) => z,
            _ => self.window_max,
        }
    }

    pub fn double_roots(&self) -> impl Iterator<Item = f64> + '_ {
        self.flags.iter().filter_map(|f| match *f {
            ZeroFlag::SuspectedDoubleRoot { z, .. } => Some(z),
            _ => None,
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Sample {
    z: f64,
    value: f64,
    /// +1, -1, or 0 when the value is inside its error estimate.
    sign: i8,
}

fn certify(value: f64, err: f64) -> i8 {
    if value.abs() > SIGN_CERTIFY_FACTOR * err {
        if value > 0.0 {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug)]
enum Work {
    Bracket { a: f64, fa: f64, b: f64, fb: f64 },
    Dip { a: f64, b: f64, sign: i8 },
}

#[derive(Clone, Debug, Default)]
struct Found {
    zeros: Vec<(f64, f64, f64)>,
    flags: Vec<ZeroFlag>,
}

/// Zeros of `phi_k` in `(0, z_max]` with the default evaluator, sequentially.
pub fn find_zeros(params: PhiParams, z_max: f64, cfg: &RootConfig) -> Result<ZeroTable> {
    find_zeros_with(params, z_max, cfg, &Evaluator::default(), &Sequential)
}

/// Zeros of `phi_k` in `(0, z_max]`.
///
/// Samples every `scan_step`, brackets certified sign changes, and refines
/// each bracket by bisection followed by an Illinois secant polish. Sampled
/// local minima of `|phi|` without a sign change are examined through the
/// derivative; those dipping below [`DOUBLE_ROOT_THRESHOLD`] are flagged.
pub fn find_zeros_with<M: GridMap>(
    params: PhiParams,
    z_max: f64,
    cfg: &RootConfig,
    ev: &Evaluator,
    map: &M,
) -> Result<ZeroTable> {
    cfg.validate()?;
    if !(z_max > 0.0) || !z_max.is_finite() {
        return Err(Error::domain(format!("window end must be positive (z_max={z_max})")));
    }
    let last_index = math::floor(z_max / cfg.scan_step) as usize;
    let on_grid = last_index as f64 * cfg.scan_step == z_max;
    let total = last_index + 1 + usize::from(!on_grid);
    let grid_z = |j: usize| if j > last_index { z_max } else { cfg.scan_step * j as f64 };

    let mut samples: Vec<Sample> = Vec::new();
    let mut found: Vec<(f64, f64, f64)> = Vec::new();
    let mut flags: Vec<ZeroFlag> = Vec::new();
    // Next sample index whose left neighbourhood has not been examined.
    let mut cursor = 1usize;
    let mut last_certified: Option<usize> = None;
    let mut truncated = false;

    while samples.len() < total {
        let start = samples.len();
        let end = (start + SAMPLE_CHUNK).min(total);
        let batch: Vec<Result<Sample>> = map.map(end - start, |i| {
            let z = grid_z(start + i);
            let e = ev.phi(params, z, DerivativeOrder::VALUE)?;
            Ok(Sample { z, value: e.value, sign: certify(e.value, e.abs_error_estimate) })
        });
        for s in batch {
            samples.push(s?);
        }
        if last_certified.is_none() && samples[0].sign != 0 {
            last_certified = Some(0);
        }

        let complete = samples.len() == total;
        let mut work = Vec::new();
        let limit = if complete { samples.len() } else { samples.len() - 1 };
        while cursor < limit {
            let s = samples[cursor];
            if s.sign != 0 {
                if let Some(p) = last_certified {
                    let prev = samples[p];
                    if prev.sign != s.sign {
                        work.push(Work::Bracket { a: prev.z, fa: prev.value, b: s.z, fb: s.value });
                    }
                }
                last_certified = Some(cursor);
            }
            if cursor + 1 < samples.len() {
                let (l, r) = (samples[cursor - 1], samples[cursor + 1]);
                if l.sign != 0 && l.sign == r.sign && s.sign != -l.sign {
                    let sg = f64::from(l.sign);
                    if sg * s.value < sg * l.value && sg * s.value < sg * r.value {
                        work.push(Work::Dip { a: l.z, b: r.z, sign: l.sign });
                    }
                }
            }
            cursor += 1;
        }

        let results: Vec<Result<Found>> = map.map(work.len(), |i| process(params, work[i], cfg, ev));
        for r in results {
            let f = r?;
            found.extend(f.zeros);
            flags.extend(f.flags);
        }
        if found.len() >= cfg.max_zeros {
            truncated = true;
            break;
        }
    }

    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    found.dedup_by(|x, y| x.0 == y.0);
    flags.sort_by(|x, y| x.location().total_cmp(&y.location()));
    if found.len() > cfg.max_zeros {
        found.truncate(cfg.max_zeros);
        truncated = true;
    }
    if truncated {
        let edge = found.last().map_or(z_max, |z| z.0);
        flags.retain(|f| f.location() <= edge);
    }
    Ok(ZeroTable {
        params,
        window_max: z_max,
        zeros: found.iter().map(|z| z.0).collect(),
        bracket_tol: cfg.refine_tol,
        residuals: found.iter().map(|z| z.1).collect(),
        residual_bounds: found.iter().map(|z| z.2).collect(),
        flags,
        truncated,
    })
}

fn process(params: PhiParams, w: Work, cfg: &RootConfig, ev: &Evaluator) -> Result<Found> {
    let mut out = Found::default();
    match w {
        Work::Bracket { a, fa, b, fb } => refine_into(params, a, fa, b, fb, cfg, ev, &mut out)?,
        Work::Dip { a, b, sign } => {
            let f = |z: f64| ev.phi(params, z, DerivativeOrder::VALUE);
            let df = |z: f64| ev.phi(params, z, DerivativeOrder::FIRST).map(|e| e.value);
            let (da, db) = (df(a)?, df(b)?);
            if da == 0.0 || db == 0.0 || (da > 0.0) == (db > 0.0) {
                return Ok(out);
            }
            let c = match bracket_root(df, a, da, b, db, cfg.refine_tol)? {
                Some(c) => c,
                None => return Ok(out),
            };
            let fc = f(c)?;
            if certify(fc.value, fc.abs_error_estimate) == -sign {
                let (fa, fb) = (f(a)?.value, f(b)?.value);
                refine_into(params, a, fa, c, fc.value, cfg, ev, &mut out)?;
                refine_into(params, c, fc.value, b, fb, cfg, ev, &mut out)?;
            } else if fc.value.abs() < DOUBLE_ROOT_THRESHOLD {
                out.flags.push(ZeroFlag::SuspectedDoubleRoot { z: c, min_abs: fc.value.abs() });
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn refine_into(
    params: PhiParams,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    cfg: &RootConfig,
    ev: &Evaluator,
    out: &mut Found,
) -> Result<()> {
    let f = |z: f64| ev.phi(params, z, DerivativeOrder::VALUE).map(|e| e.value);
    match bracket_root(f, a, fa, b, fb, cfg.refine_tol)? {
        Some(z) => {
            let e = ev.phi(params, z, DerivativeOrder::VALUE)?;
            let d = ev.phi(params, z, DerivativeOrder::FIRST)?;
            let bound = 10.0 * (e.abs_error_estimate + d.value.abs() * math::ulp(z));
            out.zeros.push((z, e.value.abs(), bound));
        }
        None => out.flags.push(ZeroFlag::ConvergenceFailure { lo: a, hi: b }),
    }
    Ok(())
}

/// Root of `f` in `[a, b]` given opposite-signed endpoint values. Bisection
/// shrinks the bracket to an eighth of its width, then Illinois regula falsi
/// finishes. Returns `None` when the iteration cap is hit.
fn bracket_root<F>(f: F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, tol: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    let width0 = b - a;
    let stop = |a: f64, b: f64| b - a <= tol.max(4.0 * math::ulp(b));
    let mut iter = 0;
    while b - a > width0 / 8.0 && !stop(a, b) {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(Some(m));
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        iter += 1;
    }
    // Which side was retained last; the stale side's value is halved.
    let mut side = 0i8;
    while !stop(a, b) {
        if iter >= REFINE_MAX_ITER {
            return Ok(None);
        }
        iter += 1;
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(Some(c));
        }
        if (fc > 0.0) == (fa > 0.0) {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        // Regula falsi can creep from one side; an occasional midpoint keeps
        // the bracket shrinking geometrically.
        if iter % 8 == 0 {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm == 0.0 {
                return Ok(Some(m));
            }
            if (fm > 0.0) == (fa > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    Ok(Some(if fa.abs() <= fb.abs() { a } else { b }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterlacingViolation {
    /// The gap `(lo, hi)` between consecutive zeros of one table.
    pub lo: f64,
    pub hi: f64,
    /// Zeros of the other table found inside the gap.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterlacingReport {
    pub holds: bool,
    pub gaps_checked: usize,
    pub violations: Vec<InterlacingViolation>,
}

/// Checks that each gap between consecutive zeros of either table contains
/// exactly one zero of the other. Gaps extending past the covered part of
/// either table are skipped.
pub fn verify_interlacing(a: &ZeroTable, b: &ZeroTable) -> Result<InterlacingReport> {
    if a.params.mu() != b.params.mu() {
        return Err(Error::WindowMismatch(format!(
            "mu differs ({} vs {})",
            a.params.mu(),
            b.params.mu()
        )));
    }
    if a.window_max != b.window_max {
        return Err(Error::WindowMismatch(format!(
            "window ends differ ({} vs {})",
            a.window_max, b.window_max
        )));
    }
    let edge = a.coverage().min(b.coverage());
    let mut violations = Vec::new();
    let mut gaps_checked = 0;
    for (x, y) in [(a, b), (b, a)] {
        for w in x.zeros.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi > edge {
                break;
            }
            gaps_checked += 1;
            let count = y.zeros.iter().filter(|&&z| z > lo && z < hi).count();
            if count != 1 {
                violations.push(InterlacingViolation { lo, hi, count });
            }
        }
    }
    violations.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    Ok(InterlacingReport { holds: violations.is_empty(), gaps_checked, violations })
}

/// Smallest distance between a zero of `a` and a zero of `b`
/// (infinite when either table is empty).
pub fn min_separation(a: &ZeroTable, b: &ZeroTable) -> f64 {
    let mut best = f64::INFINITY;
    let mut j = 0;
    for &x in &a.zeros {
        while j + 1 < b.zeros.len() && b.zeros[j + 1] <= x {
            j += 1;
        }
        for &y in b.zeros.iter().skip(j).take(2) {
            best = best.min((x - y).abs());
        }
    }
    best
}

fn check_count(table: &ZeroTable, n: usize) -> Result<()> {
    if n == 0 || n > table.len() {
        return Err(Error::InvalidConfig(format!(
            "term count {n} must lie in 1..={} (zeros in table)",
            table.len()
        )));
    }
    Ok(())
}

/// Truncated Hadamard product `prod_{n<N} (1 - z^2/zero_n^2)`.
///
/// The error estimate covers rounding and the zero locations' tolerance, not
/// the omitted factors.
pub fn product_reconstruct(table: &ZeroTable, z: f64, n: usize) -> Result<Evaluation> {
    check_count(table, n)?;
    let z2 = z * z;
    let mut value = 1.0;
    let mut sensitivity = 0.0;
    for &r in &table.zeros[..n] {
        let factor = 1.0 - z2 / (r * r);
        value *= factor;
        if factor != 0.0 {
            sensitivity += 2.0 * z2 * table.bracket_tol / (r * (r * r - z2).abs());
        }
    }
    Ok(Evaluation {
        value,
        abs_error_estimate: value.abs() * (n as f64 * f64::EPSILON + sensitivity),
        terms_used: n,
        method: Method::Product,
        cancellation_index: 1.0,
        extended: false,
    })
}

fn pole_check(table: &ZeroTable, z: f64, n: usize) -> Result<()> {
    for &r in &table.zeros[..n] {
        let distance = (z - r).abs();
        if distance < table.bracket_tol {
            return Err(Error::PoleHit { z, pole: r, distance });
        }
    }
    Ok(())
}

/// Weight `1/(mu-k+1)` of the partial-fraction sum for `phi_{k+1}/(z phi_k)`.
fn ml_weight(p: PhiParams) -> f64 {
    1.0 / (p.mu() - p.k() as f64 + 1.0)
}

/// Partial sum `1/z + w sum_{n<N} 2z/(z^2 - zero_n^2)` of the Mittag-Leffler
/// expansion of `phi_{k+1}(z) / (z phi_k(z))`, with `w = 1/(mu-k+1)`
/// (so `1/(mu+1)` for `k = 0` and `1/mu` for `k = 1`).
pub fn mittag_leffler_ratio(table: &ZeroTable, z: f64, n: usize) -> Result<f64> {
    check_count(table, n)?;
    if !(z > 0.0) {
        return Err(Error::domain(format!("z must be positive (z={z})")));
    }
    pole_check(table, z, n)?;
    let z2 = z * z;
    let sum: f64 = table.zeros[..n].iter().map(|&r| 2.0 * z / (z2 - r * r)).sum();
    Ok(1.0 / z + ml_weight(table.params) * sum)
}

/// `d/dz` of [`mittag_leffler_ratio`]'s partial sum.
pub fn mittag_leffler_ratio_derivative(table: &ZeroTable, z: f64, n: usize) -> Result<f64> {
    check_count(table, n)?;
    if !(z > 0.0) {
        return Err(Error::domain(format!("z must be positive (z={z})")));
    }
    pole_check(table, z, n)?;
    let z2 = z * z;
    let sum: f64 = table.zeros[..n]
        .iter()
        .map(|&r| {
            let d = z2 - r * r;
            -2.0 * (z2 + r * r) / (d * d)
        })
        .sum();
    Ok(-1.0 / z2 + ml_weight(table.params) * sum)
}
