//! Grid scans over `(mu, z)`: sign certification of inequality margins,
//! boundary refinement, the conjecture scan, sign-change brackets, and the
//! reversed-inequality windows.
//!
//! A margin's sign is certified only when `|margin|` exceeds
//! `max(sign_tolerance, ERROR_GUARD * error_estimate)`. Reports are labeled
//! accordingly; nothing here is a proof.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use crate::grid::{decimal_grid, GridMap, Sequential};
use crate::inequality::{eta_closed, eta_closed_error, ExpectedSign, InequalityKind, Lab, WronskianLevel};
use crate::lommel::{DerivativeOrder, Evaluation, LommelParams, Method, PhiParams, Residual};
use crate::math;
use crate::zeros::{find_zeros_with, RootConfig, ZeroTable};
use crate::{Error, Result};

/// Multiple of a point's own error estimate a margin must exceed.
pub const ERROR_GUARD: f64 = 1e3;
/// Width of the skipped band around excluded parameters.
pub const GUARD_BAND: f64 = 1e-6;
/// Label attached to every report.
pub const EVIDENCE_LABEL: &str = "certified at tolerance";
/// The conjecture's dividing parameter.
pub const CONJECTURE_SPLIT: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub mu_range: (f64, f64),
    pub mu_step: f64,
    pub z_range: (f64, f64),
    pub z_step: f64,
    /// Bisection levels used to localize sign boundaries.
    pub refine_depth: u32,
    /// Absolute floor under the per-point tolerance.
    pub sign_tolerance: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            mu_range: (0.6, 3.0),
            mu_step: 0.1,
            z_range: (0.1, 50.0),
            z_step: 0.1,
            refine_depth: 20,
            sign_tolerance: 1e-300,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let (ml, mh) = self.mu_range;
        let (zl, zh) = self.z_range;
        if !(ml.is_finite() && mh.is_finite() && ml <= mh) {
            return bad(format!("mu range {ml}:{mh} is empty or not finite"));
        }
        if !(zl > 0.0 && zh.is_finite() && zl <= zh) {
            return bad(format!("z range {zl}:{zh} must be a nonempty interval in (0, inf)"));
        }
        if !(self.mu_step > 0.0 && self.mu_step.is_finite()) {
            return bad(format!("mu step must be positive, got {}", self.mu_step));
        }
        if !(self.z_step > 0.0 && self.z_step.is_finite()) {
            return bad(format!("z step must be positive, got {}", self.z_step));
        }
        if !(self.sign_tolerance > 0.0 && self.sign_tolerance.is_finite()) {
            return bad(format!("sign tolerance must be positive, got {}", self.sign_tolerance));
        }
        if self.refine_depth > 60 {
            return bad(format!("refine depth {} exceeds 60", self.refine_depth));
        }
        Ok(())
    }

    pub fn mu_grid(&self) -> Vec<f64> {
        decimal_grid(self.mu_range.0, self.mu_range.1, self.mu_step)
    }

    pub fn z_grid(&self) -> Vec<f64> {
        decimal_grid(self.z_range.0, self.z_range.1, self.z_step)
    }

    /// Tolerance a margin with error estimate `err` must exceed.
    pub fn tolerance_for(&self, err: f64) -> f64 {
        self.sign_tolerance.max(ERROR_GUARD * err)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertifiedSign {
    Positive,
    Negative,
    Uncertain,
}

impl CertifiedSign {
    pub fn as_i8(self) -> i8 {
        match self {
            CertifiedSign::Positive => 1,
            CertifiedSign::Negative => -1,
            CertifiedSign::Uncertain => 0,
        }
    }

    pub fn matches(self, expected: ExpectedSign) -> bool {
        matches!(
            (self, expected),
            (CertifiedSign::Positive, ExpectedSign::Positive) | (CertifiedSign::Negative, ExpectedSign::Negative)
        )
    }

    pub fn opposes(self, expected: ExpectedSign) -> bool {
        matches!(
            (self, expected),
            (CertifiedSign::Negative, ExpectedSign::Positive) | (CertifiedSign::Positive, ExpectedSign::Negative)
        )
    }
}

pub fn certify(value: f64, tolerance: f64) -> CertifiedSign {
    if value > tolerance {
        CertifiedSign::Positive
    } else if value < -tolerance {
        CertifiedSign::Negative
    } else {
        CertifiedSign::Uncertain
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointFlag {
    /// Certified with the expected sign.
    Ok,
    /// Certified with the opposite sign where the sign is established.
    Violation,
    /// Certified negative where the conjecture predicts failure.
    Witness,
    Uncertain,
    /// Outside the window the check applies to.
    Unchecked,
    /// Midpoint of a refined sign boundary.
    Boundary,
    /// Evaluated, but the expected sign is not established for this `mu`.
    OutsideDomain,
}

impl PointFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            PointFlag::Ok => "ok",
            PointFlag::Violation => "violation",
            PointFlag::Witness => "witness",
            PointFlag::Uncertain => "uncertain",
            PointFlag::Unchecked => "unchecked",
            PointFlag::Boundary => "boundary",
            PointFlag::OutsideDomain => "outside-domain",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginPoint {
    pub mu: f64,
    pub z: f64,
    pub margin: f64,
    pub error: f64,
    pub tolerance: f64,
    pub sign: CertifiedSign,
    pub flag: PointFlag,
}

/// A sign boundary in `z` localized to `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boundary {
    pub mu: f64,
    pub lo: f64,
    pub hi: f64,
    pub left: CertifiedSign,
    pub right: CertifiedSign,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceSummary {
    pub mu: f64,
    pub points: usize,
    pub positive: usize,
    pub negative: usize,
    pub uncertain: usize,
    pub min_margin: f64,
    pub first_negative: Option<f64>,
    /// Whether this slice agrees with what the scan expected of it.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub tag: String,
    pub label: &'static str,
    /// Grid points and boundary midpoints in `(mu, z)` order.
    pub points: Vec<MarginPoint>,
    pub violations: Vec<(f64, f64)>,
    pub boundaries: Vec<Boundary>,
    /// Parameters skipped by the guard band, with the excluded value.
    pub skipped_mu: Vec<(f64, f64)>,
    pub slices: Vec<SliceSummary>,
    pub sign_tolerance: f64,
    pub error_guard: f64,
    /// Right end of the checked `z` window, when there is one.
    pub window: Option<f64>,
}

impl InequalityReport {
    fn new(tag: impl Into<String>, cfg: &ScanConfig) -> Self {
        InequalityReport {
            tag: tag.into(),
            label: EVIDENCE_LABEL,
            points: Vec::new(),
            violations: Vec::new(),
            boundaries: Vec::new(),
            skipped_mu: Vec::new(),
            slices: Vec::new(),
            sign_tolerance: cfg.sign_tolerance,
            error_guard: ERROR_GUARD,
            window: None,
        }
    }

    /// No certified violations and every slice consistent.
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.slices.iter().all(|s| s.consistent)
    }

    pub fn count(&self, flag: PointFlag) -> usize {
        self.points.iter().filter(|p| p.flag == flag).count()
    }

    fn finish(&mut self) {
        self.points.sort_by(|a, b| a.mu.total_cmp(&b.mu).then(a.z.total_cmp(&b.z)));
        self.violations = self
            .points
            .iter()
            .filter(|p| p.flag == PointFlag::Violation)
            .map(|p| (p.mu, p.z))
            .collect();
    }
}

fn margin_point(mu: f64, z: f64, e: &Evaluation, cfg: &ScanConfig) -> MarginPoint {
    let tolerance = cfg.tolerance_for(e.abs_error_estimate);
    MarginPoint {
        mu,
        z,
        margin: e.value,
        error: e.abs_error_estimate,
        tolerance,
        sign: certify(e.value, tolerance),
        flag: PointFlag::Ok,
    }
}

/// Evaluates `f` on every `(mu, z)` of the grid, slice by slice.
fn evaluate_grid<M, F>(mus: &[f64], zs: &[f64], cfg: &ScanConfig, f: &F, map: &M) -> Result<Vec<MarginPoint>>
where
    M: GridMap,
    F: Fn(f64, f64) -> Result<Evaluation> + Sync + Send,
{
    let n = zs.len();
    let raw: Vec<Result<MarginPoint>> = map.map(mus.len() * n, |i| {
        let (mu, z) = (mus[i / n], zs[i % n]);
        f(mu, z).map(|e| margin_point(mu, z, &e, cfg))
    });
    raw.into_iter().collect()
}

/// Bisects between two points with different certified signs, returning the
/// final bracket and the midpoint evaluation.
fn refine<F>(mu: f64, left: &MarginPoint, right: &MarginPoint, cfg: &ScanConfig, f: &F) -> Result<(Boundary, MarginPoint)>
where
    F: Fn(f64, f64) -> Result<Evaluation>,
{
    let (mut lo, mut hi) = (left.z, right.z);
    let mut lo_val = left.margin;
    for _ in 0..cfg.refine_depth {
        let mid = 0.5 * (lo + hi);
        let v = f(mu, mid)?.value;
        if (v > 0.0) == (lo_val > 0.0) {
            lo = mid;
            lo_val = v;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut p = margin_point(mu, mid, &f(mu, mid)?, cfg);
    p.flag = PointFlag::Boundary;
    Ok((Boundary { mu, lo, hi, left: left.sign, right: right.sign }, p))
}

/// Refines every sign boundary inside each slice of `points` (grid order,
/// `n` points per slice).
fn refine_boundaries<M, F>(points: &[MarginPoint], n: usize, cfg: &ScanConfig, f: &F, map: &M) -> Result<Vec<(Boundary, MarginPoint)>>
where
    M: GridMap,
    F: Fn(f64, f64) -> Result<Evaluation> + Sync + Send,
{
    let mut pairs = Vec::new();
    for slice in points.chunks(n) {
        let certified: Vec<&MarginPoint> = slice.iter().filter(|p| p.sign != CertifiedSign::Uncertain).collect();
        for w in certified.windows(2) {
            if w[0].sign != w[1].sign {
                pairs.push((*w[0], *w[1]));
            }
        }
    }
    let out: Vec<Result<(Boundary, MarginPoint)>> =
        map.map(pairs.len(), |i| refine(pairs[i].0.mu, &pairs[i].0, &pairs[i].1, cfg, f));
    out.into_iter().collect()
}

fn partition_mu(kind: InequalityKind, k: u32, mus: &[f64], report: &mut InequalityReport) -> Vec<f64> {
    let mut kept = Vec::new();
    for &mu in mus {
        match kind.excluded_near(mu, k, GUARD_BAND) {
            Some(x) => report.skipped_mu.push((mu, x)),
            None => kept.push(mu),
        }
    }
    kept
}

fn summarize(mu: f64, slice: &[MarginPoint], consistent: impl Fn(&SliceSummary) -> bool) -> SliceSummary {
    let mut s = SliceSummary {
        mu,
        points: slice.len(),
        positive: 0,
        negative: 0,
        uncertain: 0,
        min_margin: f64::INFINITY,
        first_negative: None,
        consistent: true,
    };
    for p in slice {
        match p.sign {
            CertifiedSign::Positive => s.positive += 1,
            CertifiedSign::Negative => {
                s.negative += 1;
                if s.first_negative.is_none() {
                    s.first_negative = Some(p.z);
                }
            }
            CertifiedSign::Uncertain => s.uncertain += 1,
        }
        s.min_margin = s.min_margin.min(p.margin);
    }
    s.consistent = consistent(&s);
    s
}

/// Evaluates one inequality on the whole grid. Certified signs opposite to
/// the expected one are violations only where the inequality is
/// established; elsewhere points are flagged `OutsideDomain`.
pub fn verify_inequality<M: GridMap>(
    kind: InequalityKind,
    k: u32,
    cfg: &ScanConfig,
    lab: &Lab,
    map: &M,
) -> Result<InequalityReport> {
    cfg.validate()?;
    let mut report = InequalityReport::new(kind.tag(), cfg);
    let mus = partition_mu(kind, k, &cfg.mu_grid(), &mut report);
    let zs = cfg.z_grid();
    let f = |mu: f64, z: f64| kind.margin(lab, mu, z, k);
    let mut points = evaluate_grid(&mus, &zs, cfg, &f, map)?;
    let expected = kind.expected_sign();
    for p in &mut points {
        p.flag = if !kind.guaranteed(p.mu) {
            PointFlag::OutsideDomain
        } else if p.sign.matches(expected) {
            PointFlag::Ok
        } else if p.sign.opposes(expected) {
            PointFlag::Violation
        } else {
            PointFlag::Uncertain
        };
    }
    for (mu, slice) in mus.iter().zip(points.chunks(zs.len().max(1))) {
        report.slices.push(summarize(*mu, slice, |s| {
            !kind.guaranteed(*mu)
                || match expected {
                    ExpectedSign::Positive => s.negative == 0,
                    ExpectedSign::Negative => s.positive == 0,
                }
        }));
    }
    let refined = refine_boundaries(&points, zs.len().max(1), cfg, &f, map)?;
    for (b, p) in refined {
        report.boundaries.push(b);
        points.push(p);
    }
    report.points = points;
    report.finish();
    Ok(report)
}

/// Scans the Turan margin of [`Lab::turan_theorem1_margin`] for `mu > -1/2`: below
/// [`CONJECTURE_SPLIT`] each slice must contain a certified negative
/// witness, at or above it no certified negative margin may appear.
pub fn conjecture_scan<M: GridMap>(cfg: &ScanConfig, lab: &Lab, map: &M) -> Result<InequalityReport> {
    cfg.validate()?;
    let kind = InequalityKind::Turan1;
    let mut report = InequalityReport::new("conjecture", cfg);
    let mus = partition_mu(kind, 0, &cfg.mu_grid(), &mut report);
    let zs = cfg.z_grid();
    let f = |mu: f64, z: f64| lab.turan_theorem1_margin(mu, z);
    let mut points = evaluate_grid(&mus, &zs, cfg, &f, map)?;
    for p in &mut points {
        p.flag = match p.sign {
            CertifiedSign::Positive => PointFlag::Ok,
            CertifiedSign::Uncertain => PointFlag::Uncertain,
            CertifiedSign::Negative if p.mu < CONJECTURE_SPLIT => PointFlag::Witness,
            CertifiedSign::Negative => PointFlag::Violation,
        };
    }
    for (mu, slice) in mus.iter().zip(points.chunks(zs.len().max(1))) {
        report.slices.push(summarize(*mu, slice, |s| {
            if *mu < CONJECTURE_SPLIT {
                s.negative > 0
            } else {
                s.negative == 0
            }
        }));
    }
    let refined = refine_boundaries(&points, zs.len().max(1), cfg, &f, map)?;
    for (b, p) in refined {
        report.boundaries.push(b);
        points.push(p);
    }
    report.points = points;
    report.finish();
    Ok(report)
}

/// A function of `z` whose sign changes are scanned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanTarget {
    /// The closed form `eta(z)`.
    Eta,
    /// `Delta_mu(z)`.
    TuranDelta { mu: f64 },
    /// `s_{mu,1/2}(z)`.
    Lommel { mu: f64 },
    /// `phi_k(z)`.
    Phi { mu: f64, k: u32 },
    Inequality { kind: InequalityKind, mu: f64, k: u32 },
}

impl ScanTarget {
    pub fn mu(&self) -> f64 {
        match *self {
            ScanTarget::Eta => 1.5,
            ScanTarget::TuranDelta { mu }
            | ScanTarget::Lommel { mu }
            | ScanTarget::Phi { mu, .. }
            | ScanTarget::Inequality { mu, .. } => mu,
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            ScanTarget::Eta => "eta".into(),
            ScanTarget::TuranDelta { mu } => format!("delta(mu={mu})"),
            ScanTarget::Lommel { mu } => format!("lommel(mu={mu})"),
            ScanTarget::Phi { mu, k } => format!("phi(mu={mu},k={k})"),
            ScanTarget::Inequality { kind, mu, k } => format!("{}(mu={mu},k={k})", kind.tag()),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ScanTarget::Eta => Ok(()),
            ScanTarget::TuranDelta { mu } => {
                for m in [mu - 1.0, mu, mu + 1.0] {
                    LommelParams::half(m)?;
                }
                Ok(())
            }
            ScanTarget::Lommel { mu } => LommelParams::half(mu).map(|_| ()),
            ScanTarget::Phi { mu, k } => PhiParams::new(mu, k).map(|_| ()),
            ScanTarget::Inequality { .. } => Ok(()),
        }
    }

    pub fn evaluate(&self, lab: &Lab, z: f64) -> Result<Evaluation> {
        match *self {
            ScanTarget::Eta => Ok(Evaluation {
                value: eta_closed(z),
                abs_error_estimate: eta_closed_error(z),
                terms_used: 0,
                method: Method::ClosedForm,
                cancellation_index: 1.0,
                extended: false,
            }),
            ScanTarget::TuranDelta { mu } => lab.turan_delta(mu, z),
            ScanTarget::Lommel { mu } => lab.ev.lommel_s(LommelParams::half(mu)?, z),
            ScanTarget::Phi { mu, k } => lab.ev.phi(PhiParams::new(mu, k)?, z, DerivativeOrder::VALUE),
            ScanTarget::Inequality { kind, mu, k } => kind.margin(lab, mu, z, k),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignChangeReport {
    pub tag: String,
    pub label: &'static str,
    pub points: Vec<MarginPoint>,
    pub brackets: Vec<Boundary>,
    /// Grid points whose sign could not be certified.
    pub uncertain: Vec<f64>,
}

impl SignChangeReport {
    /// Consecutive brackets flip direction each time.
    pub fn alternating(&self) -> bool {
        self.brackets.windows(2).all(|w| w[0].right == w[1].left)
    }
}

/// Brackets every certified sign change of `target` over the `z` grid of
/// `cfg` (the `mu` settings are ignored), refined `refine_depth` times.
pub fn sign_change_scan<M: GridMap>(target: ScanTarget, cfg: &ScanConfig, lab: &Lab, map: &M) -> Result<SignChangeReport> {
    cfg.validate()?;
    target.validate()?;
    let mu = target.mu();
    let zs = cfg.z_grid();
    let f = |_: f64, z: f64| target.evaluate(lab, z);
    let mut points = evaluate_grid(&[mu], &zs, cfg, &f, map)?;
    for p in &mut points {
        p.flag = if p.sign == CertifiedSign::Uncertain { PointFlag::Uncertain } else { PointFlag::Ok };
    }
    let uncertain = points.iter().filter(|p| p.sign == CertifiedSign::Uncertain).map(|p| p.z).collect();
    let refined = refine_boundaries(&points, zs.len().max(1), cfg, &f, map)?;
    let mut brackets = Vec::with_capacity(refined.len());
    for (b, p) in refined {
        brackets.push(b);
        points.push(p);
    }
    points.sort_by(|a, b| a.z.total_cmp(&b.z));
    Ok(SignChangeReport { tag: target.tag(), label: EVIDENCE_LABEL, points, brackets, uncertain })
}

/// Shift `m` and expected sign of the Turan margin on the reversed window
/// for `mu`: `m = 1` (reversed) on `(-1/2, 1/2)`, `m >= 2` (valid) on
/// `(m - 3/2, m - 1/2)`.
pub fn reversed_setup(mu: f64) -> Result<(u32, ExpectedSign)> {
    let h = mu + 0.5;
    if !(mu > -0.5) || !mu.is_finite() || h == math::floor(h) {
        return Err(Error::domain(format!(
            "mu must exceed -1/2 and not be a half-odd integer (mu={mu})"
        )));
    }
    let m = math::floor(mu + 1.5) as u32;
    Ok((m, if m == 1 { ExpectedSign::Negative } else { ExpectedSign::Positive }))
}

/// Parameters of the `phi_0` whose first positive zero ends the window:
/// the zeros of `s_{mu-m,1/2}` are those of `phi_0` at `mu - m + 1/2`.
pub fn window_params(mu: f64) -> Result<PhiParams> {
    let (m, _) = reversed_setup(mu)?;
    PhiParams::new(mu - m as f64 + 0.5, 0)
}

/// Zero table holding the first zero that ends the window for `mu`.
pub fn window_zero_table<M: GridMap>(mu: f64, lab: &Lab, map: &M) -> Result<ZeroTable> {
    let cfg = RootConfig { max_zeros: 1, ..RootConfig::default() };
    let t = find_zeros_with(window_params(mu)?, 8.0 * PI, &cfg, &lab.ev, map)?;
    if t.is_empty() {
        return Err(Error::MissingZeroTable(format!("no zero of the window function below 8 pi for mu={mu}")));
    }
    Ok(t)
}

/// Checks the sign of the Turan margin on `(0, first zero)` of the window
/// table; grid points past the window are flagged `Unchecked`.
pub fn reversed_window_check<M: GridMap>(
    mu: f64,
    cfg: &ScanConfig,
    zeros: Option<&ZeroTable>,
    lab: &Lab,
    map: &M,
) -> Result<InequalityReport> {
    cfg.validate()?;
    let (_, expected) = reversed_setup(mu)?;
    let table = zeros.ok_or_else(|| Error::MissingZeroTable(format!("window zero for mu={mu}")))?;
    let want = window_params(mu)?;
    if table.params != want {
        return Err(Error::WindowMismatch(format!(
            "table is for phi_{} at mu={}, window needs phi_0 at mu={}",
            table.params.k(),
            table.params.mu(),
            want.mu()
        )));
    }
    let edge = *table
        .zeros
        .first()
        .ok_or_else(|| Error::MissingZeroTable("zero table is empty".into()))?;
    let mut report = InequalityReport::new("reversed", cfg);
    report.window = Some(edge);
    let zs = cfg.z_grid();
    let f = |mu: f64, z: f64| lab.turan_theorem1_margin(mu, z);
    let mut points = evaluate_grid(&[mu], &zs, cfg, &f, map)?;
    for p in &mut points {
        p.flag = if p.z >= edge {
            PointFlag::Unchecked
        } else if p.sign.matches(expected) {
            PointFlag::Ok
        } else if p.sign.opposes(expected) {
            PointFlag::Violation
        } else {
            PointFlag::Uncertain
        };
    }
    let inside: Vec<MarginPoint> = points.iter().copied().filter(|p| p.z < edge).collect();
    report.slices.push(summarize(mu, &inside, |s| match expected {
        ExpectedSign::Positive => s.negative == 0 && s.positive > 0,
        ExpectedSign::Negative => s.positive == 0 && s.negative > 0,
    }));
    report.points = points;
    report.finish();
    Ok(report)
}

/// Bound on identity residuals: absolute for `eta`, relative to the
/// largest term for the Wronskian forms.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// An exact identity checked pointwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityTarget {
    /// `z Delta_{3/2}(z) = eta(z)`; the `mu` grid is ignored.
    Eta,
    /// Direct Wronskian against its Laguerre form.
    Wronskian(WronskianLevel),
}

impl IdentityTarget {
    pub fn tag(self) -> &'static str {
        match self {
            IdentityTarget::Eta => "eta-identity",
            IdentityTarget::Wronskian(WronskianLevel::Phi01) => "wronskian-identity",
            IdentityTarget::Wronskian(WronskianLevel::Phi12) => "wronskian-identity-12",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [
            IdentityTarget::Eta,
            IdentityTarget::Wronskian(WronskianLevel::Phi01),
            IdentityTarget::Wronskian(WronskianLevel::Phi12),
        ]
        .into_iter()
        .find(|t| t.tag() == tag)
    }

    fn measure(self, r: &Residual) -> f64 {
        match self {
            IdentityTarget::Eta => r.value.abs(),
            IdentityTarget::Wronskian(_) => r.relative(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityPoint {
    pub mu: f64,
    pub z: f64,
    pub residual: f64,
    pub scale: f64,
    pub error: f64,
    /// The quantity compared with the tolerance.
    pub measure: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub tag: &'static str,
    pub tolerance: f64,
    pub points: Vec<IdentityPoint>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.pass).count()
    }

    pub fn worst(&self) -> f64 {
        self.points.iter().map(|p| p.measure).fold(0.0, f64::max)
    }
}

/// Evaluates an identity residual on the grid of `cfg`.
pub fn identity_check<M: GridMap>(target: IdentityTarget, cfg: &ScanConfig, lab: &Lab, map: &M) -> Result<IdentityReport> {
    cfg.validate()?;
    let mus = match target {
        IdentityTarget::Eta => alloc::vec![1.5],
        IdentityTarget::Wronskian(_) => cfg.mu_grid(),
    };
    let zs = cfg.z_grid();
    let n = zs.len();
    let raw: Vec<Result<IdentityPoint>> = map.map(mus.len() * n, |i| {
        let (mu, z) = (mus[i / n], zs[i % n]);
        let r = match target {
            IdentityTarget::Eta => lab.eta_identity(z)?,
            IdentityTarget::Wronskian(level) => lab.wronskian_identity(mu, z, level)?,
        };
        let measure = target.measure(&r);
        Ok(IdentityPoint {
            mu,
            z,
            residual: r.value,
            scale: r.scale,
            error: r.error_estimate,
            measure,
            pass: measure <= IDENTITY_TOLERANCE,
        })
    });
    Ok(IdentityReport { tag: target.tag(), tolerance: IDENTITY_TOLERANCE, points: raw.into_iter().collect::<Result<_>>()? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mu: (f64, f64), z: (f64, f64)) -> ScanConfig {
        ScanConfig { mu_range: mu, z_range: z, ..ScanConfig::default() }
    }

    #[test]
    fn identity_checks() {
        let lab = Lab::default();
        let r = identity_check(IdentityTarget::Eta, &cfg((0.6, 3.0), (0.1, 31.4)), &lab, &Sequential).unwrap();
        assert_eq!(r.points.len(), 314);
        assert!(r.passed(), "worst {}", r.worst());
        let c = ScanConfig { mu_range: (0.1, 0.9), z_range: (0.1, 30.0), z_step: 0.5, ..ScanConfig::default() };
        let r = identity_check(IdentityTarget::Wronskian(WronskianLevel::Phi01), &c, &lab, &Sequential).unwrap();
        assert!(r.passed(), "worst {}", r.worst());
        assert_eq!(IdentityTarget::from_tag("eta-identity"), Some(IdentityTarget::Eta));
    }

    #[test]
    fn validation() {
        assert!(ScanConfig::default().validate().is_ok());
        assert!(cfg((1.0, 0.0), (0.1, 1.0)).validate().is_err());
        assert!(cfg((0.0, 1.0), (0.0, 1.0)).validate().is_err());
        let c = ScanConfig { z_step: 0.0, ..ScanConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn conjecture_slices() {
        let c = ScanConfig { mu_step: 1.0, z_step: 0.5, ..cfg((1.0, 2.0), (0.5, 50.0)) };
        let r = conjecture_scan(&c, &Lab::default(), &Sequential).unwrap();
        assert_eq!(r.slices.len(), 2);
        assert!(r.slices[0].negative > 0);
        assert_eq!(r.slices[1].negative, 0);
        assert!(r.passed());
        assert!(r.count(PointFlag::Witness) > 0);
        assert!(!r.boundaries.is_empty());
    }

    #[test]
    fn guard_band_skips_half() {
        let c = ScanConfig { mu_step: 0.1, z_step: 5.0, ..cfg((0.4, 0.6), (1.0, 10.0)) };
        let r = conjecture_scan(&c, &Lab::default(), &Sequential).unwrap();
        assert_eq!(r.skipped_mu, [(0.5, 0.5)]);
        assert_eq!(r.slices.len(), 2);
    }

    #[test]
    fn three_halves_touching_points_are_not_violations() {
        // At mu = 3/2 the margin is 2 (z cos(z/2) - 2 sin(z/2))^2 / z >= 0.
        let c = ScanConfig { mu_step: 1.0, z_step: 0.01, ..cfg((1.5, 1.5), (0.01, 30.0)) };
        let r = conjecture_scan(&c, &Lab::default(), &Sequential).unwrap();
        assert!(r.violations.is_empty());
        for p in &r.points {
            let exact = 2.0 * libm::pow(p.z * libm::cos(p.z / 2.0) - 2.0 * libm::sin(p.z / 2.0), 2.0) / p.z;
            assert!((p.margin - exact).abs() <= p.error.max(1e-13 * exact.abs()) * 10.0, "{p:?} {exact}");
        }
    }

    #[test]
    fn eta_sign_changes() {
        let c = ScanConfig { z_step: 0.1, ..cfg((0.0, 0.0), (0.1, 10.0 * PI)) };
        let r = sign_change_scan(ScanTarget::Eta, &c, &Lab::default(), &Sequential).unwrap();
        assert!(r.brackets.len() >= 9);
        assert!(r.alternating());
        let d = sign_change_scan(ScanTarget::TuranDelta { mu: 1.5 }, &c, &Lab::default(), &Sequential).unwrap();
        assert_eq!(d.brackets.len(), r.brackets.len());
        for (a, b) in r.brackets.iter().zip(&d.brackets) {
            assert!((a.lo - b.lo).abs() < 1e-5);
        }
    }

    #[test]
    fn lommel_below_half_changes_sign() {
        let c = cfg((0.0, 0.0), (0.1, 20.0));
        let r = sign_change_scan(ScanTarget::Lommel { mu: 0.0 }, &c, &Lab::default(), &Sequential).unwrap();
        assert!(!r.brackets.is_empty());
    }

    #[test]
    fn reversed_setup_cases() {
        assert_eq!(reversed_setup(0.0).unwrap(), (1, ExpectedSign::Negative));
        assert_eq!(reversed_setup(1.0).unwrap(), (2, ExpectedSign::Positive));
        assert_eq!(reversed_setup(2.0).unwrap(), (3, ExpectedSign::Positive));
        assert!(reversed_setup(0.5).is_err());
        assert!(reversed_setup(-0.7).is_err());
    }

    #[test]
    fn reversed_windows() {
        let lab = Lab::default();
        for (mu, edge) in [(0.0, 2.29744), (1.0, 2.29744), (-0.4, 1.70927)] {
            let t = window_zero_table(mu, &lab, &Sequential).unwrap();
            assert!((t.zeros[0] - edge).abs() < 1e-5, "{mu}: {}", t.zeros[0]);
            let c = ScanConfig { z_step: 0.05, ..cfg((mu, mu), (0.05, 5.0)) };
            let r = reversed_window_check(mu, &c, Some(&t), &lab, &Sequential).unwrap();
            assert!(r.passed(), "{mu}: {:?}", r.slices);
            assert!(r.count(PointFlag::Unchecked) > 0);
        }
        let c = cfg((0.0, 0.0), (0.1, 1.0));
        assert!(matches!(
            reversed_window_check(0.0, &c, None, &lab, &Sequential),
            Err(Error::MissingZeroTable(_))
        ));
        let wrong = window_zero_table(0.3, &lab, &Sequential).unwrap();
        assert!(matches!(
            reversed_window_check(0.0, &c, Some(&wrong), &lab, &Sequential),
            Err(Error::WindowMismatch(_))
        ));
    }

    #[test]
    fn theorem1_slice_verified() {
        let c = ScanConfig { mu_step: 0.4, z_step: 0.5, ..cfg((-2.4, -0.8), (0.5, 50.0)) };
        let r = verify_inequality(InequalityKind::Turan1, 0, &c, &Lab::default(), &Sequential).unwrap();
        assert!(r.passed());
        assert!(r.points.iter().all(|p| p.sign == CertifiedSign::Positive));
    }
}
