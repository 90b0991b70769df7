use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use lommel_core::inequality::{InequalityKind, Lab};
use lommel_core::quadrature::{phi0_by_integral, phi1_by_integral, s_by_convolution, QuadratureSpec};
use lommel_core::scan::{
    conjecture_scan, identity_check, reversed_window_check, sign_change_scan, verify_inequality, window_params,
    window_zero_table, IdentityTarget, ScanConfig, ScanTarget,
};
use lommel_core::zeros::{find_zeros_with, min_separation, verify_interlacing, RootConfig, ZeroFlag, ZeroTable};
use lommel_core::{
    closed_form_half, ClosedForm, DerivativeOrder, Evaluation, Evaluator, LommelParams, Method, PhiParams, Precision,
};
use serde::Deserialize;

use crate::args::{EvalArgs, GridArgs, MethodArg, PrecisionArg, ScanCommand, TargetArg, VerifyArgs, ZerosArgs};
use crate::config::{parse_range, ConfigFile};
use crate::error::{CliError, Result};
use crate::format::{Format, Sink};
use crate::parallel::RayonMap;
use crate::report::{self, EvalQuery, EvenBound, Interlacing, ReportMeta};

/// Whether the checks a command performs passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Settings shared by every subcommand after merging flags and config file.
pub struct Context {
    pub format: Format,
    pub sink: Sink,
    pub precision: Precision,
    pub lab: Lab,
    pub map: RayonMap,
    pub config: ConfigFile,
}

impl Context {
    fn precision_name(&self) -> &'static str {
        match self.precision {
            Precision::Working => "working",
            Precision::Extended => "extended",
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        self.sink.emit(text)
    }

    /// Grid defaults, then config file entries, then flags.
    fn scan_config(&self, g: &GridArgs) -> Result<ScanConfig> {
        let c = &self.config;
        let mut cfg = ScanConfig::default();
        let range = |flag: &Option<String>, key: &str| -> Result<Option<(f64, f64)>> {
            match flag {
                Some(s) => parse_range(s)
                    .map(Some)
                    .ok_or_else(|| CliError::usage(format!("--{key} expects lo:hi, got '{s}'"))),
                None => c.pick(None, key, parse_range),
            }
        };
        let num = |s: &str| s.parse::<f64>().ok();
        if let Some(r) = range(&g.mu_range, "mu-range")? {
            cfg.mu_range = r;
        }
        if let Some(r) = range(&g.z_range, "z-range")? {
            cfg.z_range = r;
        }
        if let Some(v) = c.pick(g.mu_step, "mu-step", num)? {
            cfg.mu_step = v;
        }
        if let Some(v) = c.pick(g.z_step, "z-step", num)? {
            cfg.z_step = v;
        }
        if let Some(v) = c.pick(g.refine_depth, "refine-depth", |s| s.parse().ok())? {
            cfg.refine_depth = v;
        }
        if let Some(v) = c.pick(g.sign_tolerance, "sign-tolerance", num)? {
            cfg.sign_tolerance = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn meta<'a>(&self, command: &'a str, k: Option<u32>, cfg: &'a ScanConfig) -> ReportMeta<'a> {
        ReportMeta { command, k, precision: self.precision_name(), cfg }
    }
}

pub fn precision_of(p: PrecisionArg) -> Precision {
    match p {
        PrecisionArg::Working => Precision::Working,
        PrecisionArg::Extended => Precision::Extended,
    }
}

pub fn eval(a: &EvalArgs, ctx: &Context) -> Result<Status> {
    let phi_mode = a.k.is_some();
    if !a.z.is_finite() || a.z < 0.0 || (a.z == 0.0 && !phi_mode) {
        return Err(CliError::usage(format!(
            "z must be {} (z={})",
            if phi_mode { "nonnegative" } else { "positive" },
            a.z
        )));
    }
    let ev = ctx.lab.ev;
    let (q, e) = match a.k {
        Some(k) => {
            let p = PhiParams::new(a.mu, k)?;
            let order = DerivativeOrder::new(a.derivative).map_err(|e| CliError::usage(e.to_string()))?;
            let e = match a.method {
                MethodArg::Series => ev.phi(p, a.z, order)?,
                MethodArg::Quadrature if a.derivative == 0 && k == 0 => {
                    phi0_by_integral(a.mu, a.z, &QuadratureSpec::default())?
                }
                MethodArg::Quadrature if a.derivative == 0 && k == 1 => {
                    phi1_by_integral(a.mu, a.z, &QuadratureSpec::default())?
                }
                MethodArg::Quadrature => {
                    return Err(CliError::usage("quadrature evaluates phi_0 and phi_1 values only"));
                }
                MethodArg::ClosedForm => return Err(CliError::usage("closed forms exist for s_{mu,1/2} only")),
            };
            let q = EvalQuery { quantity: "phi", mu: a.mu, nu: None, k: Some(k), derivative: a.derivative, z: a.z };
            (q, e)
        }
        None => {
            let p = LommelParams::new(a.mu, a.nu)?;
            if a.derivative > 1 {
                return Err(CliError::usage("derivative must be 0 or 1 for s_{mu,nu}"));
            }
            let half = a.nu.abs() == 0.5;
            let e = match (a.method, a.derivative) {
                (MethodArg::Series, 0) => ev.lommel_s(p, a.z)?,
                (MethodArg::Series, _) => ev.lommel_s_derivative(p, a.z)?,
                (MethodArg::Quadrature, 0) if half => s_by_convolution(a.mu + 0.5, a.z, &QuadratureSpec::default())?,
                (MethodArg::Quadrature, _) => {
                    return Err(CliError::usage("quadrature evaluates s_{mu,1/2} values only"));
                }
                (MethodArg::ClosedForm, 0) if half => closed_form(a.mu, a.z)?,
                (MethodArg::ClosedForm, _) => {
                    return Err(CliError::usage("closed forms exist for s_{mu,1/2} values at mu = 1/2, 3/2, 5/2"));
                }
            };
            let quantity = if a.derivative == 0 { "lommel_s" } else { "lommel_s_derivative" };
            let q = EvalQuery { quantity, mu: a.mu, nu: Some(a.nu), k: None, derivative: a.derivative, z: a.z };
            (q, e)
        }
    };
    ctx.emit(&report::eval(&q, &e, ctx.format)?)?;
    Ok(Status::Pass)
}

fn closed_form(mu: f64, z: f64) -> Result<Evaluation> {
    let which = ClosedForm::from_mu(mu)
        .ok_or_else(|| CliError::usage(format!("closed forms exist at mu = 1/2, 3/2, 5/2 (mu={mu})")))?;
    let value = closed_form_half(which, z);
    // Rounding relative to the largest term of the numerator.
    let size = match which {
        ClosedForm::S12 => value.abs() * z.sqrt(),
        ClosedForm::S32 => z,
        ClosedForm::S52 => z * z,
    };
    Ok(Evaluation {
        value,
        abs_error_estimate: 8.0 * f64::EPSILON * (size / z.sqrt() + value.abs()),
        terms_used: 0,
        method: Method::ClosedForm,
        cancellation_index: if value == 0.0 { 1.0 } else { (size / z.sqrt() / value.abs()).max(1.0) },
        extended: false,
    })
}

pub fn zeros(a: &ZerosArgs, ctx: &Context) -> Result<Status> {
    if !(a.zmax > 0.0) || !a.zmax.is_finite() {
        return Err(CliError::usage(format!("--zmax must be positive (zmax={})", a.zmax)));
    }
    let params = PhiParams::new(a.mu, a.k)?;
    let defaults = RootConfig::default();
    let cfg = RootConfig {
        scan_step: a.scan_step.unwrap_or(defaults.scan_step),
        max_zeros: a.max_zeros.unwrap_or(defaults.max_zeros),
        ..defaults
    };
    cfg.validate()?;
    let table = find_zeros_with(params, a.zmax, &cfg, &ctx.lab.ev, &ctx.map)?;
    let bounds = even_zero_bounds(&table);
    let other = match a.interlace_with {
        Some(j) => Some((j, find_zeros_with(PhiParams::new(a.mu, j)?, a.zmax, &cfg, &ctx.lab.ev, &ctx.map)?)),
        None => None,
    };
    let inter_report = match &other {
        Some((_, t)) => Some(verify_interlacing(&table, t)?),
        None => None,
    };
    let inter = match (&other, &inter_report) {
        (Some((j, t)), Some(r)) => Some(Interlacing { with_k: *j, report: r, min_separation: min_separation(&table, t) }),
        _ => None,
    };
    ctx.emit(&report::zeros(&table, &bounds, inter.as_ref(), ctx.format)?)?;

    for f in &table.flags {
        eprintln!("{}", report::zero_flag_line(f));
    }
    let bounds_ok = bounds.iter().all(|b| b.holds);
    if !bounds.is_empty() {
        eprintln!("2n pi bound: {}", report::pass(bounds_ok));
    }
    let inter_ok = inter.as_ref().is_none_or(|i| i.report.holds);
    if let Some(i) = &inter {
        eprintln!("interlacing with phi_{}: {}", i.with_k, report::pass(i.report.holds));
    }
    let failed = table.flags.iter().find(|f| matches!(f, ZeroFlag::ConvergenceFailure { .. }));
    if let Some(&ZeroFlag::ConvergenceFailure { lo, hi }) = failed {
        return Err(CliError::Core(lommel_core::Error::NonConvergence { terms: 0, z: 0.5 * (lo + hi) }));
    }
    Ok(Status::of(bounds_ok && inter_ok))
}

/// `zeros[2n-1] > 2n pi`, established for `phi_0` with `0 < mu < 1`.
pub fn even_zero_bounds(t: &ZeroTable) -> Vec<EvenBound> {
    let mu = t.params.mu();
    if t.params.k() != 0 || !(mu > 0.0 && mu < 1.0) {
        return Vec::new();
    }
    t.zeros
        .iter()
        .skip(1)
        .step_by(2)
        .enumerate()
        .map(|(i, z)| {
            let n = i + 1;
            let bound = 2.0 * n as f64 * PI;
            EvenBound { n, zero: crate::format::Num(*z), bound: crate::format::Num(bound), holds: *z > bound }
        })
        .collect()
}

pub fn verify(a: &VerifyArgs, ctx: &Context) -> Result<Status> {
    let cfg = ctx.scan_config(&a.grid)?;
    if let Some(target) = IdentityTarget::from_tag(&a.tag) {
        let r = identity_check(target, &cfg, &ctx.lab, &ctx.map)?;
        ctx.emit(&report::identity(&r, &ctx.meta("verify", None, &cfg), ctx.format)?)?;
        eprintln!("{}", report::identity_summary(&r));
        return Ok(Status::of(r.passed()));
    }
    let kind = InequalityKind::from_tag(&a.tag).ok_or_else(|| {
        CliError::usage(format!("unknown inequality '{}'; expected one of {}", a.tag, report::verify_tags().join(", ")))
    })?;
    let r = verify_inequality(kind, a.k, &cfg, &ctx.lab, &ctx.map)?;
    let k = (kind == InequalityKind::Laguerre).then_some(a.k);
    ctx.emit(&report::inequality(&r, &ctx.meta("verify", k, &cfg), ctx.format)?)?;
    eprintln!("{}", report::inequality_summary(&r));
    Ok(Status::of(r.passed()))
}

pub fn scan(s: &ScanCommand, ctx: &Context) -> Result<Status> {
    match s {
        ScanCommand::Conjecture { grid } => {
            let cfg = ctx.scan_config(grid)?;
            let r = conjecture_scan(&cfg, &ctx.lab, &ctx.map)?;
            ctx.emit(&report::inequality(&r, &ctx.meta("scan conjecture", None, &cfg), ctx.format)?)?;
            eprintln!("{}", report::inequality_summary(&r));
            Ok(Status::of(r.passed()))
        }
        ScanCommand::SignChanges { target, mu, k, grid } => {
            let cfg = ctx.scan_config(grid)?;
            let need_mu = || mu.ok_or_else(|| CliError::usage("--mu is required for this target"));
            let t = match target {
                TargetArg::Eta => ScanTarget::Eta,
                TargetArg::Delta => ScanTarget::TuranDelta { mu: mu.unwrap_or(1.5) },
                TargetArg::Lommel => ScanTarget::Lommel { mu: need_mu()? },
                TargetArg::Phi => ScanTarget::Phi { mu: need_mu()?, k: *k },
            };
            let r = sign_change_scan(t, &cfg, &ctx.lab, &ctx.map)?;
            ctx.emit(&report::sign_changes(&r, &ctx.meta("scan sign-changes", None, &cfg), ctx.format)?)?;
            eprintln!("{}", report::sign_change_summary(&r));
            Ok(Status::Pass)
        }
        ScanCommand::Reversed { mu, auto_window, zeros, grid } => {
            let cfg = ctx.scan_config(grid)?;
            let table = match (auto_window, zeros) {
                (true, _) => Some(window_zero_table(*mu, &ctx.lab, &ctx.map)?),
                (false, Some(path)) => Some(read_zero_table(path)?),
                (false, None) => None,
            };
            if table.is_none() {
                window_params(*mu)?;
                return Err(CliError::usage("scan reversed needs --auto-window or --zeros PATH"));
            }
            let r = reversed_window_check(*mu, &cfg, table.as_ref(), &ctx.lab, &ctx.map)?;
            ctx.emit(&report::inequality(&r, &ctx.meta("scan reversed", None, &cfg), ctx.format)?)?;
            eprintln!("{}", report::inequality_summary(&r));
            Ok(Status::of(r.passed()))
        }
    }
}

#[derive(Deserialize)]
struct ZeroIn {
    zero: f64,
    residual: f64,
    residual_bound: f64,
}

#[derive(Deserialize)]
struct ZeroTableIn {
    schema: u32,
    mu: f64,
    k: u32,
    window_max: f64,
    truncated: bool,
    bracket_tol: f64,
    zeros: Vec<ZeroIn>,
}

/// Reads a table written by `zeros --format json`.
pub fn read_zero_table(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: PathBuf::from(path), source })?;
    let t: ZeroTableIn = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: not a zero table: {e}", path.display())))?;
    if t.schema != crate::format::SCHEMA_VERSION {
        return Err(CliError::usage(format!("{}: unsupported schema {}", path.display(), t.schema)));
    }
    Ok(ZeroTable {
        params: PhiParams::new(t.mu, t.k)?,
        window_max: t.window_max,
        zeros: t.zeros.iter().map(|z| z.zero).collect(),
        bracket_tol: t.bracket_tol,
        residuals: t.zeros.iter().map(|z| z.residual).collect(),
        residual_bounds: t.zeros.iter().map(|z| z.residual_bound).collect(),
        flags: Vec::new(),
        truncated: t.truncated,
    })
}

/// Evaluator for the chosen precision.
pub fn lab_for(p: Precision) -> Lab {
    Lab::new(Evaluator::new(p))
}
