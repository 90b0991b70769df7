//! Rendering of results in the three output formats.
//!
//! CSV headers:
//! - eval: `quantity,mu,nu,k,derivative,z,value,abs_error_estimate,method,terms_used,cancellation_index,extended`
//! - zeros: `n,zero,residual`
//! - inequality reports (`verify`, `scan conjecture`, `scan reversed`): `mu,z,margin,certified_sign,flag`
//! - identity reports: `mu,z,residual,measure,flag`
//! - sign-change reports: `n,lo,hi,left,right`

use std::collections::BTreeMap;

use lommel_core::inequality::InequalityKind;
use lommel_core::scan::{Boundary, IdentityReport, InequalityReport, PointFlag, ScanConfig, SignChangeReport};
use lommel_core::zeros::{InterlacingReport, ZeroFlag, ZeroTable};
use lommel_core::Evaluation;
use serde::Serialize;

use crate::error::Result;
use crate::format::{sig17, sig6, to_json, CsvTable, Format, Num, PrettyTable, SCHEMA_VERSION};

pub const EVAL_HEADER: &[&str] = &[
    "quantity",
    "mu",
    "nu",
    "k",
    "derivative",
    "z",
    "value",
    "abs_error_estimate",
    "method",
    "terms_used",
    "cancellation_index",
    "extended",
];
pub const ZEROS_HEADER: &[&str] = &["n", "zero", "residual"];
pub const INEQUALITY_HEADER: &[&str] = &["mu", "z", "margin", "certified_sign", "flag"];
pub const IDENTITY_HEADER: &[&str] = &["mu", "z", "residual", "measure", "flag"];
pub const SIGN_CHANGE_HEADER: &[&str] = &["n", "lo", "hi", "left", "right"];

const FLAGS: [PointFlag; 7] = [
    PointFlag::Ok,
    PointFlag::Violation,
    PointFlag::Witness,
    PointFlag::Uncertain,
    PointFlag::Unchecked,
    PointFlag::Boundary,
    PointFlag::OutsideDomain,
];

/// What was evaluated by `eval`.
#[derive(Clone, Copy, Debug)]
pub struct EvalQuery {
    pub quantity: &'static str,
    pub mu: f64,
    pub nu: Option<f64>,
    pub k: Option<u32>,
    pub derivative: u8,
    pub z: f64,
}

#[derive(Serialize)]
struct EvalDoc {
    schema: u32,
    command: &'static str,
    quantity: &'static str,
    mu: Num,
    nu: Option<Num>,
    k: Option<u32>,
    derivative: u8,
    z: Num,
    value: Num,
    abs_error_estimate: Num,
    method: &'static str,
    terms_used: usize,
    cancellation_index: Num,
    extended: bool,
}

pub fn eval(q: &EvalQuery, e: &Evaluation, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&EvalDoc {
            schema: SCHEMA_VERSION,
            command: "eval",
            quantity: q.quantity,
            mu: Num(q.mu),
            nu: q.nu.map(Num),
            k: q.k,
            derivative: q.derivative,
            z: Num(q.z),
            value: Num(e.value),
            abs_error_estimate: Num(e.abs_error_estimate),
            method: e.method.as_str(),
            terms_used: e.terms_used,
            cancellation_index: Num(e.cancellation_index),
            extended: e.extended,
        }),
        Format::Csv => {
            let mut t = CsvTable::new(EVAL_HEADER)?;
            t.row([
                q.quantity.to_string(),
                sig17(q.mu),
                q.nu.map(sig17).unwrap_or_default(),
                q.k.map(|k| k.to_string()).unwrap_or_default(),
                q.derivative.to_string(),
                sig17(q.z),
                sig17(e.value),
                sig17(e.abs_error_estimate),
                e.method.as_str().to_string(),
                e.terms_used.to_string(),
                sig17(e.cancellation_index),
                e.extended.to_string(),
            ])?;
            t.finish()
        }
        Format::Pretty => {
            let mut args = format!("mu={}", sig6(q.mu));
            if let Some(nu) = q.nu {
                args.push_str(&format!(" nu={}", sig6(nu)));
            }
            if let Some(k) = q.k {
                args.push_str(&format!(" k={k}"));
            }
            if q.derivative > 0 {
                args.push_str(&format!(" derivative={}", q.derivative));
            }
            args.push_str(&format!(" z={}", sig6(q.z)));
            Ok(key_values(&[
                ("quantity", format!("{} ({args})", q.quantity)),
                ("value", sig6(e.value)),
                ("error", sig6(e.abs_error_estimate)),
                ("method", e.method.as_str().to_string()),
                ("terms", e.terms_used.to_string()),
                ("cancellation", sig6(e.cancellation_index)),
                ("extended", e.extended.to_string()),
            ]))
        }
    }
}

fn key_values(rows: &[(&str, String)]) -> String {
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

/// A `2n pi` lower bound on an even-indexed zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EvenBound {
    pub n: usize,
    pub zero: Num,
    pub bound: Num,
    pub holds: bool,
}

#[derive(Serialize)]
struct ZeroDoc {
    n: usize,
    zero: Num,
    residual: Num,
    residual_bound: Num,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ZeroFlagDoc {
    SuspectedDoubleRoot { z: Num, min_abs: Num },
    ConvergenceFailure { lo: Num, hi: Num },
}

#[derive(Serialize)]
struct InterlacingDoc {
    with_k: u32,
    holds: bool,
    gaps_checked: usize,
    min_separation: Num,
    violations: Vec<[Num; 3]>,
}

#[derive(Serialize)]
struct ZeroTableDoc {
    schema: u32,
    command: &'static str,
    mu: Num,
    k: u32,
    window_max: Num,
    truncated: bool,
    coverage: Num,
    bracket_tol: Num,
    zeros: Vec<ZeroDoc>,
    flags: Vec<ZeroFlagDoc>,
    even_zero_bounds: Vec<EvenBound>,
    interlacing: Option<InterlacingDoc>,
}

/// Interlacing result against the table of another index.
pub struct Interlacing<'a> {
    pub with_k: u32,
    pub report: &'a InterlacingReport,
    pub min_separation: f64,
}

pub fn zeros(t: &ZeroTable, bounds: &[EvenBound], inter: Option<&Interlacing>, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&ZeroTableDoc {
            schema: SCHEMA_VERSION,
            command: "zeros",
            mu: Num(t.params.mu()),
            k: t.params.k(),
            window_max: Num(t.window_max),
            truncated: t.truncated,
            coverage: Num(t.coverage()),
            bracket_tol: Num(t.bracket_tol),
            zeros: t
                .zeros
                .iter()
                .zip(&t.residuals)
                .zip(&t.residual_bounds)
                .enumerate()
                .map(|(i, ((z, r), b))| ZeroDoc { n: i + 1, zero: Num(*z), residual: Num(*r), residual_bound: Num(*b) })
                .collect(),
            flags: t
                .flags
                .iter()
                .map(|f| match *f {
                    ZeroFlag::SuspectedDoubleRoot { z, min_abs } => {
                        ZeroFlagDoc::SuspectedDoubleRoot { z: Num(z), min_abs: Num(min_abs) }
                    }
                    ZeroFlag::ConvergenceFailure { lo, hi } => ZeroFlagDoc::ConvergenceFailure { lo: Num(lo), hi: Num(hi) },
                })
                .collect(),
            even_zero_bounds: bounds.to_vec(),
            interlacing: inter.map(|i| InterlacingDoc {
                with_k: i.with_k,
                holds: i.report.holds,
                gaps_checked: i.report.gaps_checked,
                min_separation: Num(i.min_separation),
                violations: i.report.violations.iter().map(|v| [Num(v.lo), Num(v.hi), Num(v.count as f64)]).collect(),
            }),
        }),
        Format::Csv => {
            let mut c = CsvTable::new(ZEROS_HEADER)?;
            for (i, (z, r)) in t.zeros.iter().zip(&t.residuals).enumerate() {
                c.row([(i + 1).to_string(), sig17(*z), sig17(*r)])?;
            }
            c.finish()
        }
        Format::Pretty => {
            let mut out = format!(
                "zeros of phi_{} at mu={} on (0, {}]: {}{}\n",
                t.params.k(),
                sig6(t.params.mu()),
                sig6(t.window_max),
                t.len(),
                if t.truncated { " (truncated)" } else { "" }
            );
            let mut p = PrettyTable::new(&["n", "zero", "residual", "bound"]);
            for (i, ((z, r), b)) in t.zeros.iter().zip(&t.residuals).zip(&t.residual_bounds).enumerate() {
                p.row(vec![(i + 1).to_string(), sig6(*z), sig6(*r), sig6(*b)]);
            }
            out.push_str(&p.render());
            for f in &t.flags {
                out.push_str(&zero_flag_line(f));
                out.push('\n');
            }
            if !bounds.is_empty() {
                let ok = bounds.iter().all(|b| b.holds);
                out.push_str(&format!("2n pi bound: {} ({} zeros)\n", pass(ok), bounds.len()));
            }
            if let Some(i) = inter {
                out.push_str(&format!(
                    "interlacing with phi_{}: {} ({} gaps, min separation {})\n",
                    i.with_k,
                    pass(i.report.holds),
                    i.report.gaps_checked,
                    sig6(i.min_separation)
                ));
            }
            Ok(out)
        }
    }
}

pub fn zero_flag_line(f: &ZeroFlag) -> String {
    match *f {
        ZeroFlag::SuspectedDoubleRoot { z, min_abs } => {
            format!("suspected double root near z={} (min |phi|={})", sig6(z), sig6(min_abs))
        }
        ZeroFlag::ConvergenceFailure { lo, hi } => {
            format!("root refinement did not converge in [{}, {}]", sig6(lo), sig6(hi))
        }
    }
}

pub fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct GridDoc {
    mu_range: [Num; 2],
    mu_step: Num,
    z_range: [Num; 2],
    z_step: Num,
    refine_depth: u32,
}

impl GridDoc {
    fn of(cfg: &ScanConfig) -> Self {
        GridDoc {
            mu_range: [Num(cfg.mu_range.0), Num(cfg.mu_range.1)],
            mu_step: Num(cfg.mu_step),
            z_range: [Num(cfg.z_range.0), Num(cfg.z_range.1)],
            z_step: Num(cfg.z_step),
            refine_depth: cfg.refine_depth,
        }
    }
}

#[derive(Serialize)]
struct PointDoc {
    mu: Num,
    z: Num,
    margin: Num,
    error: Num,
    tolerance: Num,
    certified_sign: i8,
    flag: &'static str,
}

#[derive(Serialize)]
struct BoundaryDoc {
    mu: Num,
    lo: Num,
    hi: Num,
    left: i8,
    right: i8,
}

impl BoundaryDoc {
    fn of(b: &Boundary) -> Self {
        BoundaryDoc { mu: Num(b.mu), lo: Num(b.lo), hi: Num(b.hi), left: b.left.as_i8(), right: b.right.as_i8() }
    }
}

#[derive(Serialize)]
struct SliceDoc {
    mu: Num,
    points: usize,
    positive: usize,
    negative: usize,
    uncertain: usize,
    min_margin: Num,
    first_negative: Option<Num>,
    consistent: bool,
}

#[derive(Serialize)]
struct InequalityDoc<'a> {
    schema: u32,
    command: &'a str,
    tag: &'a str,
    k: Option<u32>,
    label: &'a str,
    passed: bool,
    precision: &'a str,
    sign_tolerance: Num,
    error_guard: Num,
    window: Option<Num>,
    grid: GridDoc,
    counts: BTreeMap<&'static str, usize>,
    violations: Vec<[Num; 2]>,
    skipped_mu: Vec<[Num; 2]>,
    boundaries: Vec<BoundaryDoc>,
    slices: Vec<SliceDoc>,
    points: Vec<PointDoc>,
}

/// Context printed alongside an inequality report.
pub struct ReportMeta<'a> {
    pub command: &'a str,
    pub k: Option<u32>,
    pub precision: &'a str,
    pub cfg: &'a ScanConfig,
}

pub fn inequality(r: &InequalityReport, meta: &ReportMeta, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&InequalityDoc {
            schema: SCHEMA_VERSION,
            command: meta.command,
            tag: &r.tag,
            k: meta.k,
            label: r.label,
            passed: r.passed(),
            precision: meta.precision,
            sign_tolerance: Num(r.sign_tolerance),
            error_guard: Num(r.error_guard),
            window: r.window.map(Num),
            grid: GridDoc::of(meta.cfg),
            counts: FLAGS.iter().map(|f| (f.as_str(), r.count(*f))).collect(),
            violations: r.violations.iter().map(|v| [Num(v.0), Num(v.1)]).collect(),
            skipped_mu: r.skipped_mu.iter().map(|v| [Num(v.0), Num(v.1)]).collect(),
            boundaries: r.boundaries.iter().map(BoundaryDoc::of).collect(),
            slices: r
                .slices
                .iter()
                .map(|s| SliceDoc {
                    mu: Num(s.mu),
                    points: s.points,
                    positive: s.positive,
                    negative: s.negative,
                    uncertain: s.uncertain,
                    min_margin: Num(s.min_margin),
                    first_negative: s.first_negative.map(Num),
                    consistent: s.consistent,
                })
                .collect(),
            points: r
                .points
                .iter()
                .map(|p| PointDoc {
                    mu: Num(p.mu),
                    z: Num(p.z),
                    margin: Num(p.margin),
                    error: Num(p.error),
                    tolerance: Num(p.tolerance),
                    certified_sign: p.sign.as_i8(),
                    flag: p.flag.as_str(),
                })
                .collect(),
        }),
        Format::Csv => {
            let mut c = CsvTable::new(INEQUALITY_HEADER)?;
            for p in &r.points {
                c.row([sig17(p.mu), sig17(p.z), sig17(p.margin), p.sign.as_i8().to_string(), p.flag.as_str().to_string()])?;
            }
            c.finish()
        }
        Format::Pretty => {
            let mut out = format!("{}: {} ({})\n", r.tag, pass(r.passed()), r.label);
            if let Some(w) = r.window {
                out.push_str(&format!("window: (0, {})\n", sig6(w)));
            }
            let counts: Vec<String> = FLAGS
                .iter()
                .map(|f| (f.as_str(), r.count(*f)))
                .filter(|c| c.1 > 0)
                .map(|(f, n)| format!("{f} {n}"))
                .collect();
            out.push_str(&format!("points: {} ({})\n", r.points.len(), counts.join(", ")));
            for (mu, at) in &r.skipped_mu {
                out.push_str(&format!("skipped mu={} (undefined at {})\n", sig6(*mu), sig6(*at)));
            }
            let mut s = PrettyTable::new(&["mu", "points", "positive", "negative", "uncertain", "min margin", "first negative", "consistent"]);
            for x in &r.slices {
                s.row(vec![
                    sig6(x.mu),
                    x.points.to_string(),
                    x.positive.to_string(),
                    x.negative.to_string(),
                    x.uncertain.to_string(),
                    sig6(x.min_margin),
                    x.first_negative.map(sig6).unwrap_or_else(|| "-".into()),
                    x.consistent.to_string(),
                ]);
            }
            out.push_str(&s.render());
            if !r.boundaries.is_empty() {
                out.push_str(&format!("sign boundaries: {}\n", r.boundaries.len()));
                out.push_str(&boundary_table(&r.boundaries));
            }
            for (mu, z) in &r.violations {
                out.push_str(&format!("violation at mu={} z={}\n", sig6(*mu), sig6(*z)));
            }
            Ok(out)
        }
    }
}

fn boundary_table(bs: &[Boundary]) -> String {
    let mut t = PrettyTable::new(&["mu", "lo", "hi", "left", "right"]);
    for b in bs {
        t.row(vec![sig6(b.mu), sig6(b.lo), sig6(b.hi), b.left.as_i8().to_string(), b.right.as_i8().to_string()]);
    }
    t.render()
}

pub fn inequality_summary(r: &InequalityReport) -> String {
    format!(
        "{}: {} ({} points, {} violations, {} witnesses, {} uncertain, {} mu skipped)",
        r.tag,
        pass(r.passed()),
        r.points.len(),
        r.violations.len(),
        r.count(PointFlag::Witness),
        r.count(PointFlag::Uncertain),
        r.skipped_mu.len()
    )
}

#[derive(Serialize)]
struct IdentityPointDoc {
    mu: Num,
    z: Num,
    residual: Num,
    scale: Num,
    error: Num,
    measure: Num,
    pass: bool,
}

#[derive(Serialize)]
struct IdentityDoc<'a> {
    schema: u32,
    command: &'a str,
    tag: &'a str,
    passed: bool,
    precision: &'a str,
    tolerance: Num,
    worst: Num,
    failures: usize,
    grid: GridDoc,
    points: Vec<IdentityPointDoc>,
}

pub fn identity(r: &IdentityReport, meta: &ReportMeta, format: Format) -> Result<String> {
    let flag = |ok: bool| if ok { "ok" } else { "violation" };
    match format {
        Format::Json => to_json(&IdentityDoc {
            schema: SCHEMA_VERSION,
            command: meta.command,
            tag: r.tag,
            passed: r.passed(),
            precision: meta.precision,
            tolerance: Num(r.tolerance),
            worst: Num(r.worst()),
            failures: r.failures(),
            grid: GridDoc::of(meta.cfg),
            points: r
                .points
                .iter()
                .map(|p| IdentityPointDoc {
                    mu: Num(p.mu),
                    z: Num(p.z),
                    residual: Num(p.residual),
                    scale: Num(p.scale),
                    error: Num(p.error),
                    measure: Num(p.measure),
                    pass: p.pass,
                })
                .collect(),
        }),
        Format::Csv => {
            let mut c = CsvTable::new(IDENTITY_HEADER)?;
            for p in &r.points {
                c.row([sig17(p.mu), sig17(p.z), sig17(p.residual), sig17(p.measure), flag(p.pass).to_string()])?;
            }
            c.finish()
        }
        Format::Pretty => {
            let mut out = format!("{}\n", identity_summary(r));
            let failing: Vec<_> = r.points.iter().filter(|p| !p.pass).collect();
            if !failing.is_empty() {
                let mut t = PrettyTable::new(&["mu", "z", "residual", "measure"]);
                for p in failing {
                    t.row(vec![sig6(p.mu), sig6(p.z), sig6(p.residual), sig6(p.measure)]);
                }
                out.push_str(&t.render());
            }
            Ok(out)
        }
    }
}

pub fn identity_summary(r: &IdentityReport) -> String {
    format!(
        "{}: {} ({} points, {} above {}, worst {})",
        r.tag,
        pass(r.passed()),
        r.points.len(),
        r.failures(),
        sig6(r.tolerance),
        sig6(r.worst())
    )
}

#[derive(Serialize)]
struct SignChangeDoc<'a> {
    schema: u32,
    command: &'a str,
    target: &'a str,
    label: &'a str,
    precision: &'a str,
    alternating: bool,
    grid: GridDoc,
    brackets: Vec<BoundaryDoc>,
    uncertain: Vec<Num>,
    points: Vec<PointDoc>,
}

pub fn sign_changes(r: &SignChangeReport, meta: &ReportMeta, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&SignChangeDoc {
            schema: SCHEMA_VERSION,
            command: meta.command,
            target: &r.tag,
            label: r.label,
            precision: meta.precision,
            alternating: r.alternating(),
            grid: GridDoc::of(meta.cfg),
            brackets: r.brackets.iter().map(BoundaryDoc::of).collect(),
            uncertain: r.uncertain.iter().copied().map(Num).collect(),
            points: r
                .points
                .iter()
                .map(|p| PointDoc {
                    mu: Num(p.mu),
                    z: Num(p.z),
                    margin: Num(p.margin),
                    error: Num(p.error),
                    tolerance: Num(p.tolerance),
                    certified_sign: p.sign.as_i8(),
                    flag: p.flag.as_str(),
                })
                .collect(),
        }),
        Format::Csv => {
            let mut c = CsvTable::new(SIGN_CHANGE_HEADER)?;
            for (i, b) in r.brackets.iter().enumerate() {
                c.row([(i + 1).to_string(), sig17(b.lo), sig17(b.hi), b.left.as_i8().to_string(), b.right.as_i8().to_string()])?;
            }
            c.finish()
        }
        Format::Pretty => {
            let mut out = format!("{}\n", sign_change_summary(r));
            out.push_str(&boundary_table(&r.brackets));
            Ok(out)
        }
    }
}

pub fn sign_change_summary(r: &SignChangeReport) -> String {
    format!(
        "{}: {} sign changes ({}), {} uncertain points, {}",
        r.tag,
        r.brackets.len(),
        if r.alternating() { "alternating" } else { "not alternating" },
        r.uncertain.len(),
        r.label
    )
}

/// Tags accepted by `verify`.
pub fn verify_tags() -> Vec<&'static str> {
    let mut v: Vec<&str> = InequalityKind::ALL.iter().map(|k| k.tag()).collect();
    v.extend(["eta-identity", "wronskian-identity", "wronskian-identity-12"]);
    v
}
