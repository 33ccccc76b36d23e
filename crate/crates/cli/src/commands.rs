use std::fmt::Write as _;

use hadamard_core::bounds::verdict_with;
use hadamard_core::certify::{
    check_geometric_convexity, check_monotone_decreasing, check_range_unit, check_s_geometric_convexity,
    DEFAULT_GRID_1D, DEFAULT_GRID_3D, SLACK,
};
use hadamard_core::power_means::{prop3_rhs, prop3_rhs_as_printed, reproduce_table, ExampleRow, EXAMPLE2_PUBLISHED};
use hadamard_core::sampling::{power_samples, Family};
use hadamard_core::{
    tune_mu, tune_p, BoundReport, EndpointDerivatives, Mode, RankEntry, SampledCertificate, Theorem,
    TuneResult,
};
use serde::Serialize;

use crate::config::{Format, PropertyArg, RunConfig, TuneTarget};
use crate::render::{csv_table, json, num, opt};
use crate::CliError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INEQUALITY: u8 = 1;
pub const EXIT_REJECTED: u8 = 2;

pub struct Outcome {
    pub body: String,
    pub code: u8,
}

const REPORT_HEADER: [&str; 14] = [
    "s", "a", "b", "c", "fa_abs", "fb_abs", "lhs", "rhs_t1", "rhs_t2", "rhs_t3", "rhs_t4", "margin_min", "regime",
    "verdict",
];

fn regime_name(r: &BoundReport) -> &'static str {
    match r.regime {
        hadamard_core::Regime::UnitRange => "unit_range",
        hadamard_core::Regime::AboveUnit => "above_unit",
        hadamard_core::Regime::Mixed => "mixed",
    }
}

/// `violation`, `rejected` (strict, nothing certified), `partial` (strict,
/// some bounds rejected) or `ok`.
fn row_verdict(r: &BoundReport) -> &'static str {
    if !r.violations().is_empty() {
        "violation"
    } else if r.mode == Mode::Strict && r.rhs_by_theorem.is_empty() {
        "rejected"
    } else if r.mode == Mode::Strict && r.rhs_by_theorem.len() < Theorem::ALL.len() {
        "partial"
    } else {
        "ok"
    }
}

fn report_row(r: &BoundReport, c: Option<f64>) -> Vec<String> {
    let mut row = vec![num(r.params.s), num(r.a), num(r.b), opt(c), num(r.fa_abs), num(r.fb_abs), num(r.lhs)];
    for t in Theorem::ALL {
        row.push(opt(r.rhs_by_theorem.get(&t).copied()));
    }
    row.push(opt(r.min_margin()));
    row.push(regime_name(r).to_owned());
    row.push(row_verdict(r).to_owned());
    row
}

fn exit_for(r: &BoundReport) -> u8 {
    if r.mode == Mode::Strict && !r.violations().is_empty() {
        EXIT_INEQUALITY
    } else if r.mode == Mode::Strict && r.rejected.values().any(|v| !v.is_empty()) {
        EXIT_REJECTED
    } else {
        EXIT_OK
    }
}

#[derive(Serialize)]
struct EvalJson<'a> {
    #[serde(flatten)]
    report: &'a BoundReport,
    warnings: &'a [String],
}

pub fn eval(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fs = cfg.function()?;
    let (a, b) = cfg.interval()?;
    let params = cfg.params()?;
    let grids = cfg.grids()?;
    let warnings = fs.consistency_warnings(a, b);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let report = verdict_with(&fs, &params, a, b, grids)?;
    let c = fs.power_params().map(|(_, c)| c);
    let body = match cfg.format() {
        Format::Json => json(&EvalJson { report: &report, warnings: &warnings })?,
        Format::Csv => csv_table(&REPORT_HEADER, &[report_row(&report, c)])?,
        Format::Text => eval_text(&report),
    };
    Ok(Outcome { body, code: exit_for(&report) })
}

fn eval_text(r: &BoundReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "function: {}", r.label);
    let _ = writeln!(s, "interval: [{}, {}]", num(r.a), num(r.b));
    let _ = writeln!(s, "|f'(a)| = {}, |f'(b)| = {}", num(r.fa_abs), num(r.fb_abs));
    let mode = if r.mode == Mode::Strict { "strict" } else { "paper_compat" };
    let _ = writeln!(s, "mode: {mode}, regime: {}", regime_name(r));
    let _ = writeln!(s, "lhs: {}", num(r.lhs));
    for t in Theorem::ALL {
        match r.rhs_by_theorem.get(&t) {
            Some(rhs) => {
                let margin = r.margins[&t];
                let flag = if margin < -SLACK { "  NEGATIVE MARGIN" } else { "" };
                let _ = writeln!(s, "{}: rhs {}  margin {}{flag}", t.name(), num(*rhs), num(margin));
            }
            None => {
                let _ = writeln!(s, "{}: rejected ({})", t.name(), r.rejected[&t].join(", "));
            }
        }
    }
    for (name, cert) in &r.hypothesis_verdicts {
        let _ = writeln!(s, "hypothesis {name}: {}", cert_summary(cert));
    }
    s
}

fn cert_summary(c: &SampledCertificate) -> String {
    let mut s = format!(
        "{} (worst margin {}, grid {:?})",
        if c.passed() { "pass" } else { "fail" },
        num(c.worst_margin),
        c.grid
    );
    if let Some(ce) = &c.counterexample {
        let point: Vec<String> = ce.point.iter().map(|x| num(*x)).collect();
        let _ = write!(s, "; counterexample at ({}) lhs {} rhs {}", point.join(", "), num(ce.lhs), num(ce.rhs));
    }
    s
}

#[derive(Serialize)]
struct VerifyRow {
    s: f64,
    a: f64,
    b: f64,
    c: f64,
    fa_abs: f64,
    fb_abs: f64,
    lhs: f64,
    rhs_t1: Option<f64>,
    rhs_t2: Option<f64>,
    rhs_t3: Option<f64>,
    rhs_t4: Option<f64>,
    margin_min: Option<f64>,
    regime: &'static str,
    verdict: &'static str,
}

#[derive(Serialize)]
struct VerifyJson {
    seed: u64,
    samples: usize,
    family: Family,
    mode: Mode,
    violations: usize,
    rejected: usize,
    min_margin: Option<f64>,
    rows: Vec<VerifyRow>,
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.samples.unwrap_or(1000);
    if n == 0 {
        return Err(CliError::input("sample count must be at least 1"));
    }
    let seed = cfg.seed.unwrap_or(0);
    let family = cfg.family.unwrap_or(Family::Admissible);
    let grids = cfg.grids()?;
    let mode = cfg.mode();
    let samples = power_samples(seed, n, &cfg.ranges(), family).map_err(CliError::from)?;

    let mut rows = Vec::with_capacity(n);
    let mut csv_rows = Vec::with_capacity(n);
    let mut min_margin: Option<f64> = None;
    for sample in &samples {
        let fs = sample.function()?;
        let mut params = cfg.params_for(sample.s)?;
        params.mode = mode;
        let r = verdict_with(&fs, &params, sample.a, sample.b, grids)?;
        if let Some(m) = r.min_margin() {
            min_margin = Some(min_margin.map_or(m, |x| x.min(m)));
        }
        csv_rows.push(report_row(&r, Some(sample.c)));
        let rhs = |t| r.rhs_by_theorem.get(&t).copied();
        rows.push(VerifyRow {
            s: sample.s,
            a: sample.a,
            b: sample.b,
            c: sample.c,
            fa_abs: r.fa_abs,
            fb_abs: r.fb_abs,
            lhs: r.lhs,
            rhs_t1: rhs(Theorem::T1),
            rhs_t2: rhs(Theorem::T2),
            rhs_t3: rhs(Theorem::T3),
            rhs_t4: rhs(Theorem::T4),
            margin_min: r.min_margin(),
            regime: regime_name(&r),
            verdict: row_verdict(&r),
        });
    }
    let violations = rows.iter().filter(|r| r.verdict == "violation").count();
    let rejected = rows.iter().filter(|r| r.verdict == "rejected").count();
    let code = if mode == Mode::Strict && violations > 0 { EXIT_INEQUALITY } else { EXIT_OK };
    let body = match cfg.format() {
        Format::Csv => csv_table(&REPORT_HEADER, &csv_rows)?,
        Format::Json => json(&VerifyJson { seed, samples: n, family, mode, violations, rejected, min_margin, rows })?,
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "samples: {n} (seed {seed}, family {family:?}, mode {mode:?})");
            let _ = writeln!(s, "violations (margin < -{SLACK:e}): {violations}");
            let _ = writeln!(s, "rows with every bound rejected: {rejected}");
            let _ = writeln!(s, "smallest reported margin: {}", opt(min_margin));
            s
        }
    };
    Ok(Outcome { body, code })
}

pub fn certify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fs = cfg.function()?;
    let (a, b) = cfg.interval()?;
    let property = RunConfig::require(cfg.property, "property")?;
    let q = cfg.q.unwrap_or(1.0);
    if !(q > 0.0 && q.is_finite()) {
        return Err(CliError::input(format!("q must be positive and finite, got {q}")));
    }
    let g = |x: f64| fs.abs_fprime(x).map(|v| v.powf(q));
    let cert = match property {
        PropertyArg::Monotone => check_monotone_decreasing(g, a, b, cfg.grid_1d.unwrap_or(DEFAULT_GRID_1D))?,
        PropertyArg::Range => check_range_unit(g, a, b, cfg.grid_1d.unwrap_or(DEFAULT_GRID_1D))?,
        PropertyArg::Gconvex => check_geometric_convexity(g, a, b, cfg.grid_3d.unwrap_or(DEFAULT_GRID_3D))?,
        PropertyArg::Sconvex => {
            check_s_geometric_convexity(g, a, b, cfg.s()?, cfg.grid_3d.unwrap_or(DEFAULT_GRID_3D))?
        }
    };
    let code = if cert.passed() { EXIT_OK } else { EXIT_REJECTED };
    let body = match cfg.format() {
        Format::Json => json(&cert)?,
        Format::Csv => {
            let ce = cert.counterexample.as_ref();
            let point = ce
                .map(|c| c.point.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            csv_table(
                &["property", "verdict", "worst_margin", "counterexample", "lhs", "rhs"],
                &[vec![
                    cert.property.name().to_owned(),
                    if cert.passed() { "pass" } else { "fail" }.to_owned(),
                    num(cert.worst_margin),
                    point,
                    opt(ce.map(|c| c.lhs)),
                    opt(ce.map(|c| c.rhs)),
                ]],
            )?
        }
        Format::Text => format!("{}: {}\n", cert.property.name(), cert_summary(&cert)),
    };
    Ok(Outcome { body, code })
}

fn tune_text(r: &TuneResult) -> String {
    let mut s = format!("{}: best bound {}\n", r.theorem.name(), num(r.best_bound));
    for ((name, value), edge) in r.param_names.iter().zip(&r.best_params).zip(&r.at_boundary) {
        let flag = if *edge { "  (at search boundary)" } else { "" };
        let _ = writeln!(s, "  {name} = {}{flag}", num(*value));
    }
    let _ = writeln!(s, "  golden-section evaluations: {}", r.iterations);
    s
}

pub fn tune(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (a, b) = cfg.interval()?;
    let s = cfg.s()?;
    let d = match (cfg.fa, cfg.fb) {
        (Some(fa), Some(fb)) => EndpointDerivatives::new(fa, fb)?,
        (None, None) => {
            let fs = cfg.function()?;
            EndpointDerivatives::new(fs.abs_fprime(a)?, fs.abs_fprime(b)?)?
        }
        _ => return Err(CliError::input("give both --fa and --fb, or a function")),
    };
    let Some(target) = cfg.theorem else {
        let rank = hadamard_core::tuner::tightness_rank_for(&d, s, a, b)?;
        return Ok(Outcome { body: rank_body(&rank, cfg.format())?, code: EXIT_OK });
    };
    let result = match target {
        TuneTarget::T2 => tune_p(&d, s, a, b)?,
        TuneTarget::T4 => tune_mu(&d, s, a, b)?,
    };
    let body = match cfg.format() {
        Format::Json => json(&result)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = result
                .param_names
                .iter()
                .zip(&result.best_params)
                .zip(&result.at_boundary)
                .map(|((n, v), e)| {
                    vec![
                        result.theorem.name().to_owned(),
                        n.clone(),
                        num(*v),
                        e.to_string(),
                        num(result.best_bound),
                        result.iterations.to_string(),
                    ]
                })
                .collect();
            csv_table(&["theorem", "param", "value", "at_boundary", "best_bound", "iterations"], &rows)?
        }
        Format::Text => tune_text(&result),
    };
    Ok(Outcome { body, code: EXIT_OK })
}

fn rank_body(rank: &[RankEntry], format: Format) -> Result<String, CliError> {
    let params = |e: &RankEntry| e.params.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
    Ok(match format {
        Format::Json => json(&rank)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                rank.iter().map(|e| vec![e.theorem.name().to_owned(), num(e.bound), params(e)]).collect();
            csv_table(&["theorem", "bound", "params"], &rows)?
        }
        Format::Text => {
            let mut s = String::new();
            for (i, e) in rank.iter().enumerate() {
                let _ = writeln!(s, "{}. {} {}  [{}]", i + 1, e.theorem.name(), num(e.bound), params(e));
            }
            s
        }
    })
}

#[derive(Serialize)]
struct Prop3Row {
    s: f64,
    a: f64,
    b: f64,
    q: f64,
    theorem_form: f64,
    printed_form: Option<f64>,
    difference: Option<f64>,
    note: Option<String>,
}

fn prop3_rows() -> Result<Vec<Prop3Row>, CliError> {
    let mut out = Vec::new();
    for &(s, a, b, _, _) in &EXAMPLE2_PUBLISHED {
        for q in [1.0, 2.0, 3.0] {
            let theorem_form = prop3_rhs(s, q, a, b)?;
            let (printed_form, note) = match prop3_rhs_as_printed(s, q, a, b) {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            };
            out.push(Prop3Row {
                s,
                a,
                b,
                q,
                theorem_form,
                printed_form,
                difference: printed_form.map(|p| p - theorem_form),
                note,
            });
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct ReproduceJson {
    rel_tol: f64,
    all_within: bool,
    rows: Vec<ReproduceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prop3: Option<Vec<Prop3Row>>,
}

#[derive(Serialize)]
struct ReproduceRow {
    #[serde(flatten)]
    row: ExampleRow,
    pass: bool,
}

pub fn reproduce(cfg: &RunConfig, perturb: f64, prop3_as_printed: bool) -> Result<Outcome, CliError> {
    let rel_tol = cfg.rel_tol.unwrap_or(hadamard_core::power_means::EXAMPLE2_REL_TOL);
    let published: Vec<_> = EXAMPLE2_PUBLISHED
        .iter()
        .map(|&(s, a, b, l, r)| (s, a, b, l * (1.0 + perturb), r * (1.0 + perturb)))
        .collect();
    let rows: Vec<ReproduceRow> = reproduce_table(&published)?
        .into_iter()
        .map(|row| ReproduceRow { pass: row.within(rel_tol), row })
        .collect();
    let all_within = rows.iter().all(|r| r.pass);
    let prop3 = if prop3_as_printed { Some(prop3_rows()?) } else { None };
    let code = if all_within { EXIT_OK } else { EXIT_INEQUALITY };
    let body = match cfg.format() {
        Format::Json => json(&ReproduceJson { rel_tol, all_within, rows, prop3 })?,
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let x = &r.row;
                    vec![
                        num(x.s),
                        num(x.a),
                        num(x.b),
                        num(x.lhs_published),
                        num(x.lhs),
                        num(x.lhs_rel_diff),
                        num(x.rhs_published),
                        num(x.rhs),
                        num(x.rhs_rel_diff),
                        num(x.margin),
                        if r.pass { "PASS" } else { "FAIL" }.to_owned(),
                    ]
                })
                .collect();
            let mut out = csv_table(
                &[
                    "s", "a", "b", "lhs_published", "lhs", "lhs_rel_diff", "rhs_published", "rhs", "rhs_rel_diff",
                    "margin", "status",
                ],
                &table,
            )?;
            if let Some(p3) = &prop3 {
                out.push('\n');
                out.push_str(&prop3_csv(p3)?);
            }
            out
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "s     a     b     lhs (published / computed / rel diff)   rhs (published / computed / rel diff)");
            for r in &rows {
                let x = &r.row;
                let _ = writeln!(
                    s,
                    "{:<5} {:<5} {:<5} {} / {} / {:.2e}   {} / {} / {:.2e}   {}",
                    x.s,
                    x.a,
                    x.b,
                    num(x.lhs_published),
                    num(x.lhs),
                    x.lhs_rel_diff,
                    num(x.rhs_published),
                    num(x.rhs),
                    x.rhs_rel_diff,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            let _ = writeln!(s, "tolerance {rel_tol:e} relative: {}", if all_within { "all rows match" } else { "MISMATCH" });
            if let Some(p3) = &prop3 {
                let _ = writeln!(s, "\nthird restatement, kernel form vs printed form:");
                for r in p3 {
                    let printed = r.printed_form.map(num).unwrap_or_else(|| "undefined".to_owned());
                    let _ = writeln!(
                        s,
                        "s={} a={} b={} q={}: {} vs {} (difference {})",
                        r.s,
                        r.a,
                        r.b,
                        r.q,
                        num(r.theorem_form),
                        printed,
                        opt(r.difference)
                    );
                }
            }
            s
        }
    };
    Ok(Outcome { body, code })
}

fn prop3_csv(rows: &[Prop3Row]) -> Result<String, CliError> {
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.s),
                num(r.a),
                num(r.b),
                num(r.q),
                num(r.theorem_form),
                opt(r.printed_form),
                opt(r.difference),
            ]
        })
        .collect();
    csv_table(&["s", "a", "b", "q", "kernel_form", "printed_form", "difference"], &table)
}
