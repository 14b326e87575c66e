//! Batch front end: read a problem document, run the engine, render a report.

pub mod document;
pub mod report;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use redform::reducer::StageError;
use redform::variational::{build_lve, first_variational, gauge_apply, sym_power, Gauge, VariationalError};
use redform::{mrs_driver, MatrixK, ReducerError, Verdict};

use document::{compose_factors, parse_matrix, render_matrix, ProblemDocument, RunMode};
use report::{Report, Rows, RunMeta, Timings};

pub const EXIT_ABELIAN: i32 = 0;
pub const EXIT_GAUGE_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_OBSTRUCTION: i32 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid document: {0}")]
    Document(String),
    #[error("{what}: {message}")]
    Input { what: String, message: String },
    #[error("{}", describe(.0))]
    Reducer(#[from] ReducerError),
}

fn describe(e: &ReducerError) -> String {
    match e {
        ReducerError::CurveNotSolution { .. } => format!("verify_curve: {e}"),
        ReducerError::Ve1NotReduced(_) => format!("first order: {e}"),
        ReducerError::Stage { order, source } => {
            let stage = match source {
                StageError::Variational(_) => "variational equations",
                StageError::Lie(_) => "Lie algebra analysis",
                StageError::Ode(_) => "rational solutions",
                StageError::Matrix(_) => "linear algebra",
                StageError::Field(_) => "field arithmetic",
            };
            format!("order {order}: {stage}: {source}")
        }
    }
}

impl CliError {
    pub fn input(what: &str, e: impl std::fmt::Display) -> Self {
        CliError::Input { what: what.to_string(), message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Reducer(e) if e.is_capacity() => EXIT_CAPACITY,
            _ => EXIT_INPUT,
        }
    }
}

pub fn read_document(path: &str) -> Result<ProblemDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })?;
    ProblemDocument::parse(&text)
}

/// Command line overrides of the [run] section.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub p_max: Option<u32>,
    pub mode: Option<RunMode>,
    pub degree_cap: Option<usize>,
    pub timings: bool,
}

pub struct RunOutcome {
    pub report: Report,
    pub exit_code: i32,
}

pub fn run(doc: &ProblemDocument, ov: &RunOverrides) -> Result<RunOutcome, CliError> {
    let mut doc = doc.clone();
    if let Some(p) = ov.p_max {
        doc.run.p_max = p;
    }
    if let Some(m) = ov.mode {
        doc.run.mode = m;
    }
    if let Some(c) = ov.degree_cap {
        doc.run.degree_cap = Some(c);
    }
    let resolved = doc.resolve()?;
    let pb = resolved.problem()?;
    let opts = doc.driver_options();
    let start = Instant::now();
    let out = mrs_driver(&pb.system, &pb.curve, &pb.ve1_gauge, pb.expected.as_ref(), doc.run.p_max, &opts)?;
    let total = start.elapsed();
    let meta = RunMeta {
        p_max: doc.run.p_max,
        mode: match doc.run.mode {
            RunMode::Full => "full".into(),
            RunMode::Simplified => "simplified".into(),
        },
        iterate_unreduced: doc.run.iterate_unreduced,
        degree_cap: opts.solve.degree_cap,
    };
    let mut report = Report::new(&out, meta);
    if ov.timings {
        report.timings = Some(Timings { total_ms: total.as_millis() });
    }
    let exit_code = match out.verdict {
        Verdict::AbelianUpTo { .. } => EXIT_ABELIAN,
        Verdict::Obstruction { .. } => EXIT_OBSTRUCTION,
    };
    Ok(RunOutcome { report, exit_code })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeCheck {
    pub holds: bool,
    pub computed: Rows,
    /// P[A] − B, present when the relation fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<Rows>,
}

/// Is P[A] = B? A defaults to A₁ of the problem, P and B to the [ve1] gauge and expected form.
pub fn verify_gauge(doc: &ProblemDocument) -> Result<GaugeCheck, CliError> {
    let resolved = doc.resolve()?;
    let t = &resolved.tower;
    let v = doc.verify.clone().unwrap_or_default();
    let a = match &v.a {
        Some(rows) => parse_matrix(t, rows, "verify.a")?,
        None => {
            let pb = resolved.problem()?;
            first_variational(&pb.system, &pb.curve).map_err(|e| CliError::input("first_variational", e))?
        }
    };
    let n = a.rows();
    let factors = if v.gauge.is_empty() { &doc.ve1.gauge } else { &v.gauge };
    let p = compose_factors(t, factors, n, "gauge")?;
    let b = match (&v.b, &doc.ve1.expected) {
        (Some(rows), _) => parse_matrix(t, rows, "verify.b")?,
        (None, Some(rows)) => parse_matrix(t, rows, "ve1.expected")?,
        (None, None) => return Err(CliError::Document("no target matrix: give verify.b or ve1.expected".into())),
    };
    let pa = gauge_apply(&p, &a).map_err(|e| match e {
        VariationalError::SingularGauge => CliError::input("gauge", "the gauge matrix is singular"),
        e => CliError::input("gauge", e),
    })?;
    if pa.rows() != b.rows() || pa.cols() != b.cols() {
        return Err(CliError::Document("P[A] and B have different sizes".into()));
    }
    let diff = pa.sub(&b);
    let holds = diff.is_zero();
    Ok(GaugeCheck { holds, computed: render_matrix(&pa), difference: (!holds).then(|| render_matrix(&diff)) })
}

/// LVE_p of the document's problem.
pub fn build_ve(doc: &ProblemDocument, order: u32) -> Result<MatrixK, CliError> {
    let resolved = doc.resolve()?;
    let pb = resolved.problem()?;
    let check = redform::variational::verify_curve(&pb.system, &pb.curve).map_err(|e| CliError::input("verify_curve", e))?;
    if let Some((component, residual)) = check.witness {
        return Err(ReducerError::CurveNotSolution { component, residual: residual.to_string() }.into());
    }
    let mut lve = None;
    for p in 1..=order.max(1) {
        lve = Some(build_lve(&pb.system, &pb.curve, p, lve.as_ref()).map_err(|e| CliError::input("build_lve", e))?);
    }
    Ok(lve.expect("order ≥ 1").matrix)
}

/// sym^p of verify.a, or of A₁ when absent.
pub fn sym_power_of(doc: &ProblemDocument, p: u32) -> Result<MatrixK, CliError> {
    let resolved = doc.resolve()?;
    let a = match doc.verify.as_ref().and_then(|v| v.a.as_ref()) {
        Some(rows) => parse_matrix(&resolved.tower, rows, "verify.a")?,
        None => {
            let pb = resolved.problem()?;
            first_variational(&pb.system, &pb.curve).map_err(|e| CliError::input("first_variational", e))?
        }
    };
    sym_power(&a, p).map_err(|e| CliError::input("sym_power", e))
}

/// Re-parse the matrices of a report and check total_gauge[lve] = reduced at every order.
pub fn recheck_report(doc: &ProblemDocument, report: &Report) -> Result<bool, CliError> {
    let t = doc.tower()?;
    for o in &report.orders {
        let lve = parse_matrix(&t, &o.lve, "report lve")?;
        let g = parse_matrix(&t, &o.total_gauge, "report gauge")?;
        let red = parse_matrix(&t, &o.reduced, "report reduced")?;
        let g = Gauge::new(g).map_err(|e| CliError::input("report gauge", e))?;
        if g.apply(&lve).map_err(|e| CliError::input("report gauge", e))? != red {
            return Ok(false);
        }
    }
    let a1 = parse_matrix(&t, &report.first_order.a1, "report a1")?;
    let g1 = parse_matrix(&t, &report.first_order.gauge, "report gauge")?;
    let r1 = parse_matrix(&t, &report.first_order.reduced, "report reduced")?;
    Ok(gauge_apply(&g1, &a1).map_err(|e| CliError::input("report gauge", e))? == r1)
}
