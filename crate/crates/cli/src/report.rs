//! Structured and text renderings of a driver run.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use redform::reducer::OrderReport;
use redform::{DriverOutput, MatrixC, Verdict, Witness};

use crate::document::render_matrix;

pub const SCHEMA_VERSION: u32 = 1;

pub type Rows = Vec<Vec<String>>;

fn render_const(m: &MatrixC) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessReport {
    Unremovable { lambda: String, level: usize, coordinate: usize, coefficient: String, b: String, basis_matrix: Rows },
    Bracket { left: Rows, right: Rows },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictReport {
    Obstruction { order: u32, witness: WitnessReport },
    AbelianUpTo { order: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub eigenvalue: String,
    pub level: usize,
    /// Coordinates at this level.
    pub t: usize,
    /// Coordinates removed.
    pub s: usize,
    pub closed_form_matches: bool,
    /// F with P = Id + F, omitted when nothing was removed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<Rows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderReport {
    pub a1: Rows,
    pub gauge: Rows,
    pub reduced: Rows,
    pub lie_dim: usize,
    pub abelian: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub order: u32,
    pub dim: usize,
    /// Size of the top sym^p block.
    pub top_block: usize,
    pub off_diagonal_dim: usize,
    pub eigenvalues: Vec<String>,
    pub diagonalizable: bool,
    /// Coefficients of the minimal polynomial of the adjoint action, constant term first.
    pub minimal_polynomial: Vec<String>,
    pub steps: Vec<StepReport>,
    pub lie_dim: usize,
    pub abelian: bool,
    pub envelope_dim: Option<usize>,
    /// LVE_p as built.
    pub lve: Rows,
    pub prereduced: Rows,
    pub reduced: Rows,
    /// total_gauge[lve] = reduced.
    pub total_gauge: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub p_max: u32,
    pub mode: String,
    pub iterate_unreduced: bool,
    pub degree_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub verdict: VerdictReport,
    pub run: RunMeta,
    pub first_order: FirstOrderReport,
    pub orders: Vec<OrderEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn witness_report(w: &Witness) -> WitnessReport {
    match w {
        Witness::Unremovable { lambda, level, coordinate, basis_matrix, coefficient, b } => WitnessReport::Unremovable {
            lambda: lambda.to_string(),
            level: *level,
            coordinate: *coordinate,
            coefficient: coefficient.to_string(),
            b: b.to_string(),
            basis_matrix: render_const(basis_matrix),
        },
        Witness::Bracket { left, right } => WitnessReport::Bracket { left: render_const(left), right: render_const(right) },
    }
}

fn order_entry(r: &OrderReport) -> OrderEntry {
    let st = &r.state;
    OrderEntry {
        order: r.order,
        dim: r.lve.dim(),
        top_block: r.lve.slot().top,
        off_diagonal_dim: r.sub_dim(),
        eigenvalues: r.eigenvalues().iter().map(|e| e.to_string()).collect(),
        diagonalizable: st.adjoint.is_diagonalizable(),
        minimal_polynomial: r.minimal_polynomial().coeffs().iter().map(|c| c.to_string()).collect(),
        steps: st
            .log
            .iter()
            .map(|s| StepReport {
                eigenvalue: s.lambda.to_string(),
                level: s.level,
                t: s.coordinates,
                s: s.removed,
                closed_form_matches: s.closed_form_matches,
                factor: (s.removed > 0).then(|| render_matrix(&s.factor)),
            })
            .collect(),
        lie_dim: r.lie.dim(),
        abelian: r.lie.abelian,
        envelope_dim: r.envelope_dim,
        lve: render_matrix(&r.lve.matrix),
        prereduced: render_matrix(&st.prereduced.matrix),
        reduced: render_matrix(&st.current.matrix),
        total_gauge: render_matrix(r.total_gauge.matrix()),
    }
}

impl Report {
    pub fn new(out: &DriverOutput, run: RunMeta) -> Report {
        let verdict = match &out.verdict {
            Verdict::Obstruction { order, witness } => VerdictReport::Obstruction { order: *order, witness: witness_report(witness) },
            Verdict::AbelianUpTo { order } => VerdictReport::AbelianUpTo { order: *order },
        };
        let f = &out.first;
        Report {
            schema_version: SCHEMA_VERSION,
            verdict,
            run,
            first_order: FirstOrderReport {
                a1: render_matrix(&f.a1),
                gauge: render_matrix(f.gauge.matrix()),
                reduced: render_matrix(&f.reduced),
                lie_dim: f.lie.dim(),
                abelian: f.lie.abelian,
            },
            orders: out.orders.iter().map(order_entry).collect(),
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict: {}", verdict_line(&self.verdict));
        let _ = writeln!(s, "mode: {}, p_max: {}, degree cap: {}", self.run.mode, self.run.p_max, self.run.degree_cap);
        let f = &self.first_order;
        let _ = writeln!(s, "\norder 1: Lie dimension {}, abelian: {}", f.lie_dim, f.abelian);
        write_rows(&mut s, "reduced A1", &f.reduced);
        for o in &self.orders {
            let _ = writeln!(s, "\norder {}: system of size {}", o.order, o.dim);
            let _ = writeln!(s, "  off-diagonal algebra: dimension {}", o.off_diagonal_dim);
            let _ = writeln!(s, "  eigenvalues: {}", o.eigenvalues.join(", "));
            let _ = writeln!(s, "  diagonalizable: {}", o.diagonalizable);
            for st in &o.steps {
                if st.t > 0 {
                    let _ = writeln!(s, "  step: eigenvalue {} level {}: t = {}, s = {}", st.eigenvalue, st.level, st.t, st.s);
                }
            }
            let _ = writeln!(s, "  Lie algebra of the reduced system: dimension {}, abelian: {}", o.lie_dim, o.abelian);
            if let Some(e) = o.envelope_dim {
                let _ = writeln!(s, "  algebraic envelope: dimension {e}");
            }
            let top = o.top_block;
            let off: Rows = o.reduced[top..].iter().map(|r| r[..top].to_vec()).collect();
            write_rows(&mut s, "reduced off-diagonal block (nonzero entries)", &off);
        }
        if let VerdictReport::Obstruction { witness, .. } = &self.verdict {
            let _ = writeln!(s, "\nwitness:");
            match witness {
                WitnessReport::Unremovable { lambda, level, coordinate, coefficient, b, .. } => {
                    let _ = writeln!(s, "  eigenvalue {lambda}, level {level}, coordinate {coordinate}");
                    let _ = writeln!(s, "  y' = ({coefficient})·y + ({b}) has no rational solution");
                }
                WitnessReport::Bracket { .. } => {
                    let _ = writeln!(s, "  two elements of the reduced Lie algebra with a nonzero bracket");
                }
            }
        }
        if let Some(t) = &self.timings {
            let _ = writeln!(s, "\ntotal time: {} ms", t.total_ms);
        }
        s
    }
}

pub fn verdict_line(v: &VerdictReport) -> String {
    match v {
        VerdictReport::Obstruction { order, .. } => format!("OBSTRUCTION({order})"),
        VerdictReport::AbelianUpTo { order } => format!("ABELIAN_UP_TO({order})"),
    }
}

fn write_rows(s: &mut String, title: &str, rows: &Rows) {
    let _ = writeln!(s, "  {title}:");
    let mut any = false;
    for (i, r) in rows.iter().enumerate() {
        for (j, e) in r.iter().enumerate() {
            if e != "0" {
                any = true;
                let _ = writeln!(s, "    [{}, {}] = {}", i + 1, j + 1, e);
            }
        }
    }
    if !any {
        let _ = writeln!(s, "    (zero)");
    }
}
