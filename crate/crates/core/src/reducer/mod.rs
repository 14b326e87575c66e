//! Pre-reduction, partial and full reduction of variational equations, and the order-by-order driver.

mod state;

use thiserror::Error;

use crate::fields::{FieldElement, FieldError, Poly};
use crate::lie::{envelope_dim, lie_algebra_of, LieBasis, LieError};
use crate::matrix::{MatrixC, MatrixError, MatrixK};
use crate::ode::{OdeError, SolveOptions};
use crate::variational::{build_lve, first_variational, verify_curve, BlockSystem, Gauge, HamiltonianSystem, VariationalError};

pub use state::{full_reduce, partial_reduce_level, simplified_check, unremovable_coordinate, LevelStep, ReductionState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StageError {
    #[error(transparent)]
    Variational(#[from] VariationalError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl StageError {
    /// Eigenvalue outside the tower or a degree cap: the input is fine but the engine gave up.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            StageError::Matrix(MatrixError::EigenvalueOutsideTower { .. })
                | StageError::Lie(LieError::Matrix(MatrixError::EigenvalueOutsideTower { .. }))
                | StageError::Ode(OdeError::DegreeCapExceeded { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReducerError {
    #[error("the curve is not a solution: component {component} has residual {residual}")]
    CurveNotSolution { component: usize, residual: String },
    #[error("the first variational gauge does not give an abelian reduced form: {0}")]
    Ve1NotReduced(String),
    #[error("order {order}: {source}")]
    Stage { order: u32, source: StageError },
}

impl ReducerError {
    fn at(order: u32) -> impl Fn(StageError) -> ReducerError {
        move |source| ReducerError::Stage { order, source }
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, ReducerError::Stage { source, .. } if source.is_capacity())
    }
}

fn stage<E: Into<StageError>>(order: u32) -> impl Fn(E) -> ReducerError {
    move |e| ReducerError::at(order)(e.into())
}

/// Why an order is not abelian.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// y' = coefficient·y + b has no rational solution (y' = b when λ = 0), so the coordinate
    /// along `basis_matrix` at eigenvalue λ and this flag level cannot be removed.
    Unremovable {
        lambda: FieldElement,
        level: usize,
        coordinate: usize,
        basis_matrix: MatrixC,
        coefficient: FieldElement,
        b: FieldElement,
    },
    /// Two elements of the Lie algebra of the reduced system with a nonzero bracket.
    Bracket { left: MatrixC, right: MatrixC },
}

impl Witness {
    /// Re-check the bracket witnesses; for `Unremovable` this only checks that b is nonzero
    /// (the no-solution claim is left to an independent solver).
    pub fn brackets_hold(&self) -> bool {
        match self {
            Witness::Unremovable { b, .. } => !crate::fields::Field::is_zero(b),
            Witness::Bracket { left, right } => !left.bracket(right).is_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Obstruction { order: u32, witness: Witness },
    AbelianUpTo { order: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Full,
    Simplified,
}

#[derive(Debug, Clone, Default)]
pub struct DriverOptions {
    pub mode: Mode,
    /// Simplified mode only: carry only the prereduction gauge to the next order.
    pub iterate_unreduced: bool,
    pub solve: SolveOptions,
}

/// Everything computed at one order p ≥ 2.
#[derive(Debug, Clone)]
pub struct OrderReport {
    pub order: u32,
    pub lve: BlockSystem,
    pub prereduce_gauge: Gauge,
    pub state: ReductionState,
    /// Lie algebra of the final system of this order.
    pub lie: LieBasis,
    pub envelope_dim: Option<usize>,
    /// Gauge from LVE_p to the reduced system.
    pub total_gauge: Gauge,
}

impl OrderReport {
    pub fn reduced(&self) -> &BlockSystem {
        &self.state.current
    }

    pub fn sub_dim(&self) -> usize {
        self.state.sub.dim()
    }

    pub fn eigenvalues(&self) -> Vec<FieldElement> {
        self.state.adjoint.eigenvalues()
    }

    pub fn minimal_polynomial(&self) -> Poly<FieldElement> {
        self.state.adjoint.minimal_polynomial()
    }
}

/// First order: A₁, the gauge and the reduced form.
#[derive(Debug, Clone)]
pub struct FirstOrder {
    pub a1: MatrixK,
    pub gauge: Gauge,
    pub reduced: MatrixK,
    pub lie: LieBasis,
}

#[derive(Debug, Clone)]
pub struct DriverOutput {
    pub verdict: Verdict,
    pub first: FirstOrder,
    pub orders: Vec<OrderReport>,
}

/// Q = diag(Sym^p(P₁), P_{p−1}) and Q[A_p].
pub fn prereduce(a: &BlockSystem, p1: &Gauge, lower: &Gauge) -> Result<(BlockSystem, Gauge), StageError> {
    if lower.dim() + a.slot().top != a.dim() || p1.dim() != a.nvars {
        return Err(VariationalError::Dimension("gauge sizes do not match the block layout".into()).into());
    }
    let top = p1.sym_power(a.order);
    let q = Gauge::block_diag(&[&top, lower]);
    let m = q.apply(&a.matrix)?;
    let out = BlockSystem { order: a.order, nvars: a.nvars, matrix: m };
    if let Some((row, col)) = out.upper_violation() {
        return Err(LieError::UpperBlockNonzero { row, col }.into());
    }
    Ok((out, q))
}

/// Check that `gauge` reduces A₁ to a form with abelian Lie algebra (and equals `expected` if given).
pub fn check_first_order(
    sys: &HamiltonianSystem,
    phi: &[FieldElement],
    gauge: &MatrixK,
    expected: Option<&MatrixK>,
) -> Result<FirstOrder, ReducerError> {
    let check = verify_curve(sys, phi).map_err(stage(1))?;
    if let Some((component, r)) = check.witness {
        return Err(ReducerError::CurveNotSolution { component, residual: r.to_string() });
    }
    let a1 = first_variational(sys, phi).map_err(stage(1))?;
    let g = Gauge::new(gauge.clone()).map_err(|e| ReducerError::Ve1NotReduced(e.to_string()))?;
    let reduced = g.apply(&a1).map_err(|e| ReducerError::Ve1NotReduced(e.to_string()))?;
    if let Some(e) = expected {
        if *e != reduced {
            return Err(ReducerError::Ve1NotReduced("the gauge does not produce the stated reduced form".into()));
        }
    }
    let lie = lie_algebra_of(&reduced);
    if !lie.abelian {
        return Err(ReducerError::Ve1NotReduced("the reduced form has a non-abelian Lie algebra".into()));
    }
    Ok(FirstOrder { a1, gauge: g, reduced, lie })
}

/// Reduce one order given its LVE, the first-order gauge and the gauge of the previous order.
pub fn reduce_order(
    lve: &BlockSystem,
    p1: &Gauge,
    lower: &Gauge,
    opts: &DriverOptions,
) -> Result<(OrderReport, Option<Witness>), ReducerError> {
    let p = lve.order;
    let (pre, q) = prereduce(lve, p1, lower).map_err(stage(p))?;
    let mut st = ReductionState::new(pre).map_err(stage(p))?;
    let mut witness = None;
    match opts.mode {
        Mode::Full => full_reduce(&mut st, &opts.solve).map_err(stage(p))?,
        Mode::Simplified => witness = simplified_check(&mut st, &opts.solve).map_err(stage(p))?,
    }
    let lie = lie_algebra_of(&st.current.matrix);
    if witness.is_none() {
        if let Some((i, j)) = lie.bracket_witness() {
            witness = unremovable_coordinate(&st, &opts.solve).map_err(stage(p))?;
            witness = witness.or(Some(Witness::Bracket { left: lie.closed_basis[i].clone(), right: lie.closed_basis[j].clone() }));
        }
    }
    let env = envelope_dim(&lie).map_err(stage(p))?;
    let total = if opts.mode == Mode::Simplified && opts.iterate_unreduced { q.clone() } else { st.gauge.compose(&q) };
    Ok((OrderReport { order: p, lve: lve.clone(), prereduce_gauge: q, state: st, lie, envelope_dim: env, total_gauge: total }, witness))
}

/// Orders 1..=p_max: build, prereduce, reduce, and test abelianity. Stops at the first obstruction.
pub fn mrs_driver(
    sys: &HamiltonianSystem,
    phi: &[FieldElement],
    ve1_gauge: &MatrixK,
    expected_ve1: Option<&MatrixK>,
    p_max: u32,
    opts: &DriverOptions,
) -> Result<DriverOutput, ReducerError> {
    let first = check_first_order(sys, phi, ve1_gauge, expected_ve1)?;
    let mut orders: Vec<OrderReport> = Vec::new();
    let mut lve = build_lve(sys, phi, 1, None).map_err(stage(1))?;
    let mut lower = first.gauge.clone();
    for p in 2..=p_max.max(1) {
        if opts.solve.cancel.is_cancelled() {
            return Err(ReducerError::at(p)(OdeError::Cancelled.into()));
        }
        lve = build_lve(sys, phi, p, Some(&lve)).map_err(stage(p))?;
        let (report, witness) = reduce_order(&lve, &first.gauge, &lower, opts)?;
        lower = report.total_gauge.clone();
        orders.push(report);
        if let Some(w) = witness {
            return Ok(DriverOutput { verdict: Verdict::Obstruction { order: p, witness: w }, first, orders });
        }
    }
    Ok(DriverOutput { verdict: Verdict::AbelianUpTo { order: p_max.max(1) }, first, orders })
}
