use std::ops::Range;

use crate::fields::{Const, Field, FieldElement};
use crate::lie::{adjoint_action, off_diagonal_algebra, split_diag_sub, AdjointDecomposition, LieBasis};
use crate::matrix::{Matrix, MatrixC, MatrixK};
use crate::ode::{first_order_rational_solution, linear_relations, parametrized_first_order, rational_primitive, SolveOptions};
use crate::variational::{BlockSystem, Gauge};

use super::{StageError, Witness};

/// One partial reduction: eigenvalue, flag level, coordinates seen and removed.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStep {
    /// 0 for the decomposition of the prereduced system, k for the k-th restart of `full_reduce`.
    pub round: usize,
    /// Index into the decomposition of that round.
    pub space: usize,
    pub lambda: FieldElement,
    pub level: usize,
    /// Number of coordinates at this level (t).
    pub coordinates: usize,
    /// Number of independent coordinates removed (s).
    pub removed: usize,
    /// Dimension of the parametrized solution space returned by the solver.
    pub solver_dim: usize,
    /// F with P = Id + F.
    pub factor: MatrixK,
    /// Whether the closed-form update agreed with the direct gauge action.
    pub closed_form_matches: bool,
}

/// A prereduced system of one order, with the off-diagonal algebra, Ψ and the gauge applied so far.
#[derive(Debug, Clone)]
pub struct ReductionState {
    pub order: u32,
    pub prereduced: BlockSystem,
    pub current: BlockSystem,
    /// P with P[prereduced] = current.
    pub gauge: Gauge,
    pub a_diag: MatrixK,
    pub sub: LieBasis,
    pub adjoint: AdjointDecomposition,
    pub log: Vec<LevelStep>,
    /// Inverse of the adapted basis (columns: level complements of every space, in order).
    adapted_inv: MatrixC,
    ranges: Vec<Vec<Range<usize>>>,
    complements: Vec<Vec<Vec<MatrixC>>>,
}

impl ReductionState {
    pub fn new(prereduced: BlockSystem) -> Result<Self, StageError> {
        let (a_diag, a_sub) = split_diag_sub(&prereduced)?;
        let diag_wn = crate::lie::wei_norman(&a_diag);
        let sub = off_diagonal_algebra(&a_sub, prereduced.slot(), &diag_wn.matrices)?;
        let adjoint = adjoint_action(&a_diag, &sub)?;
        let d = sub.dim();
        let mut cols: Vec<Vec<Const>> = Vec::with_capacity(d);
        let mut ranges = Vec::new();
        let mut complements = Vec::new();
        for s in &adjoint.spaces {
            let mut rs = Vec::new();
            let mut cs = Vec::new();
            for l in 1..=s.depth() {
                let comp = s.level_complement(l);
                let start = cols.len();
                cs.push(comp.iter().map(|v| sub.combine(v)).collect());
                cols.extend(comp);
                rs.push(start..cols.len());
            }
            ranges.push(rs);
            complements.push(cs);
        }
        assert_eq!(cols.len(), d, "flags span the off-diagonal algebra");
        let w = Matrix::from_fn(d, d, |i, j| cols[j][i].clone());
        let adapted_inv = if d == 0 { w } else { w.inverse()? };
        let n = prereduced.dim();
        Ok(ReductionState {
            order: prereduced.order,
            current: prereduced.clone(),
            prereduced,
            gauge: Gauge::identity(n),
            a_diag,
            sub,
            adjoint,
            log: Vec::new(),
            adapted_inv,
            ranges,
            complements,
        })
    }

    pub fn spaces(&self) -> usize {
        self.adjoint.spaces.len()
    }

    pub fn depth(&self, space: usize) -> usize {
        self.adjoint.spaces[space].depth()
    }

    pub fn lambda(&self, space: usize) -> &FieldElement {
        &self.adjoint.spaces[space].lambda
    }

    /// Constant matrices B_1..B_t spanning E^(level) modulo E^(level−1).
    pub fn level_basis(&self, space: usize, level: usize) -> &[MatrixC] {
        &self.complements[space][level - 1]
    }

    fn a_sub(&self) -> MatrixK {
        split_diag_sub(&self.current).expect("layout is preserved").1
    }

    /// Coordinates b_1..b_t of the current off-diagonal part along `level_basis(space, level)`.
    pub fn level_coordinates(&self, space: usize, level: usize) -> Vec<FieldElement> {
        let coords = self.sub.coordinates_k(&self.a_sub()).expect("off-diagonal part stays in the algebra");
        let range = self.ranges[space][level - 1].clone();
        range
            .map(|r| {
                let mut acc = FieldElement::zero();
                for (k, c) in coords.iter().enumerate() {
                    let w = self.adapted_inv.get(r, k);
                    if !w.is_zero() && !c.is_zero() {
                        acc = acc.plus(&c.times(&FieldElement::constant(w.clone())));
                    }
                }
                acc
            })
            .collect()
    }

    /// Number of independent coordinate combinations at this level that a gauge Id + Σ f_i B_i
    /// would remove (zero once the level is reduced).
    pub fn removable_dimension(&self, space: usize, level: usize, opts: &SolveOptions) -> Result<usize, StageError> {
        let b = self.level_coordinates(space, level);
        let (indep, _) = linear_relations(&b);
        if indep.is_empty() {
            return Ok(0);
        }
        let bi: Vec<FieldElement> = indep.iter().map(|&i| b[i].clone()).collect();
        let sol = parametrized_first_order(self.lambda(space), &bi, opts)?;
        Ok(sol.inhomogeneous_rank())
    }

    /// Apply P = Id + F with F = Σ f_i B_i through the closed form
    /// P[A] = A + Σ f_i [B_i, A_diag] + Σ f_i' B_i, and compare with the direct action.
    fn apply_factor(&mut self, basis: &[MatrixC], f: &[FieldElement]) -> (MatrixK, bool) {
        let n = self.current.dim();
        let mut factor = Matrix::zeros(n, n);
        let mut update = Matrix::zeros(n, n);
        for (b, fi) in basis.iter().zip(f) {
            if fi.is_zero() {
                continue;
            }
            let bk = MatrixK::from_const(b);
            factor = factor.add(&bk.scale(fi));
            let br = bk.bracket(&self.a_diag);
            update = update.add(&br.scale(fi)).add(&bk.scale(&fi.derive()));
        }
        if factor.is_zero() {
            return (factor, true);
        }
        let closed = self.current.matrix.add(&update);
        let p = Matrix::identity(n).add(&factor);
        let pinv = Matrix::identity(n).sub(&factor);
        let step = Gauge::from_parts(p, pinv);
        let direct = step.apply(&self.current.matrix).expect("square");
        let ok = direct == closed;
        self.current.matrix = closed;
        self.gauge = step.compose(&self.gauge);
        (factor, ok)
    }
}

/// Levels of the zero eigenvalue that may stay: they can commute with A_diag (a level-2 element
/// proportional to the nilpotent part of A_diag does).
const ZERO_LEVELS_KEPT: usize = 2;

/// For λ = 0 the solutions are defined up to a constant: take the one whose polynomial part has
/// no constant term.
fn normalize(lambda: &FieldElement, g: &FieldElement) -> FieldElement {
    if !lambda.is_zero() {
        return g.clone();
    }
    let (p, _) = g.split_polynomial_part();
    match p.coeffs().first() {
        Some(c0) if !c0.is_zero() => g.minus(&FieldElement::constant(c0.clone())),
        _ => g.clone(),
    }
}

/// Remove every removable combination of coordinates at (space, level).
pub fn partial_reduce_level(
    state: &mut ReductionState,
    space: usize,
    level: usize,
    opts: &SolveOptions,
) -> Result<LevelStep, StageError> {
    let lambda = state.lambda(space).clone();
    let b = state.level_coordinates(space, level);
    let t = b.len();
    let (indep, relations) = linear_relations(&b);
    let mut step = LevelStep {
        round: 0,
        space,
        lambda: lambda.clone(),
        level,
        coordinates: t,
        removed: 0,
        solver_dim: 0,
        factor: Matrix::zeros(state.current.dim(), state.current.dim()),
        closed_form_matches: true,
    };
    if indep.is_empty() {
        state.log.push(step.clone());
        return Ok(step);
    }
    let bi: Vec<FieldElement> = indep.iter().map(|&i| b[i].clone()).collect();
    // f' = λ f − b removes b; the solver gives g' = λ g + Σ c_i b_i and f = −g
    let sol = parametrized_first_order(&lambda, &bi, opts)?;
    step.solver_dim = sol.dim();
    // independent c-vectors (lifted to all t coordinates) with their g
    let mut chosen: Vec<(Vec<Const>, FieldElement)> = Vec::new();
    let mut span = crate::matrix::Span::new(t);
    for tup in &sol.tuples {
        let mut c = vec![Const::zero(); t];
        for (k, &i) in indep.iter().enumerate() {
            c[i] = tup.c[k].clone();
        }
        if span.insert(&c) {
            chosen.push((c, normalize(&lambda, &tup.g)));
        }
    }
    let s = chosen.len();
    step.removed = s;
    if s == 0 {
        state.log.push(step.clone());
        return Ok(step);
    }
    // relations among the coordinates are removed by g = 0; without them a coordinate that
    // is a constant multiple of a removed one would stay behind
    let mut rows: Vec<Vec<Const>> = chosen.iter().map(|(c, _)| c.clone()).collect();
    for r in relations {
        if span.insert(&r) {
            rows.push(r);
        }
    }
    // complete to a basis greedily with standard vectors
    for k in 0..t {
        let mut e = vec![Const::zero(); t];
        e[k] = Const::one();
        if span.insert(&e) {
            rows.push(e);
        }
    }
    let q = Matrix::from_rows(rows);
    let qinv = q.inverse()?;
    let f: Vec<FieldElement> = (0..t)
        .map(|i| {
            let mut acc = FieldElement::zero();
            for (j, (_, g)) in chosen.iter().enumerate() {
                let w = qinv.get(i, j);
                if !w.is_zero() {
                    acc = acc.minus(&g.times(&FieldElement::constant(w.clone())));
                }
            }
            acc
        })
        .collect();
    let basis = state.level_basis(space, level).to_vec();
    let (factor, ok) = state.apply_factor(&basis, &f);
    step.factor = factor;
    step.closed_form_matches = ok;
    state.log.push(step.clone());
    Ok(step)
}

const MAX_ROUNDS: usize = 8;

fn reduce_pass(state: &mut ReductionState, opts: &SolveOptions) -> Result<usize, StageError> {
    let mut removed = 0;
    for space in 0..state.spaces() {
        for level in (1..=state.depth(space)).rev() {
            opts.cancel.check()?;
            removed += partial_reduce_level(state, space, level, opts)?.removed;
        }
    }
    Ok(removed)
}

/// Run every partial reduction: spaces in canonical order, levels from the top down.
///
/// When Ψ is not semisimple the level coordinates depend on the complements chosen in the
/// flag, and a residue left at one level can hide a removable combination below it. The
/// decomposition of the reduced system (a smaller algebra, other complements) may then still
/// find something, so the pass is repeated on a fresh decomposition until that finds nothing.
pub fn full_reduce(state: &mut ReductionState, opts: &SolveOptions) -> Result<(), StageError> {
    reduce_pass(state, opts)?;
    for round in 1..=MAX_ROUNDS {
        let mut fresh = ReductionState::new(state.current.clone())?;
        if reduce_pass(&mut fresh, opts)? == 0 {
            break;
        }
        state.current = fresh.current;
        state.gauge = fresh.gauge.compose(&state.gauge);
        state.log.extend(fresh.log.into_iter().map(|s| LevelStep { round, ..s }));
        reduce_pass(state, opts)?;
    }
    Ok(())
}

/// Per-coordinate check: every coordinate is removed on its own when y' = λ y + b (y' = b for
/// λ = 0) has a rational solution. A coordinate that cannot be removed is an obstruction at a
/// nonzero eigenvalue and at levels ≥ 3 of the zero eigenvalue; lower zero levels are left as is.
pub fn simplified_check(state: &mut ReductionState, opts: &SolveOptions) -> Result<Option<Witness>, StageError> {
    for space in 0..state.spaces() {
        let lambda = state.lambda(space).clone();
        for level in (1..=state.depth(space)).rev() {
            opts.cancel.check()?;
            let b = state.level_coordinates(space, level);
            let mut f = Vec::with_capacity(b.len());
            for (k, bk) in b.iter().enumerate() {
                let g = if bk.is_zero() {
                    Some(FieldElement::zero())
                } else if lambda.is_zero() {
                    rational_primitive(bk)?.map(|g| normalize(&lambda, &g))
                } else {
                    first_order_rational_solution(&lambda, bk, opts)?
                };
                match g {
                    Some(g) => f.push(g.negate()),
                    None if lambda.is_zero() && level <= ZERO_LEVELS_KEPT => f.push(FieldElement::zero()),
                    None => {
                        return Ok(Some(Witness::Unremovable {
                            lambda: lambda.clone(),
                            level,
                            coordinate: k,
                            basis_matrix: state.level_basis(space, level)[k].clone(),
                            coefficient: lambda.clone(),
                            b: bk.clone(),
                        }))
                    }
                }
            }
            let basis = state.level_basis(space, level).to_vec();
            let t = basis.len();
            let (factor, ok) = state.apply_factor(&basis, &f);
            let removed = f.iter().filter(|g| !g.is_zero()).count();
            state.log.push(LevelStep {
                round: 0,
                space,
                lambda: lambda.clone(),
                level,
                coordinates: t,
                removed,
                solver_dim: t,
                factor,
                closed_form_matches: ok,
            });
        }
    }
    Ok(None)
}

/// After a full reduction: the first coordinate left at a nonzero eigenvalue (or a level ≥ 3 of
/// the zero eigenvalue) that has no rational solution on its own.
pub fn unremovable_coordinate(state: &ReductionState, opts: &SolveOptions) -> Result<Option<Witness>, StageError> {
    for space in 0..state.spaces() {
        let lambda = state.lambda(space).clone();
        for level in (1..=state.depth(space)).rev() {
            if lambda.is_zero() && level <= ZERO_LEVELS_KEPT {
                continue;
            }
            for (k, bk) in state.level_coordinates(space, level).iter().enumerate() {
                if bk.is_zero() {
                    continue;
                }
                let g = if lambda.is_zero() { rational_primitive(bk)? } else { first_order_rational_solution(&lambda, bk, opts)? };
                if g.is_none() {
                    return Ok(Some(Witness::Unremovable {
                        lambda: lambda.clone(),
                        level,
                        coordinate: k,
                        basis_matrix: state.level_basis(space, level)[k].clone(),
                        coefficient: lambda.clone(),
                        b: bk.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}
