//! Hamiltonian vector fields, particular solutions, linearized variational equations and gauge maps.

mod mrat;
mod series;
mod sym;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fields::{parse_expr, Const, Field, FieldElement, FieldError, Tower};
use crate::matrix::{Matrix, MatrixError, MatrixK, OffDiagonalSlot};

pub use mrat::{MPoly, MRat};
pub use sym::{lve_basis, lve_dim, monomials, sym_dim, sym_power, sym_power_gauge, weight};

use series::Series;
use sym::{index_map, weight_ratio};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VariationalError {
    #[error("malformed Hamiltonian: {0}")]
    MalformedHamiltonian(String),
    #[error("the curve meets a pole of {0}")]
    PoleOnCurve(String),
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// H(q, p) with its vector field (q̇ then ṗ). Variables are indexed q_1..q_n, p_1..p_n.
#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    n: usize,
    h: MRat,
    field: Vec<MRat>,
}

impl HamiltonianSystem {
    pub fn from_mrat(n: usize, h: MRat) -> Self {
        let h = h.widened(2 * n);
        let mut field = Vec::with_capacity(2 * n);
        for i in 0..n {
            field.push(h.derivative(n + i));
        }
        for i in 0..n {
            field.push(h.derivative(i).negate());
        }
        HamiltonianSystem { n, h, field }
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &MRat {
        &self.h
    }

    pub fn vector_field(&self) -> &[MRat] {
        &self.field
    }

    pub fn variable_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.n).map(|i| format!("q{i}")).collect();
        v.extend((1..=self.n).map(|i| format!("p{i}")));
        v
    }
}

/// Parse H over the tower in the symbols q1..qn, p1..pn and build X_H.
pub fn build_vector_field(tower: &Tower, n: usize, expr: &str) -> Result<HamiltonianSystem, VariationalError> {
    if n == 0 {
        return Err(VariationalError::MalformedHamiltonian("n must be positive".into()));
    }
    let e = parse_expr(expr).map_err(|err| VariationalError::MalformedHamiltonian(err.to_string()))?;
    let nv = 2 * n;
    let lookup = |name: &str| -> Option<MRat> {
        let idx = |rest: &str| rest.parse::<usize>().ok().filter(|k| (1..=n).contains(k));
        if let Some(k) = name.strip_prefix('q').and_then(idx) {
            return Some(MRat::var(nv, k - 1));
        }
        if let Some(k) = name.strip_prefix('p').and_then(idx) {
            return Some(MRat::var(nv, n + k - 1));
        }
        tower.generator(name).map(|c| MRat::constant(nv, c))
    };
    let h = e.eval(&lookup).map_err(|err| VariationalError::MalformedHamiltonian(err.to_string()))?;
    Ok(HamiltonianSystem::from_mrat(n, h))
}

fn lift(c: &Const) -> FieldElement {
    FieldElement::constant(c.clone())
}

/// Result of checking φ' = X_H(φ).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveCheck {
    pub ok: bool,
    /// First failing component (0-based) and its residual φ'_i − X_i(φ).
    pub witness: Option<(usize, FieldElement)>,
}

pub fn verify_curve(sys: &HamiltonianSystem, phi: &[FieldElement]) -> Result<CurveCheck, VariationalError> {
    check_len(sys, phi)?;
    for (i, xi) in sys.field.iter().enumerate() {
        let v = xi.eval(phi, lift).map_err(|_| VariationalError::PoleOnCurve(format!("component {}", i + 1)))?;
        let r = phi[i].derive().minus(&v);
        if !r.is_zero() {
            return Ok(CurveCheck { ok: false, witness: Some((i, r)) });
        }
    }
    Ok(CurveCheck { ok: true, witness: None })
}

fn check_len(sys: &HamiltonianSystem, phi: &[FieldElement]) -> Result<(), VariationalError> {
    if phi.len() != 2 * sys.n {
        return Err(VariationalError::Dimension(format!("curve has {} components, expected {}", phi.len(), 2 * sys.n)));
    }
    Ok(())
}

/// Jacobian of X_H along φ.
pub fn first_variational(sys: &HamiltonianSystem, phi: &[FieldElement]) -> Result<MatrixK, VariationalError> {
    check_len(sys, phi)?;
    let nv = 2 * sys.n;
    let mut m = Matrix::zeros(nv, nv);
    for (i, xi) in sys.field.iter().enumerate() {
        for j in 0..nv {
            let d = xi.derivative(j);
            let v = d.eval(phi, lift).map_err(|_| VariationalError::PoleOnCurve(format!("d X_{} / d z_{}", i + 1, j + 1)))?;
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// The linearized variational equation of order p, block lower-triangular:
/// diagonal blocks sym^p(A₁), …, A₁ from top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    pub order: u32,
    /// Phase-space dimension 2n.
    pub nvars: usize,
    pub matrix: MatrixK,
}

impl BlockSystem {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Sizes of the diagonal blocks, top to bottom.
    pub fn block_sizes(&self) -> Vec<usize> {
        (1..=self.order).rev().map(|d| sym_dim(self.nvars, d)).collect()
    }

    /// Slot of S_p: rows below the top block, columns of the top block.
    pub fn slot(&self) -> OffDiagonalSlot {
        OffDiagonalSlot { top: sym_dim(self.nvars, self.order), size: self.dim() }
    }

    pub fn basis(&self) -> Vec<Vec<u32>> {
        lve_basis(self.nvars, self.order)
    }

    /// Top-left sym^p block.
    pub fn top_block(&self) -> MatrixK {
        let t = self.slot().top;
        self.matrix.block(0, t, 0, t)
    }

    /// Bottom-right block, i.e. the order p−1 system.
    pub fn lower_block(&self) -> MatrixK {
        let t = self.slot().top;
        self.matrix.block(t, self.dim(), t, self.dim())
    }

    /// The S_p block (rows below the top block, top-block columns).
    pub fn off_diagonal(&self) -> MatrixK {
        let t = self.slot().top;
        self.matrix.block(t, self.dim(), 0, t)
    }

    /// Nonzero entries above the block diagonal, if any.
    pub fn upper_violation(&self) -> Option<(usize, usize)> {
        let sizes = self.block_sizes();
        let mut start = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for s in &sizes {
            start.push(acc);
            acc += s;
        }
        let block_of = |k: usize| start.iter().rposition(|&s| s <= k).unwrap_or(0);
        self.matrix.support().into_iter().find(|&(i, j)| block_of(j) > block_of(i))
    }
}

/// Taylor coefficients of X_H at φ: for each component, γ ↦ coefficient of δ^γ, 1 ≤ |γ| ≤ order.
pub fn taylor_field(
    sys: &HamiltonianSystem,
    phi: &[FieldElement],
    order: u32,
) -> Result<Vec<BTreeMap<Vec<u32>, FieldElement>>, VariationalError> {
    check_len(sys, phi)?;
    let n = sys.n;
    let hs = Series::of_mrat(&sys.h, phi, order + 1).map_err(|_| VariationalError::PoleOnCurve("H".into()))?;
    let mut out = vec![BTreeMap::new(); 2 * n];
    for (e, c) in hs.terms() {
        for v in 0..2 * n {
            if e[v] == 0 {
                continue;
            }
            // ∂H/∂z_v contributes to X_{q_i} (v = p_i) or −X_{p_i} (v = q_i)
            let mut g = e.clone();
            g[v] -= 1;
            let deg: u32 = g.iter().sum();
            if deg == 0 || deg > order {
                continue;
            }
            let val = c.scale_int(e[v] as i64);
            let (comp, val) = if v >= n { (v - n, val) } else { (v + n, val.negate()) };
            out[comp].insert(g, val);
        }
    }
    Ok(out)
}

/// Build LVE_p along φ. If `lower` holds LVE_{p−1} it is reused for the bottom-right block.
pub fn build_lve(
    sys: &HamiltonianSystem,
    phi: &[FieldElement],
    p: u32,
    lower: Option<&BlockSystem>,
) -> Result<BlockSystem, VariationalError> {
    if p == 0 {
        return Err(VariationalError::Dimension("order must be at least 1".into()));
    }
    let nv = 2 * sys.n;
    if let Some(l) = lower {
        if l.order + 1 != p || l.nvars != nv {
            return Err(VariationalError::Dimension(format!("lower system has order {}, expected {}", l.order, p - 1)));
        }
    }
    let t = taylor_field(sys, phi, p)?;
    let basis = lve_basis(nv, p);
    let idx = index_map(&basis);
    let top = sym_dim(nv, p);
    let mut m: MatrixK = Matrix::zeros(basis.len(), basis.len());
    for (r, beta) in basis.iter().enumerate() {
        let bdeg: u32 = beta.iter().sum();
        for i in 0..nv {
            if beta[i] == 0 {
                continue;
            }
            for (gamma, c) in &t[i] {
                let gdeg: u32 = gamma.iter().sum();
                if bdeg + gdeg - 1 > p {
                    continue;
                }
                let mut alpha = beta.clone();
                alpha[i] -= 1;
                for (a, g) in alpha.iter_mut().zip(gamma) {
                    *a += g;
                }
                let col = idx[&alpha];
                if lower.is_some() && r >= top && col >= top {
                    continue;
                }
                let v = c.scale_int(beta[i] as i64).times(&weight_ratio(beta, &alpha));
                let cur = m.get(r, col).plus(&v);
                m.set(r, col, cur);
            }
        }
    }
    if let Some(l) = lower {
        m.set_block(top, top, &l.matrix);
    }
    Ok(BlockSystem { order: p, nvars: nv, matrix: m })
}

/// An invertible matrix over k together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Gauge {
    p: MatrixK,
    inv: MatrixK,
}

impl Gauge {
    pub fn new(p: MatrixK) -> Result<Self, VariationalError> {
        let inv = p.inverse().map_err(|e| match e {
            MatrixError::Singular => VariationalError::SingularGauge,
            other => other.into(),
        })?;
        Ok(Gauge { p, inv })
    }

    /// Caller guarantees p · inv = Id.
    pub fn from_parts(p: MatrixK, inv: MatrixK) -> Self {
        debug_assert!(p.mul(&inv).is_identity());
        Gauge { p, inv }
    }

    pub fn identity(n: usize) -> Self {
        Gauge { p: Matrix::identity(n), inv: Matrix::identity(n) }
    }

    pub fn matrix(&self) -> &MatrixK {
        &self.p
    }

    pub fn inverse_matrix(&self) -> &MatrixK {
        &self.inv
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    pub fn inverse(&self) -> Gauge {
        Gauge { p: self.inv.clone(), inv: self.p.clone() }
    }

    /// self ∘ inner, so that (self.compose(inner))[A] = self[inner[A]].
    pub fn compose(&self, inner: &Gauge) -> Gauge {
        Gauge { p: self.p.mul(&inner.p), inv: inner.inv.mul(&self.inv) }
    }

    /// P[A] = P A P⁻¹ + P' P⁻¹.
    pub fn apply(&self, a: &MatrixK) -> Result<MatrixK, VariationalError> {
        if a.rows() != self.dim() || a.cols() != self.dim() {
            return Err(VariationalError::Dimension(format!("gauge is {0}x{0}, system is {1}x{2}", self.dim(), a.rows(), a.cols())));
        }
        Ok(self.p.mul(a).add(&self.p.derive()).mul(&self.inv))
    }

    /// Block-diagonal gauge diag(blocks...).
    pub fn block_diag(blocks: &[&Gauge]) -> Gauge {
        let ps: Vec<&MatrixK> = blocks.iter().map(|g| &g.p).collect();
        let is: Vec<&MatrixK> = blocks.iter().map(|g| &g.inv).collect();
        Gauge { p: Matrix::block_diag(&ps), inv: Matrix::block_diag(&is) }
    }

    /// The induced gauge on degree-p forms.
    pub fn sym_power(&self, p: u32) -> Gauge {
        Gauge { p: sym::sym_power_map(&self.p, p), inv: sym::sym_power_map(&self.inv, p) }
    }
}

/// P[A] for an invertible P.
pub fn gauge_apply(p: &MatrixK, a: &MatrixK) -> Result<MatrixK, VariationalError> {
    Gauge::new(p.clone())?.apply(a)
}
