//! Wei-Norman decompositions, bracket closures, the diagonal/off-diagonal split and the adjoint action.

mod envelope;

use thiserror::Error;

use crate::fields::{Const, Field, FieldElement, FieldError, Poly};
use crate::matrix::{joint_characteristic_spaces, JointSpace, Matrix, MatrixC, MatrixError, MatrixK, OffDiagonalSlot, Span};
use crate::variational::BlockSystem;

pub use envelope::{envelope_dim, jordan_parts};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("the diagonal part is not abelian: generators {0} and {1} do not commute")]
    DiagonalNotAbelian(usize, usize),
    #[error("nonzero entry ({row}, {col}) above the block diagonal")]
    UpperBlockNonzero { row: usize, col: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A = Σ a_i M_i with C-independent a_i and constant M_i.
#[derive(Debug, Clone, PartialEq)]
pub struct WeiNorman {
    pub coeffs: Vec<FieldElement>,
    pub matrices: Vec<MatrixC>,
}

impl WeiNorman {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn reconstruct(&self, rows: usize, cols: usize) -> MatrixK {
        let mut out = Matrix::zeros(rows, cols);
        for (a, m) in self.coeffs.iter().zip(&self.matrices) {
            out = out.add(&MatrixK::from_const(m).scale(a));
        }
        out
    }
}

/// Numerator coefficient vectors of `fs` over a common denominator.
fn coefficient_vectors(fs: &[&FieldElement]) -> Vec<Vec<Const>> {
    let mut den = Poly::<Const>::one();
    for f in fs {
        let g = den.gcd(f.den()).expect("gcd");
        den = den.mul(&f.den().div_exact(&g).expect("exact"));
    }
    let nums: Vec<Poly<Const>> = fs.iter().map(|f| f.num().mul(&den.div_exact(f.den()).expect("exact"))).collect();
    let len = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    nums.iter().map(|p| (0..len).map(|k| p.coeff(k)).collect()).collect()
}

/// Wei-Norman decomposition. The coefficients are the first independent entries in row-major order.
pub fn wei_norman(a: &MatrixK) -> WeiNorman {
    let mut pos = Vec::new();
    let mut vals = Vec::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.get(i, j);
            if !v.is_zero() {
                pos.push((i, j));
                vals.push(v);
            }
        }
    }
    if vals.is_empty() {
        return WeiNorman { coeffs: Vec::new(), matrices: Vec::new() };
    }
    let vecs = coefficient_vectors(&vals);
    let mut span = Span::new(vecs[0].len());
    let mut coeffs = Vec::new();
    for (v, f) in vecs.iter().zip(&vals) {
        if span.insert(v) {
            coeffs.push((*f).clone());
        }
    }
    let mut matrices = vec![Matrix::zeros(a.rows(), a.cols()); coeffs.len()];
    for (v, &(i, j)) in vecs.iter().zip(&pos) {
        let c = span.coordinates(v).expect("in span");
        for (k, ck) in c.into_iter().enumerate() {
            if !ck.is_zero() {
                matrices[k].set(i, j, ck);
            }
        }
    }
    WeiNorman { coeffs, matrices }
}

/// Flattens matrices to vectors over a fixed list of positions.
#[derive(Debug, Clone)]
struct Positions(Vec<(usize, usize)>);

impl Positions {
    fn all(rows: usize, cols: usize) -> Self {
        Positions((0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect())
    }

    fn slot(slot: OffDiagonalSlot) -> Self {
        Positions((slot.top..slot.size).flat_map(|i| (0..slot.top).map(move |j| (i, j))).collect())
    }

    fn flatten<T: Field>(&self, m: &Matrix<T>) -> Vec<T> {
        self.0.iter().map(|&(i, j)| m.get(i, j).clone()).collect()
    }
}

/// A constant matrix Lie algebra given by a basis.
#[derive(Debug, Clone)]
pub struct LieBasis {
    pub generators: Vec<MatrixC>,
    pub closed_basis: Vec<MatrixC>,
    pub abelian: bool,
    rows: usize,
    positions: Positions,
    span: Span<Const>,
}

impl PartialEq for LieBasis {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.closed_basis == other.closed_basis && self.abelian == other.abelian
    }
}

impl LieBasis {
    fn empty(rows: usize, positions: Positions) -> Self {
        let n = positions.0.len();
        LieBasis { generators: Vec::new(), closed_basis: Vec::new(), abelian: true, rows, positions, span: Span::new(n) }
    }

    pub fn dim(&self) -> usize {
        self.closed_basis.len()
    }

    fn push(&mut self, m: &MatrixC) -> bool {
        let v = self.positions.flatten(m);
        if self.span.insert(&v) {
            self.closed_basis.push(m.clone());
            true
        } else {
            false
        }
    }

    /// Coordinates of a constant matrix in `closed_basis`.
    pub fn coordinates(&self, m: &MatrixC) -> Option<Vec<Const>> {
        if m.rows() != self.rows {
            return None;
        }
        // entries outside the tracked positions must vanish
        let tracked: std::collections::BTreeSet<(usize, usize)> = self.positions.0.iter().copied().collect();
        if m.support().iter().any(|p| !tracked.contains(p)) {
            return None;
        }
        self.span.coordinates(&self.positions.flatten(m))
    }

    pub fn contains(&self, m: &MatrixC) -> bool {
        self.coordinates(m).is_some()
    }

    /// Coordinates over k of a matrix in the k-span of the basis.
    pub fn coordinates_k(&self, a: &MatrixK) -> Option<Vec<FieldElement>> {
        let wn = wei_norman(a);
        let mut out = vec![FieldElement::zero(); self.dim()];
        for (f, m) in wn.coeffs.iter().zip(&wn.matrices) {
            let c = self.coordinates(m)?;
            for (o, ck) in out.iter_mut().zip(c) {
                if !ck.is_zero() {
                    *o = o.plus(&f.times(&FieldElement::constant(ck)));
                }
            }
        }
        Some(out)
    }

    /// Σ c_i B_i.
    pub fn combine(&self, c: &[Const]) -> MatrixC {
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for (ck, b) in c.iter().zip(&self.closed_basis) {
            if !ck.is_zero() {
                out = out.add(&b.scale(ck));
            }
        }
        out
    }

    /// First basis pair with a nonzero bracket.
    pub fn bracket_witness(&self) -> Option<(usize, usize)> {
        for i in 0..self.closed_basis.len() {
            for j in i + 1..self.closed_basis.len() {
                if !self.closed_basis[i].bracket(&self.closed_basis[j]).is_zero() {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Bracket closure of the span of `gens`.
pub fn lie_closure(gens: &[MatrixC]) -> LieBasis {
    closure_in(gens.first().map_or(0, |g| g.rows()), gens)
}

fn closure_in(n: usize, gens: &[MatrixC]) -> LieBasis {
    let mut lb = LieBasis::empty(n, Positions::all(n, n));
    lb.generators = gens.to_vec();
    for g in gens {
        lb.push(g);
    }
    let mut done = 0;
    while done < lb.closed_basis.len() {
        let x = lb.closed_basis[done].clone();
        for k in 0..done {
            let y = lb.closed_basis[k].clone();
            let b = x.bracket(&y);
            if !b.is_zero() {
                lb.push(&b);
            }
        }
        done += 1;
    }
    lb.abelian = lb.bracket_witness().is_none();
    lb
}

/// Lie algebra generated by the Wei-Norman matrices of A.
pub fn lie_algebra_of(a: &MatrixK) -> LieBasis {
    closure_in(a.rows(), &wei_norman(a).matrices)
}

/// (A_diag, A_sub): the two diagonal blocks, and the lower-left slot.
pub fn split_diag_sub(a: &BlockSystem) -> Result<(MatrixK, MatrixK), LieError> {
    if let Some((row, col)) = a.upper_violation() {
        return Err(LieError::UpperBlockNonzero { row, col });
    }
    let slot = a.slot();
    let mut diag = a.matrix.clone();
    let mut sub = Matrix::zeros(a.dim(), a.dim());
    for i in slot.top..slot.size {
        for j in 0..slot.top {
            let v = a.matrix.get(i, j).clone();
            if !v.is_zero() {
                sub.set(i, j, v);
                diag.set(i, j, FieldElement::zero());
            }
        }
    }
    Ok((diag, sub))
}

/// The smallest subspace of slot matrices containing the Wei-Norman matrices of A_sub and stable
/// under B ↦ [B, M] for the diagonal generators M. All products vanish, so it is abelian.
pub fn off_diagonal_algebra(a_sub: &MatrixK, slot: OffDiagonalSlot, diag_generators: &[MatrixC]) -> Result<LieBasis, LieError> {
    slot.check(a_sub)?;
    let wn = wei_norman(a_sub);
    let mut lb = LieBasis::empty(slot.size, Positions::slot(slot));
    lb.generators = wn.matrices.clone();
    for g in &wn.matrices {
        lb.push(g);
    }
    let mut done = 0;
    while done < lb.closed_basis.len() {
        let b = lb.closed_basis[done].clone();
        for m in diag_generators {
            let c = b.bracket(m);
            slot.check(&c)?;
            if !c.is_zero() {
                lb.push(&c);
            }
        }
        done += 1;
    }
    Ok(lb)
}

/// Ψ = [A_diag, ·] on the off-diagonal algebra, written Σ g_i Ψ_i, with its joint flags.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointDecomposition {
    /// Wei-Norman coefficients g_i of A_diag.
    pub weights: Vec<FieldElement>,
    /// Wei-Norman matrices of A_diag.
    pub diag_generators: Vec<MatrixC>,
    /// Ψ_i in the basis of the off-diagonal algebra (columns are images).
    pub maps: Vec<MatrixC>,
    pub spaces: Vec<JointSpace>,
}

impl AdjointDecomposition {
    pub fn eigenvalues(&self) -> Vec<FieldElement> {
        self.spaces.iter().map(|s| s.lambda.clone()).collect()
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.spaces.iter().all(|s| s.depth() <= 1)
    }

    /// Ψ as a matrix over k.
    pub fn psi(&self) -> MatrixK {
        let d = self.maps.first().map_or(0, |m| m.rows());
        let mut out = Matrix::zeros(d, d);
        for (g, m) in self.weights.iter().zip(&self.maps) {
            out = out.add(&MatrixK::from_const(m).scale(g));
        }
        out
    }

    /// Π (X − λ)^depth over the joint spaces, merging equal eigenvalues.
    pub fn minimal_polynomial(&self) -> Poly<FieldElement> {
        let mut merged: Vec<(FieldElement, usize)> = Vec::new();
        for s in &self.spaces {
            match merged.iter_mut().find(|(l, _)| *l == s.lambda) {
                Some(e) => e.1 = e.1.max(s.depth()),
                None => merged.push((s.lambda.clone(), s.depth())),
            }
        }
        let mut p = Poly::one();
        for (l, k) in merged {
            let lin = Poly::new(vec![l.negate(), FieldElement::one()]);
            p = p.mul(&lin.pow(k as u32));
        }
        p
    }
}

/// Differences of diagonal entries: candidate eigenvalues of ad(M).
fn difference_hints(ms: &[MatrixC]) -> Vec<Const> {
    let mut out: Vec<Const> = Vec::new();
    for m in ms {
        for i in 0..m.rows() {
            for j in 0..m.rows() {
                let v = m.get(i, i).minus(m.get(j, j));
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// The adjoint action of A_diag on `sub`.
pub fn adjoint_action(a_diag: &MatrixK, sub: &LieBasis) -> Result<AdjointDecomposition, LieError> {
    let wn = wei_norman(a_diag);
    for i in 0..wn.len() {
        for j in i + 1..wn.len() {
            if !wn.matrices[i].bracket(&wn.matrices[j]).is_zero() {
                return Err(LieError::DiagonalNotAbelian(i, j));
            }
        }
    }
    let d = sub.dim();
    let mut maps = Vec::with_capacity(wn.len());
    for m in &wn.matrices {
        let mut psi = Matrix::zeros(d, d);
        for (k, b) in sub.closed_basis.iter().enumerate() {
            let img = m.bracket(b);
            let c = sub.coordinates(&img).ok_or(MatrixError::DimensionMismatch("Ψ leaves the off-diagonal algebra".into()))?;
            for (r, v) in c.into_iter().enumerate() {
                psi.set(r, k, v);
            }
        }
        maps.push(psi);
    }
    let (use_maps, use_weights) = if maps.is_empty() {
        (vec![Matrix::zeros(d, d)], vec![FieldElement::zero()])
    } else {
        (maps.clone(), wn.coeffs.clone())
    };
    let hints = difference_hints(&wn.matrices);
    let spaces = joint_characteristic_spaces(&use_maps, &use_weights, &hints)?;
    Ok(AdjointDecomposition { weights: wn.coeffs, diag_generators: wn.matrices, maps, spaces })
}
