use crate::fields::{Const, Field};
use crate::matrix::{joint_characteristic_spaces, Matrix, MatrixC, MatrixError};

use super::{difference_hints, LieBasis};

/// Jordan decomposition M = S + N of each matrix in a commuting family, plus the joint
/// eigenvalue tuples (one per joint generalized eigenspace).
fn joint_jordan(ms: &[MatrixC]) -> Result<(Vec<(MatrixC, MatrixC)>, Vec<Vec<Const>>), MatrixError> {
    let n = ms[0].rows();
    let weights = vec![crate::fields::FieldElement::zero(); ms.len()];
    let spaces = joint_characteristic_spaces(ms, &weights, &difference_hints(ms))?;
    // columns of v: concatenated bases of the joint spaces
    let mut cols: Vec<Vec<Const>> = Vec::with_capacity(n);
    let mut owner = Vec::with_capacity(n);
    for (k, s) in spaces.iter().enumerate() {
        for v in s.levels.last().expect("nonempty space") {
            cols.push(v.clone());
            owner.push(k);
        }
    }
    let v = Matrix::from_fn(n, n, |i, j| cols[j][i].clone());
    let vinv = v.inverse()?;
    let mut parts = Vec::with_capacity(ms.len());
    for (idx, m) in ms.iter().enumerate() {
        let d: Vec<Const> = owner.iter().map(|&k| spaces[k].mu[idx].clone()).collect();
        let s = v.mul(&Matrix::diagonal(&d)).mul(&vinv);
        let nil = m.sub(&s);
        parts.push((s, nil));
    }
    Ok((parts, spaces.into_iter().map(|s| s.mu).collect()))
}

/// Semisimple and nilpotent parts of a constant matrix whose eigenvalues lie in the tower.
pub fn jordan_parts(m: &MatrixC) -> Result<(MatrixC, MatrixC), MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare(m.rows(), m.cols()));
    }
    if m.rows() == 0 {
        return Ok((m.clone(), m.clone()));
    }
    Ok(joint_jordan(std::slice::from_ref(m))?.0.remove(0))
}

/// Dimension of the algebraic envelope of an abelian algebra: the smallest torus algebra holding
/// the semisimple parts, plus the span of the nilpotent parts. None if the algebra is not abelian.
pub fn envelope_dim(lie: &LieBasis) -> Result<Option<usize>, MatrixError> {
    if !lie.abelian {
        return Ok(None);
    }
    if lie.closed_basis.is_empty() {
        return Ok(Some(0));
    }
    let (parts, tuples) = joint_jordan(&lie.closed_basis)?;
    // torus dimension: ℚ-rank of the eigenvalue table (rows: generator × rational component)
    let mut rows: Vec<Vec<num_rational::BigRational>> = Vec::new();
    for g in 0..lie.closed_basis.len() {
        let vals: Vec<Const> = tuples.iter().map(|t| t[g].clone()).collect();
        let comps = Const::rational_components(&vals);
        // comps[j] is the component vector of vals[j]; transpose to one row per component
        let width = comps.iter().map(|c| c.len()).max().unwrap_or(0);
        for k in 0..width {
            rows.push(comps.iter().map(|c| c.get(k).cloned().unwrap_or_else(num_rational::BigRational::zero)).collect());
        }
    }
    let torus = if rows.is_empty() { 0 } else { Matrix::from_rows(rows).rank() };
    let nil: Vec<Vec<Const>> = parts.iter().map(|(_, n)| n.entries().to_vec()).collect();
    let nil_rank = Matrix::from_rows(nil).rank();
    Ok(Some(torus + nil_rank))
}
