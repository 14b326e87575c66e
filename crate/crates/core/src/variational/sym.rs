use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::fields::Field;
use crate::matrix::Matrix;

use super::VariationalError;

/// Exponent vectors of total degree `d` in `n` variables, heaviest-first in variable 1
/// (descending lexicographic).
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Basis of the LVE of order p: degree p block first, down to degree 1.
pub fn lve_basis(n: usize, p: u32) -> Vec<Vec<u32>> {
    (1..=p).rev().flat_map(|d| monomials(n, d)).collect()
}

/// dim sym^d of an n-dimensional space.
pub fn sym_dim(n: usize, d: u32) -> usize {
    binomial(n + d as usize - 1, d as usize)
}

/// d_p = C(n + p, n) − 1 for n phase-space variables.
pub fn lve_dim(n: usize, p: u32) -> usize {
    binomial(n + p as usize, n) - 1
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Multinomial |β|!/β!, the scaling between monomial and symmetric-tensor coordinates.
pub fn weight(beta: &[u32]) -> BigInt {
    let mut w = factorial(beta.iter().sum());
    for &b in beta {
        w /= factorial(b);
    }
    w
}

pub(crate) fn weight_ratio<T: Field>(beta: &[u32], alpha: &[u32]) -> T {
    T::from_rational(&BigRational::new(weight(beta), weight(alpha)))
}

pub(crate) fn index_map(basis: &[Vec<u32>]) -> HashMap<Vec<u32>, usize> {
    basis.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect()
}

/// The derivation induced by Y' = AY on degree-p forms, in weighted monomial coordinates.
pub fn sym_power<T: Field>(a: &Matrix<T>, p: u32) -> Result<Matrix<T>, VariationalError> {
    if !a.is_square() {
        return Err(VariationalError::Matrix(crate::matrix::MatrixError::NotSquare(a.rows(), a.cols())));
    }
    let n = a.rows();
    let basis = monomials(n, p);
    let idx = index_map(&basis);
    let mut out: Matrix<T> = Matrix::zeros(basis.len(), basis.len());
    for (r, beta) in basis.iter().enumerate() {
        for i in 0..n {
            if beta[i] == 0 {
                continue;
            }
            for j in 0..n {
                let aij = a.get(i, j);
                if aij.is_zero() {
                    continue;
                }
                let mut alpha = beta.clone();
                alpha[i] -= 1;
                alpha[j] += 1;
                let c = idx[&alpha];
                let v = aij.scale_int(beta[i] as i64).times(&weight_ratio(beta, &alpha));
                let cur = out.get(r, c).plus(&v);
                out.set(r, c, cur);
            }
        }
    }
    Ok(out)
}

/// The map induced by Z = PY on degree-p forms, in weighted monomial coordinates.
pub fn sym_power_gauge<T: Field>(pm: &Matrix<T>, p: u32) -> Result<Matrix<T>, VariationalError> {
    if !pm.is_square() {
        return Err(VariationalError::Matrix(crate::matrix::MatrixError::NotSquare(pm.rows(), pm.cols())));
    }
    if pm.determinant()?.is_zero() {
        return Err(VariationalError::SingularGauge);
    }
    Ok(sym_power_map(pm, p))
}

/// Same as `sym_power_gauge` without the invertibility check.
pub(crate) fn sym_power_map<T: Field>(pm: &Matrix<T>, p: u32) -> Matrix<T> {
    let n = pm.rows();
    let basis = monomials(n, p);
    let idx = index_map(&basis);
    let mut out = Matrix::zeros(basis.len(), basis.len());
    for (r, beta) in basis.iter().enumerate() {
        // Π_i (Σ_j P_ij y_j)^{β_i}
        let mut prod: BTreeMap<Vec<u32>, T> = BTreeMap::new();
        prod.insert(vec![0; n], T::one());
        for i in 0..n {
            for _ in 0..beta[i] {
                let mut next: BTreeMap<Vec<u32>, T> = BTreeMap::new();
                for (e, c) in &prod {
                    for j in 0..n {
                        let pij = pm.get(i, j);
                        if pij.is_zero() {
                            continue;
                        }
                        let mut e2 = e.clone();
                        e2[j] += 1;
                        let v = c.times(pij);
                        let slot = next.entry(e2).or_insert_with(T::zero);
                        *slot = slot.plus(&v);
                    }
                }
                prod = next;
            }
        }
        for (alpha, c) in prod {
            if c.is_zero() {
                continue;
            }
            let col = idx[&alpha];
            out.set(r, col, c.times(&weight_ratio(beta, &alpha)));
        }
    }
    out
}
