use std::collections::BTreeMap;

use crate::fields::{Field, FieldElement, FieldError};

use super::mrat::{MPoly, MRat};

/// Multivariate power series in δ over k, truncated above total degree `order`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Series {
    nvars: usize,
    order: u32,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl Series {
    pub fn zero(nvars: usize, order: u32) -> Self {
        Series { nvars, order, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, c: FieldElement) -> Self {
        let mut s = Self::zero(nvars, order);
        s.add_term(vec![0; nvars], c);
        s
    }

    /// φ_i + δ_i.
    pub fn shifted_var(nvars: usize, order: u32, i: usize, at: FieldElement) -> Self {
        let mut s = Self::constant(nvars, order, at);
        let mut e = vec![0; nvars];
        e[i] = 1;
        if order >= 1 {
            s.add_term(e, FieldElement::one());
        }
        s
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, FieldElement> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> FieldElement {
        self.terms.get(e).cloned().unwrap_or_else(FieldElement::zero)
    }

    fn add_term(&mut self, e: Vec<u32>, c: FieldElement) {
        if c.is_zero() || degree(&e) > self.order {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.plus(&c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &FieldElement) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.times(k));
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (e1, c1) in &self.terms {
            let d1 = degree(e1);
            for (e2, c2) in &rhs.terms {
                if d1 + degree(e2) > self.order {
                    continue;
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.times(c2));
            }
        }
        out
    }

    /// 1/s, requiring a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        let c0 = self.coeff(&vec![0; self.nvars]);
        let inv0 = c0.inverse()?;
        // 1/(c0 (1 + r)) = inv0 Σ (−r)^k
        let mut r = self.scale(&inv0);
        r.terms.remove(&vec![0; self.nvars]);
        let neg_r = r.scale(&FieldElement::from_int(-1));
        let mut acc = Self::constant(self.nvars, self.order, FieldElement::one());
        let mut pw = acc.clone();
        for _ in 0..self.order {
            pw = pw.mul(&neg_r);
            if pw.terms.is_empty() {
                break;
            }
            acc = acc.add(&pw);
        }
        Ok(acc.scale(&inv0))
    }

    /// Expansion of a polynomial at the point `at` (substitute z = at + δ).
    pub fn of_poly(p: &MPoly, at: &[FieldElement], order: u32) -> Self {
        let n = at.len();
        let maxe: Vec<u32> = (0..n).map(|i| p.terms().keys().map(|e| e.get(i).copied().unwrap_or(0)).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<Series>> = (0..n)
            .map(|i| {
                let base = Series::shifted_var(n, order, i, at[i].clone());
                let mut v = vec![Series::constant(n, order, FieldElement::one())];
                for k in 1..=maxe[i] as usize {
                    let next = v[k - 1].mul(&base);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Series::zero(n, order);
        for (e, c) in p.terms() {
            let mut t = Series::constant(n, order, FieldElement::constant(c.clone()));
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Expansion of a rational function; fails if the denominator vanishes at `at`.
    pub fn of_mrat(f: &MRat, at: &[FieldElement], order: u32) -> Result<Self, FieldError> {
        let num = Series::of_poly(f.num(), at, order);
        let den = Series::of_poly(f.den(), at, order);
        Ok(num.mul(&den.inverse()?))
    }
}
