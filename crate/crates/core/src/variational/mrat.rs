use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use crate::fields::{Const, Field, FieldError};

/// Sparse multivariate polynomial over C, keyed by exponent vectors.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Const>,
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}*{e:?}")).collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Const) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, Const::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Const> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Const) {
        if c.is_zero() {
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

    pub fn neg(&self) -> Self {
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.negate())).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, k: &Const) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.times(k))).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.times(c2));
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        if i >= self.nvars {
            return out;
        }
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c.scale_int(e[i] as i64));
        }
        out
    }

    /// Largest term in the map order.
    fn leading(&self) -> Option<(&Vec<u32>, &Const)> {
        self.terms.iter().next_back()
    }

    fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Componentwise minimum exponent over all terms.
    fn min_exponents(&self) -> Vec<u32> {
        let mut m: Option<Vec<u32>> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(v) => v.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    fn divide_monomial(&self, e: &[u32]) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.iter().zip(e).map(|(a, b)| a - b).collect(), c.clone())).collect(),
        }
    }

    /// Substitute values in a field containing C.
    pub fn eval<T: Field>(&self, point: &[T], lift: impl Fn(&Const) -> T) -> T {
        let maxe: Vec<u32> = (0..self.nvars).map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<T>> = (0..self.nvars)
            .map(|i| {
                let mut v = vec![T::one()];
                for k in 1..=maxe[i] as usize {
                    let next = v[k - 1].times(&point[i]);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut t = lift(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.times(&powers[i][k as usize]);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }
}

/// Multivariate rational function over C. Equality is field equality (cross-multiplication).
#[derive(Clone)]
pub struct MRat {
    num: MPoly,
    den: MPoly,
}

impl fmt::Debug for MRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl PartialEq for MRat {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = align(self, other);
        a.num.mul(&b.den) == b.num.mul(&a.den)
    }
}

impl MRat {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero(format!("{num:?}")));
        }
        Ok(MRat { num, den }.simplified())
    }

    pub fn from_poly(p: MPoly) -> Self {
        let n = p.nvars();
        MRat { num: p, den: MPoly::constant(n, Const::one()) }
    }

    pub fn constant(nvars: usize, c: Const) -> Self {
        Self::from_poly(MPoly::constant(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(MPoly::var(nvars, i))
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    fn simplified(self) -> Self {
        let n = self.num.nvars();
        if self.num.is_zero() {
            return MRat { num: MPoly::zero(n), den: MPoly::constant(n, Const::one()) };
        }
        let mut num = self.num;
        let mut den = self.den;
        // common monomial content
        let a = num.min_exponents();
        let b = den.min_exponents();
        let g: Vec<u32> = a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect();
        if g.iter().any(|&k| k > 0) {
            num = num.divide_monomial(&g);
            den = den.divide_monomial(&g);
        }
        if den.is_monomial() {
            let (e, c) = den.leading().map(|(e, c)| (e.clone(), c.clone())).expect("nonzero");
            if !c.is_one() {
                let inv = c.inverse().expect("nonzero");
                num = num.scale(&inv);
                let mut d = MPoly::zero(n);
                d.add_term(e, Const::one());
                den = d;
            }
        } else {
            let c = den.leading().map(|(_, c)| c.clone()).expect("nonzero");
            if !c.is_one() {
                let inv = c.inverse().expect("nonzero");
                num = num.scale(&inv);
                den = den.scale(&inv);
            }
        }
        MRat { num, den }
    }

    pub fn derivative(&self, i: usize) -> Self {
        let top = self.num.derivative(i).mul(&self.den).sub(&self.num.mul(&self.den.derivative(i)));
        MRat::new(top, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Value at a point; fails if the denominator vanishes there.
    pub fn eval<T: Field>(&self, point: &[T], lift: impl Fn(&Const) -> T + Copy) -> Result<T, FieldError> {
        let d = self.den.eval(point, lift);
        if d.is_zero() {
            return Err(FieldError::DivisionByZero("denominator vanishes at the point".into()));
        }
        self.num.eval(point, lift).divide(&d)
    }
}

impl Field for MRat {
    fn zero() -> Self {
        MRat::constant(0, Const::zero())
    }

    fn one() -> Self {
        MRat::constant(0, Const::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn plus(&self, rhs: &Self) -> Self {
        let (a, b) = align(self, rhs);
        if a.den == b.den {
            return MRat::new(a.num.add(&b.num), a.den).expect("nonzero");
        }
        MRat::new(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den)).expect("nonzero")
    }

    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negate())
    }

    fn times(&self, rhs: &Self) -> Self {
        let (a, b) = align(self, rhs);
        MRat::new(a.num.mul(&b.num), a.den.mul(&b.den)).expect("nonzero")
    }

    fn negate(&self) -> Self {
        MRat { num: self.num.neg(), den: self.den.clone() }
    }

    fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero("0".into()));
        }
        MRat::new(self.den.clone(), self.num.clone())
    }

    fn from_rational(q: &BigRational) -> Self {
        MRat::constant(0, Const::Rat(q.clone()))
    }
}

/// Constants built without knowing the variable count have nvars = 0; widen them.
fn widen(p: &MPoly, n: usize) -> MPoly {
    if p.nvars == n {
        return p.clone();
    }
    MPoly {
        nvars: n,
        terms: p.terms.iter().map(|(e, c)| {
            let mut e2 = e.clone();
            e2.resize(n, 0);
            (e2, c.clone())
        }).collect(),
    }
}

fn align(a: &MRat, b: &MRat) -> (MRat, MRat) {
    let n = a.nvars().max(b.nvars());
    let w = |r: &MRat| MRat { num: widen(&r.num, n), den: widen(&r.den, n) };
    (w(a), w(b))
}

impl MRat {
    /// Same function with `n` variables (constants are created with zero variables).
    pub fn widened(&self, n: usize) -> MRat {
        MRat { num: widen(&self.num, n), den: widen(&self.den, n) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_rule_and_equality() {
        let q = MRat::var(2, 0);
        let p = MRat::var(2, 1);
        let f = p.divide(&q.pow(3)).unwrap();
        let df = f.derivative(0);
        assert_eq!(df, p.scale_int(-3).divide(&q.pow(4)).unwrap());
        let g = q.times(&p).divide(&q.times(&q)).unwrap();
        assert_eq!(g, p.divide(&q).unwrap());
        assert!(g.minus(&g).is_zero());
    }

    #[test]
    fn evaluation() {
        let q = MRat::var(2, 0);
        let p = MRat::var(2, 1);
        let f = p.plus(&MRat::from_int(1)).divide(&q).unwrap();
        let v = f.eval(&[BigRational::from_int(2), BigRational::from_int(3)], |c| c.as_rational().cloned().unwrap()).unwrap();
        assert_eq!(v, BigRational::from_int(2));
        assert!(f.eval(&[BigRational::from_int(0), BigRational::from_int(3)], |c| c.as_rational().cloned().unwrap()).is_err());
    }
}
