use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::FieldError;

/// Exact field arithmetic. Values are canonical, so `==` is field equality.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Result<Self, FieldError>;
    fn from_rational(q: &BigRational) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn divide(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self.times(&rhs.inverse()?))
    }

    fn scale_int(&self, n: i64) -> Self {
        if n == 1 {
            return self.clone();
        }
        self.times(&Self::from_int(n))
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Result<Self, FieldError> {
        if Zero::is_zero(self) {
            Err(FieldError::DivisionByZero("0".into()))
        } else {
            Ok(self.recip())
        }
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

/// Dense univariate polynomial, coefficients from low to high degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Field> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<T: Field> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial c·X^k.
    pub fn monomial(c: T, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn x() -> Self {
        Poly::monomial(T::one(), 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lc(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    /// Number of trailing zero coefficients (the X-adic valuation); 0 for the zero polynomial.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn is_monomial(&self) -> bool {
        !self.is_zero() && self.valuation() + 1 == self.coeffs.len()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => out.push(a.plus(b)),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => out.push(a.minus(b)),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.negate()),
                (None, None) => unreachable!(),
            }
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.negate()).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if self.coeffs.len() == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.coeffs.len() == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    /// Multiply by X^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Divide by X^k, dropping low coefficients (exact when k ≤ valuation).
    pub fn unshift(&self, k: usize) -> Self {
        if k >= self.coeffs.len() {
            return Poly::zero();
        }
        Poly::new(self.coeffs[k..].to_vec())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn monic(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let lc = self.lc();
        if lc.is_one() {
            return Ok(self.clone());
        }
        Ok(self.scale(&lc.inverse()?))
    }

    pub fn div_rem(&self, rhs: &Self) -> Result<(Self, Self), FieldError> {
        let d = match rhs.degree() {
            None => return Err(FieldError::DivisionByZero("0".into())),
            Some(d) => d,
        };
        if self.coeffs.len() <= d {
            return Ok((Poly::zero(), self.clone()));
        }
        if d == 0 {
            let inv = rhs.coeffs[0].inverse()?;
            return Ok((self.scale(&inv), Poly::zero()));
        }
        let lc = rhs.lc();
        let inv = if lc.is_one() { T::one() } else { lc.inverse()? };
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let top = rem[k + d].clone();
            if top.is_zero() {
                continue;
            }
            let q = top.times(&inv);
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    rem[k + j] = rem[k + j].minus(&q.times(b));
                }
            }
            quot[k] = q;
        }
        rem.truncate(d);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self.div_rem(rhs)?.1)
    }

    /// Quotient of an exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, rhs: &Self) -> Result<Self, FieldError> {
        if rhs.is_monomial() && self.valuation() >= rhs.valuation() {
            let c = rhs.lc().inverse()?;
            return Ok(self.unshift(rhs.valuation()).scale(&c));
        }
        let (q, r) = self.div_rem(rhs)?;
        if !r.is_zero() {
            return Err(FieldError::Inexact);
        }
        Ok(q)
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, rhs: &Self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return rhs.monic();
        }
        if rhs.is_zero() {
            return self.monic();
        }
        if self.is_constant() || rhs.is_constant() {
            return Ok(Poly::one());
        }
        if self.is_monomial() {
            return Ok(Poly::monomial(T::one(), self.valuation().min(rhs.valuation())));
        }
        if rhs.is_monomial() {
            return Ok(Poly::monomial(T::one(), rhs.valuation().min(self.valuation())));
        }
        let (mut a, mut b) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self.monic()?, rhs.monic()?)
        } else {
            (rhs.monic()?, self.monic()?)
        };
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r.monic()?;
        }
        Ok(a)
    }

    /// Extended gcd: returns (g, s, t) with s·self + t·rhs = g, g monic.
    pub fn ext_gcd(&self, rhs: &Self) -> Result<(Self, Self, Self), FieldError> {
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let inv = r0.lc().inverse()?;
        Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale_int(k as i64))
                .collect(),
        )
    }

    pub fn eval(&self, at: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(at).plus(c);
        }
        acc
    }

    /// Evaluate at a value of an extension (coefficients mapped through `lift`).
    pub fn eval_with<U: Field>(&self, at: &U, lift: impl Fn(&T) -> U) -> U {
        let mut acc = U::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(at).plus(&lift(c));
        }
        acc
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Squarefree decomposition (Yun): returns (f_i, i) with self = lc · ∏ f_i^i, each f_i monic squarefree.
    /// Valid in characteristic zero.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Self, usize)>, FieldError> {
        let mut out = Vec::new();
        if self.is_constant() {
            return Ok(out);
        }
        let f = self.monic()?;
        let df = f.derivative();
        let a0 = f.gcd(&df)?;
        let mut b = f.div_exact(&a0)?;
        let mut c = df.div_exact(&a0)?;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d)?;
            if !a.is_constant() {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a)?;
            if b.is_constant() {
                break;
            }
            c = d.div_exact(&a)?;
            d = c.sub(&b.derivative());
            i += 1;
        }
        Ok(out)
    }

    /// Monic squarefree part.
    pub fn squarefree_part(&self) -> Result<Self, FieldError> {
        let mut acc = Poly::one();
        for (f, _) in self.squarefree_decomposition()? {
            acc = acc.mul(&f);
        }
        Ok(acc)
    }
}

/// Integer falling factorial s(s-1)…(s-k+1) as a rational.
pub fn falling_factorial(s: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= s - BigInt::from(j);
    }
    acc
}

/// Integer roots of a rational polynomial (coefficients low to high).
/// Returns `None` if the search bound exceeds `limit`.
pub fn integer_roots(coeffs: &[BigRational], limit: u64) -> Option<Vec<BigInt>> {
    let p = Poly::new(coeffs.to_vec());
    if p.is_zero() {
        return None;
    }
    let mut roots = Vec::new();
    let v = p.valuation();
    if v > 0 {
        roots.push(BigInt::zero());
    }
    let q = p.unshift(v);
    if q.is_constant() {
        return Some(roots);
    }
    // clear denominators
    let mut lcm = BigInt::one();
    for c in q.coeffs() {
        lcm = num_integer::Integer::lcm(&lcm, c.denom());
    }
    let ints: Vec<BigInt> = q.coeffs().iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    // Cauchy bound
    let mut maxc = BigInt::zero();
    for c in &ints[..ints.len() - 1] {
        if c.abs() > maxc {
            maxc = c.abs();
        }
    }
    let cauchy = BigInt::one() + &maxc / &an + BigInt::one();
    let bound = if cauchy < a0 { cauchy } else { a0 };
    let bound: u64 = match u64::try_from(&bound) {
        Ok(b) if b <= limit => b,
        _ => return None,
    };
    let eval = |s: &BigInt| -> bool {
        let mut acc = BigInt::zero();
        for c in ints.iter().rev() {
            acc = acc * s + c;
        }
        acc.is_zero()
    };
    for k in 1..=bound {
        let k = BigInt::from(k);
        if (&ints[0] % &k).is_zero() {
            if eval(&k) {
                roots.push(k.clone());
            }
            let nk = -k;
            if eval(&nk) {
                roots.push(nk);
            }
        }
    }
    roots.sort();
    Some(roots)
}
