use std::fmt;

use num_rational::BigRational;

use super::poly::{Field, Poly};
use super::FieldError;

/// Univariate rational function over a field: gcd(num, den) = 1, den monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<T> {
    num: Poly<T>,
    den: Poly<T>,
}

impl<T: Field> fmt::Debug for RatFunc<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl<T: Field> RatFunc<T> {
    /// Build num/den and normalize.
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero(format!("{:?}", num)));
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: Poly::one() });
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        Self::from_coprime(num, den)
    }

    /// num/den already coprime; only the leading coefficient of den is normalized.
    pub fn from_coprime(num: Poly<T>, den: Poly<T>) -> Result<Self, FieldError> {
        let lc = den.lc();
        if lc.is_one() {
            return Ok(RatFunc { num, den });
        }
        let inv = lc.inverse()?;
        Ok(RatFunc { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: T) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn var() -> Self {
        RatFunc { num: Poly::x(), den: Poly::one() }
    }

    pub fn num(&self) -> &Poly<T> {
        &self.num
    }

    pub fn den(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// The constant value, if this is a constant.
    pub fn as_constant(&self) -> Option<T> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    /// Derivative with respect to the variable (coefficients are constants).
    pub fn derive(&self) -> Self {
        if self.num.is_constant() && self.den.is_one() {
            return RatFunc::zero_value();
        }
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative());
        }
        if self.den.is_monomial() {
            // den = x^k: (n/x^k)' = (x n' - k n)/x^(k+1)
            let k = self.den.valuation() as i64;
            let top = self.num.derivative().shift(1).sub(&self.num.scale(&T::from_int(k)));
            return RatFunc::new(top, self.den.shift(1)).expect("monic denominator");
        }
        let top = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(top, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    fn zero_value() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    /// Apply a coefficient map (a field homomorphism) and renormalize.
    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Result<RatFunc<U>, FieldError> {
        RatFunc::new(self.num.map(&f), self.den.map(&f))
    }

    /// Order at infinity: deg den - deg num (None for zero).
    pub fn order_at_infinity(&self) -> Option<i64> {
        if self.num.is_zero() {
            None
        } else {
            Some(self.den.deg() - self.num.deg())
        }
    }

    /// Split as polynomial part plus proper fraction.
    pub fn split_polynomial_part(&self) -> (Poly<T>, RatFunc<T>) {
        let (q, r) = self.num.div_rem(&self.den).expect("monic denominator");
        (q, RatFunc { num: r, den: self.den.clone() }.normalized_zero())
    }

    fn normalized_zero(self) -> Self {
        if self.num.is_zero() {
            RatFunc::zero_value()
        } else {
            self
        }
    }

    pub fn eval(&self, at: &T) -> Result<T, FieldError> {
        let d = self.den.eval(at);
        self.num.eval(at).divide(&d)
    }
}

impl<T: Field> Field for RatFunc<T> {
    fn zero() -> Self {
        RatFunc::zero_value()
    }

    fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    fn plus(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = self.num.add(&rhs.num);
            if self.den.is_one() {
                return RatFunc::from_poly(num);
            }
            return RatFunc::new(num, self.den.clone()).expect("monic denominator");
        }
        let g = self.den.gcd(&rhs.den).expect("monic gcd");
        if g.is_one() {
            let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
            let den = self.den.mul(&rhs.den);
            return RatFunc::from_coprime(num, den).expect("monic").normalized_zero();
        }
        let a = self.den.div_exact(&g).expect("exact");
        let b = rhs.den.div_exact(&g).expect("exact");
        let num = self.num.mul(&b).add(&rhs.num.mul(&a));
        if num.is_zero() {
            return RatFunc::zero_value();
        }
        let h = num.gcd(&g).expect("monic gcd");
        let den = g.mul(&a).mul(&b);
        if h.is_one() {
            RatFunc::from_coprime(num, den).expect("monic")
        } else {
            RatFunc::from_coprime(num.div_exact(&h).expect("exact"), den.div_exact(&h).expect("exact"))
                .expect("monic")
        }
    }

    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negate())
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero_value();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(self.num.mul(&rhs.num));
        }
        if self.num.is_constant() && self.den.is_one() {
            return RatFunc { num: rhs.num.scale(&self.num.coeff(0)), den: rhs.den.clone() };
        }
        if rhs.num.is_constant() && rhs.den.is_one() {
            return RatFunc { num: self.num.scale(&rhs.num.coeff(0)), den: self.den.clone() };
        }
        let g1 = self.num.gcd(&rhs.den).expect("gcd");
        let g2 = rhs.num.gcd(&self.den).expect("gcd");
        let (n1, d2) = if g1.is_one() {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.div_exact(&g1).expect("exact"), rhs.den.div_exact(&g1).expect("exact"))
        };
        let (n2, d1) = if g2.is_one() {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.div_exact(&g2).expect("exact"), self.den.div_exact(&g2).expect("exact"))
        };
        RatFunc::from_coprime(n1.mul(&n2), d1.mul(&d2)).expect("monic")
    }

    fn negate(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero("0".into()));
        }
        RatFunc::from_coprime(self.den.clone(), self.num.clone())
    }

    fn from_rational(q: &BigRational) -> Self {
        RatFunc::constant(T::from_rational(q))
    }
}
