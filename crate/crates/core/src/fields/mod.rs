//! Exact arithmetic: ℚ, the constant tower C, polynomials and rational functions over C.

mod constant;
mod expr;
mod partial;
mod poly;
mod ratfunc;

use thiserror::Error;

pub use constant::{Const, Layer, Tower};
pub use expr::{format_poly, format_ratfunc, parse_expr, Coefficient, Expr};
pub use partial::{const_integer_roots, partial_fractions, PartialFraction, PartialTerm};
pub(crate) use partial::{coprime_factors, rational_roots};
pub use poly::{falling_factorial, integer_roots, Field, Poly};
pub use ratfunc::RatFunc;


/// The differential base field k = C(x).
pub type FieldElement = RatFunc<Const>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("minimal polynomial of `{generator}` is reducible: it has the factor {factor}")]
    NonInvertibleAlgebraic { generator: String, factor: String },
    #[error("inexact division")]
    Inexact,
    #[error("name `{0}` is already used")]
    DuplicateName(String),
    #[error("bad minimal polynomial: {0}")]
    BadMinimalPolynomial(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("cannot parse `{input}`: {message}")]
    Parse { input: String, message: String },
}

impl Tower {
    /// Parse a constant expression over the generators of this tower.
    pub fn parse_const(&self, s: &str) -> Result<Const, FieldError> {
        let e = parse_expr(s)?;
        e.eval(&|name: &str| self.generator(name))
    }

    /// Parse a polynomial in `var` with coefficients in this tower.
    pub fn parse_poly(&self, var: &str, s: &str) -> Result<Poly<Const>, FieldError> {
        let e = parse_expr(s)?;
        let r: FieldElement = e.eval(&|name: &str| {
            if name == var {
                Some(FieldElement::var())
            } else {
                self.generator(name).map(FieldElement::constant)
            }
        })?;
        match r.den().is_constant() {
            true => Ok(r.num().scale(&r.den().lc().inverse()?)),
            false => Err(FieldError::Parse { input: s.to_string(), message: format!("not a polynomial in {var}") }),
        }
    }

    /// Adjoin a root of a monic polynomial written in the new generator's name.
    pub fn adjoin_algebraic_expr(&mut self, name: &str, minpoly: &str) -> Result<Const, FieldError> {
        if self.generator(name).is_some() {
            return Err(FieldError::DuplicateName(name.to_string()));
        }
        let p = self.parse_poly(name, minpoly)?;
        self.adjoin_algebraic(name, p)
    }

    /// Parse an element of C(x).
    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        let e = parse_expr(s)?;
        e.eval(&|name: &str| {
            if name == "x" {
                Some(FieldElement::var())
            } else {
                self.generator(name).map(FieldElement::constant)
            }
        })
    }
}

/// Constant embedded in C(x).
pub fn fe(c: Const) -> FieldElement {
    FieldElement::constant(c)
}

/// Small rational constant in C(x).
pub fn fe_rat(n: i64, d: i64) -> FieldElement {
    FieldElement::constant(Const::rational(n, d))
}
