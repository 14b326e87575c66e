//! Linear scalar ODEs over k: rational solutions, annihilators, parametrized first-order problems.

mod param;
mod rational;

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::fields::{Const, Field, FieldElement, FieldError};

pub use param::{
    annihilator_from_functions, first_order_rational_solution, hermite_split, linear_relations,
    parametrized_first_order, rational_primitive, ParamSolution, ParamSolutionBasis,
};
pub use rational::{rational_solutions, RationalSolutions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("operator has no nonzero coefficient")]
    ZeroOperator,
    #[error("all functions are zero")]
    AllZero,
    #[error("degree bound {bound} exceeds the cap {cap}")]
    DegreeCapExceeded { bound: i64, cap: usize },
    #[error("computation cancelled")]
    Cancelled,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Cooperative cancellation flag shared between a caller and long computations.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }

    pub(crate) fn check(&self) -> Result<(), OdeError> {
        if self.is_cancelled() {
            Err(OdeError::Cancelled)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Hard cap on numerator degrees when no finite bound is available or the bound is larger.
    pub degree_cap: usize,
    pub cancel: CancelToken,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { degree_cap: 50, cancel: CancelToken::new() }
    }
}

/// a_n y^(n) + … + a_0 y with a_n ≠ 0.
#[derive(Clone, PartialEq)]
pub struct DiffOperator {
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl DiffOperator {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Result<Self, OdeError> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(OdeError::ZeroOperator);
        }
        Ok(DiffOperator { coeffs })
    }

    /// d/dx.
    pub fn d() -> Self {
        DiffOperator { coeffs: vec![FieldElement::zero(), FieldElement::one()] }
    }

    /// d/dx − λ.
    pub fn d_minus(lambda: &FieldElement) -> Self {
        DiffOperator { coeffs: vec![lambda.negate(), FieldElement::one()] }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &FieldElement {
        self.coeffs.last().expect("nonzero operator")
    }

    pub fn apply(&self, y: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero();
        let mut dy = y.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                dy = dy.derive();
            }
            if !a.is_zero() {
                acc = acc.plus(&a.times(&dy));
            }
        }
        acc
    }

    /// Left-multiply by 1/a_n.
    pub fn monic(&self) -> Self {
        let inv = self.leading().inverse().expect("nonzero leading coefficient");
        DiffOperator { coeffs: self.coeffs.iter().map(|c| c.times(&inv)).collect() }
    }

    /// Ore product self·rhs: D^i · b = Σ_k C(i,k) b^(k) D^(i−k).
    pub fn compose(&self, rhs: &DiffOperator) -> DiffOperator {
        let n = self.order() + rhs.order();
        let mut out = vec![FieldElement::zero(); n + 1];
        // derivatives of rhs coefficients up to order(self)
        let mut ders: Vec<Vec<FieldElement>> = vec![rhs.coeffs.clone()];
        for k in 1..=self.order() {
            let prev = &ders[k - 1];
            ders.push(prev.iter().map(|b| b.derive()).collect());
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut binom = BigInt::from(1);
            for k in 0..=i {
                if k > 0 {
                    binom = binom * BigInt::from(i - k + 1) / BigInt::from(k);
                }
                let c = FieldElement::constant(Const::Rat(BigRational::from_integer(binom.clone())));
                for (j, bk) in ders[k].iter().enumerate() {
                    if bk.is_zero() {
                        continue;
                    }
                    let idx = i - k + j;
                    out[idx] = out[idx].plus(&a.times(&c).times(bk));
                }
            }
        }
        DiffOperator::new(out).expect("product of nonzero operators")
    }
}
