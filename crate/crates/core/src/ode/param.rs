use crate::fields::{Const, Field, FieldElement, Poly};
use crate::matrix::Matrix;

use super::rational::first_order_param;
use super::{rational_solutions, DiffOperator, OdeError, SolveOptions};

/// One tuple (g, c) with g' = λ g + Σ c_i b_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSolution {
    pub g: FieldElement,
    pub c: Vec<Const>,
}

/// A C-basis of all tuples (g, c) with g ∈ k.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamSolutionBasis {
    pub tuples: Vec<ParamSolution>,
}

impl ParamSolutionBasis {
    pub fn dim(&self) -> usize {
        self.tuples.len()
    }

    /// Number of tuples whose c-part is nonzero, counted up to linear dependence.
    pub fn inhomogeneous_rank(&self) -> usize {
        let rows: Vec<Vec<Const>> = self.tuples.iter().map(|t| t.c.clone()).collect();
        if rows.is_empty() || rows[0].is_empty() {
            return 0;
        }
        Matrix::from_rows(rows).rank()
    }
}

/// Coefficient matrix of functions over a common denominator: column j holds the numerator
/// coefficients of fs[j].
fn coefficient_matrix(fs: &[FieldElement]) -> Matrix<Const> {
    let mut den = Poly::<Const>::one();
    for f in fs {
        let g = den.gcd(f.den()).expect("gcd");
        den = den.mul(&f.den().div_exact(&g).expect("exact"));
    }
    let nums: Vec<Poly<Const>> =
        fs.iter().map(|f| f.num().mul(&den.div_exact(f.den()).expect("exact"))).collect();
    let rows = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    Matrix::from_fn(rows, fs.len(), |i, j| nums[j].coeff(i))
}

/// Greedy C-independent subset (leftmost) and a basis of the C-linear relations among `fs`.
pub fn linear_relations(fs: &[FieldElement]) -> (Vec<usize>, Vec<Vec<Const>>) {
    if fs.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let m = coefficient_matrix(fs);
    if m.rows() == 0 {
        let rel = (0..fs.len())
            .map(|j| {
                let mut v = vec![Const::zero(); fs.len()];
                v[j] = Const::one();
                v
            })
            .collect();
        return (Vec::new(), rel);
    }
    let (_, pivots) = m.rref();
    (pivots, m.kernel_basis())
}

/// Monic operator whose rational solution space is span_C(bs).
pub fn annihilator_from_functions(bs: &[FieldElement]) -> Result<DiffOperator, OdeError> {
    let (indep, _) = linear_relations(bs);
    if indep.is_empty() {
        return Err(OdeError::AllZero);
    }
    let basis: Vec<FieldElement> = indep.iter().map(|&i| bs[i].clone()).collect();
    let t = basis.len();
    // rows: derivatives 0..=t of each basis function
    let mut ders: Vec<Vec<FieldElement>> = vec![basis.clone()];
    for k in 1..=t {
        let prev = &ders[k - 1];
        ders.push(prev.iter().map(|f| f.derive()).collect());
    }
    let mut coeffs = Vec::with_capacity(t + 1);
    for i in 0..=t {
        let rows: Vec<Vec<FieldElement>> = (0..=t).filter(|&r| r != i).map(|r| ders[r].clone()).collect();
        let minor = Matrix::from_rows(rows).determinant().map_err(|e| match e {
            crate::matrix::MatrixError::Field(f) => OdeError::Field(f),
            _ => unreachable!("square minor"),
        })?;
        coeffs.push(if (i + t) % 2 == 0 { minor } else { minor.negate() });
    }
    Ok(DiffOperator::new(coeffs)?.monic())
}

/// Basis of all (g, c) with g ∈ k and g' = λ g + Σ c_i b_i.
pub fn parametrized_first_order(
    lambda: &FieldElement,
    bs: &[FieldElement],
    opts: &SolveOptions,
) -> Result<ParamSolutionBasis, OdeError> {
    let t = bs.len();
    let (indep, relations) = linear_relations(bs);
    let mut tuples = Vec::new();
    let dl = DiffOperator::d_minus(lambda);
    if lambda.is_zero() {
        opts.cancel.check()?;
        tuples = parametrized_primitive(bs, &indep)?;
    } else if indep.is_empty() {
        for g in rational_solutions(&dl, opts)?.basis {
            tuples.push(ParamSolution { g, c: vec![Const::zero(); t] });
        }
    } else {
        let basis: Vec<FieldElement> = indep.iter().map(|&i| bs[i].clone()).collect();
        for (g, coords) in first_order_param(lambda, &basis, opts)? {
            let mut c = vec![Const::zero(); t];
            for (k, &i) in indep.iter().enumerate() {
                c[i] = coords[k].clone();
            }
            tuples.push(ParamSolution { g, c });
        }
    }
    for rel in relations {
        tuples.push(ParamSolution { g: FieldElement::zero(), c: rel });
    }
    Ok(ParamSolutionBasis { tuples })
}

/// A rational solution of y' = λ y + b, if any.
pub fn first_order_rational_solution(
    lambda: &FieldElement,
    b: &FieldElement,
    opts: &SolveOptions,
) -> Result<Option<FieldElement>, OdeError> {
    if b.is_zero() {
        return Ok(Some(FieldElement::zero()));
    }
    let basis = parametrized_first_order(lambda, std::slice::from_ref(b), opts)?;
    for t in basis.tuples {
        if !t.c[0].is_zero() {
            let inv = FieldElement::constant(t.c[0].inverse()?);
            return Ok(Some(t.g.times(&inv)));
        }
    }
    Ok(None)
}

/// b = R' + B/q with q squarefree and deg B < deg q (Horowitz-Ostrogradsky). The split is
/// unique, so b has a rational primitive iff B = 0.
pub fn hermite_split(b: &FieldElement) -> Result<(FieldElement, FieldElement), OdeError> {
    let (p, proper) = b.split_polynomial_part();
    let mut integral = Vec::with_capacity(p.coeffs().len() + 1);
    integral.push(Const::zero());
    for (j, c) in p.coeffs().iter().enumerate() {
        integral.push(c.divide(&Const::from_int(j as i64 + 1))?);
    }
    let poly_part = FieldElement::from_poly(Poly::new(integral));
    if proper.is_zero() {
        return Ok((poly_part, FieldElement::zero()));
    }
    let q = proper.den().clone();
    let r = proper.num().clone();
    let q1 = q.gcd(&q.derivative())?;
    let q2 = q.div_exact(&q1)?;
    let a = q1.deg() as usize;
    let bdeg = q2.deg() as usize;
    let t = q1.derivative().mul(&q2).div_exact(&q1)?;
    // unknown columns: A = x^j (j < a), then B = x^j (j < bdeg)
    let mut cols: Vec<Poly<Const>> = Vec::with_capacity(a + bdeg);
    for j in 0..a {
        let xj = Poly::monomial(Const::one(), j);
        let da = if j == 0 { Poly::zero() } else { Poly::monomial(Const::from_int(j as i64), j - 1) };
        cols.push(da.mul(&q2).sub(&xj.mul(&t)));
    }
    for j in 0..bdeg {
        cols.push(Poly::monomial(Const::one(), j).mul(&q1));
    }
    let rows = cols.iter().map(|c| c.coeffs().len()).max().unwrap_or(0).max(r.coeffs().len());
    let m = Matrix::from_fn(rows, cols.len(), |i, j| cols[j].coeff(i));
    let rhs: Vec<Const> = (0..rows).map(|i| r.coeff(i)).collect();
    let sol = m.solve(&rhs).expect("Horowitz-Ostrogradsky system is solvable");
    let rat = FieldElement::new(Poly::new(sol[..a].to_vec()), q1)?;
    let rem = FieldElement::new(Poly::new(sol[a..].to_vec()), q2)?;
    Ok((poly_part.plus(&rat), rem))
}

/// g ∈ k with g' = b, if one exists.
pub fn rational_primitive(b: &FieldElement) -> Result<Option<FieldElement>, OdeError> {
    let (r, rem) = hermite_split(b)?;
    Ok(if rem.is_zero() { Some(r) } else { None })
}

/// λ = 0: Σ c_i b_i has a rational primitive iff Σ c_i B_i = 0 for the Hermite remainders B_i.
fn parametrized_primitive(bs: &[FieldElement], indep: &[usize]) -> Result<Vec<ParamSolution>, OdeError> {
    let t = bs.len();
    let mut parts = Vec::with_capacity(indep.len());
    let mut rems = Vec::with_capacity(indep.len());
    for &i in indep {
        let (r, rem) = hermite_split(&bs[i])?;
        parts.push(r);
        rems.push(rem);
    }
    let mut out = vec![ParamSolution { g: FieldElement::one(), c: vec![Const::zero(); t] }];
    let (_, rels) = linear_relations(&rems);
    for rel in rels {
        let mut g = FieldElement::zero();
        let mut c = vec![Const::zero(); t];
        for (k, &i) in indep.iter().enumerate() {
            if !rel[k].is_zero() {
                g = g.plus(&parts[k].times(&FieldElement::constant(rel[k].clone())));
                c[i] = rel[k].clone();
            }
        }
        out.push(ParamSolution { g, c });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Tower;

    fn el(s: &str) -> FieldElement {
        Tower::rationals().parse_element(s).unwrap()
    }

    #[test]
    fn annihilators() {
        let l = annihilator_from_functions(&[el("1")]).unwrap();
        assert_eq!(l, DiffOperator::d());
        let l = annihilator_from_functions(&[el("x"), el("x^2"), el("3*x - x^2")]).unwrap();
        assert_eq!(l.order(), 2);
        assert!(l.apply(&el("x")).is_zero() && l.apply(&el("x^2")).is_zero());
        let l = annihilator_from_functions(&[el("1/x")]).unwrap();
        assert_eq!(l.coeffs(), &[el("1/x"), el("1")]);
        assert_eq!(annihilator_from_functions(&[el("0")]), Err(OdeError::AllZero));
    }

    #[test]
    fn parametrized_examples() {
        let o = SolveOptions::default();
        let b = parametrized_first_order(&el("0"), &[el("2*x")], &o).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.inhomogeneous_rank(), 1);
        for t in &b.tuples {
            assert_eq!(t.g.derive(), el("2*x").times(&FieldElement::constant(t.c[0].clone())));
        }
        let b = parametrized_first_order(&el("0"), &[el("1/x")], &o).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(b.tuples[0].c[0].is_zero());
        let b = parametrized_first_order(&el("1/x"), &[el("1")], &o).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.tuples[0].g.divide(&el("x")).unwrap().as_constant().map(|c| c.is_zero()), Some(false));
        assert!(b.tuples[0].c[0].is_zero());
    }

    #[test]
    fn dependent_inputs_give_relations() {
        let o = SolveOptions::default();
        let b = parametrized_first_order(&el("0"), &[el("1/x^2"), el("2/x^2")], &o).unwrap();
        // constants, the primitive of 1/x^2, and the relation (2, -1)
        assert_eq!(b.dim(), 3);
        for t in &b.tuples {
            let rhs = el("1/x^2").times(&FieldElement::constant(t.c[0].clone()))
                .plus(&el("2/x^2").times(&FieldElement::constant(t.c[1].clone())));
            assert_eq!(t.g.derive(), rhs);
        }
    }

    #[test]
    fn first_order_and_primitive() {
        let o = SolveOptions::default();
        let g = first_order_rational_solution(&el("0"), &el("2*x"), &o).unwrap().unwrap();
        assert_eq!(g.derive(), el("2*x"));
        assert_eq!(first_order_rational_solution(&el("0"), &el("1/x"), &o).unwrap(), None);
        assert_eq!(first_order_rational_solution(&el("2/x"), &el("0"), &o).unwrap(), Some(el("0")));
        assert_eq!(rational_primitive(&el("1/x^2")).unwrap(), Some(el("-1/x")));
        assert_eq!(rational_primitive(&el("1/x")).unwrap(), None);
        assert_eq!(rational_primitive(&el("3*x^2 + 1/x^3")).unwrap(), Some(el("x^3 - 1/(2*x^2)")));
        let g = el("(x^2 + 1)/(x^3 - x)^2 + x/(x^2 + 1)^3");
        assert_eq!(rational_primitive(&g.derive()).unwrap().unwrap().derive(), g.derive());
        assert!(rational_primitive(&g.derive().plus(&el("1/(x - 1)"))).unwrap().is_none());
        let h = el("x/(x^2+1)^2 - 3/(x-2)^4");
        assert_eq!(rational_primitive(&h).unwrap().unwrap().derive(), h);
    }
}
