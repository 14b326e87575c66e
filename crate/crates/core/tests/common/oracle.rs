//! Brute-force ansatz oracle for rational solutions.
//!
//! Every candidate is y = N(x) / D(x)^E with D the squarefree product of all denominators in
//! the problem and deg N bounded. Plugging the ansatz into the equation gives a linear system
//! over the constants, solved by a plain kernel computation.

#![allow(dead_code)]

use redform::ode::{DiffOperator, ParamSolutionBasis};
use redform::{Const, Field, FieldElement, Matrix, Poly, Tower};

pub const POLE_ORDER: u32 = 3;
pub const NUM_DEGREE: usize = 8;

fn squarefree_denominator(fs: &[&FieldElement]) -> Poly<Const> {
    let mut d = Poly::<Const>::one();
    for f in fs {
        let g = d.gcd(f.den()).unwrap();
        d = d.mul(&f.den().div_exact(&g).unwrap());
    }
    d.squarefree_part().unwrap()
}

/// Coefficient vectors of the numerators of `fs` over the product of all their denominators.
fn coefficient_rows(fs: &[FieldElement]) -> Vec<Vec<Const>> {
    let mut den = Poly::<Const>::one();
    for f in fs {
        den = den.mul(f.den());
    }
    let polys: Vec<Poly<Const>> = fs.iter().map(|f| f.num().mul(&den.div_exact(f.den()).unwrap())).collect();
    let width = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    polys.iter().map(|p| (0..width).map(|k| p.coeff(k)).collect()).collect()
}

/// Rank of a family of functions over the constants.
pub fn function_rank(fs: &[FieldElement]) -> usize {
    if fs.is_empty() {
        return 0;
    }
    let rows = coefficient_rows(fs);
    if rows[0].is_empty() {
        return 0;
    }
    Matrix::from_rows(rows).rank()
}

/// Rank of a family of (g, c) tuples: g's coefficients followed by c.
pub fn tuple_rank(tuples: &[(FieldElement, Vec<Const>)]) -> usize {
    if tuples.is_empty() {
        return 0;
    }
    let gs: Vec<FieldElement> = tuples.iter().map(|t| t.0.clone()).collect();
    let rows = coefficient_rows(&gs);
    let rows: Vec<Vec<Const>> = rows.into_iter().zip(tuples).map(|(mut r, t)| {
        r.extend(t.1.iter().cloned());
        r
    }).collect();
    if rows[0].is_empty() {
        return 0;
    }
    Matrix::from_rows(rows).rank()
}

fn ansatz_terms(d: &Poly<Const>) -> Vec<FieldElement> {
    let dd = d.pow(POLE_ORDER);
    let top = NUM_DEGREE + dd.deg().max(0) as usize;
    (0..=top)
        .map(|k| FieldElement::new(Poly::monomial(Const::one(), k), dd.clone()).unwrap())
        .collect()
}

/// Kernel of the map a ↦ Σ a_k img_k, where the images live in k.
fn kernel_of(images: &[FieldElement]) -> Vec<Vec<Const>> {
    let rows = coefficient_rows(images);
    if rows.iter().all(|r| r.iter().all(|c| c.is_zero())) {
        return (0..images.len())
            .map(|i| (0..images.len()).map(|j| if i == j { Const::one() } else { Const::zero() }).collect())
            .collect();
    }
    // columns are unknowns
    let m = Matrix::from_rows(rows).transpose();
    m.kernel_basis()
}

fn combine(terms: &[FieldElement], a: &[Const]) -> FieldElement {
    let mut y = FieldElement::zero();
    for (t, c) in terms.iter().zip(a) {
        if !c.is_zero() {
            y = y.plus(&t.times(&FieldElement::constant(c.clone())));
        }
    }
    y
}

/// Rational solutions of L(y) = 0 inside the ansatz family.
pub fn oracle_rational_solutions(l: &DiffOperator) -> Vec<FieldElement> {
    // poles of solutions sit at poles of the coefficients or zeros of the leading one
    let inv = l.leading().inverse().unwrap();
    let mut refs: Vec<&FieldElement> = l.coeffs().iter().collect();
    refs.push(&inv);
    let terms = ansatz_terms(&squarefree_denominator(&refs));
    let images: Vec<FieldElement> = terms.iter().map(|t| l.apply(t)).collect();
    kernel_of(&images).iter().map(|a| combine(&terms, a)).collect()
}

/// All (g, c) with g' = λ g + Σ c_i b_i inside the ansatz family.
pub fn oracle_parametrized(lambda: &FieldElement, bs: &[FieldElement]) -> Vec<(FieldElement, Vec<Const>)> {
    let mut refs: Vec<&FieldElement> = vec![lambda];
    refs.extend(bs.iter());
    let terms = ansatz_terms(&squarefree_denominator(&refs));
    let mut images: Vec<FieldElement> = terms.iter().map(|t| t.derive().minus(&lambda.times(t))).collect();
    images.extend(bs.iter().map(|b| b.negate()));
    let nt = terms.len();
    kernel_of(&images)
        .into_iter()
        .map(|a| (combine(&terms, &a[..nt]), a[nt..].to_vec()))
        .collect()
}

/// Whether y' = λ y + b has a solution in the ansatz family.
pub fn oracle_has_solution(lambda: &FieldElement, b: &FieldElement) -> bool {
    oracle_parametrized(lambda, std::slice::from_ref(b)).iter().any(|(_, c)| !c[0].is_zero())
}

pub fn engine_tuples(basis: &ParamSolutionBasis) -> Vec<(FieldElement, Vec<Const>)> {
    basis.tuples.iter().map(|t| (t.g.clone(), t.c.clone())).collect()
}

/// Two families span the same space iff both ranks equal the rank of their union.
pub fn same_function_span(a: &[FieldElement], b: &[FieldElement]) -> bool {
    let ra = function_rank(a);
    let rb = function_rank(b);
    let mut all = a.to_vec();
    all.extend(b.iter().cloned());
    ra == rb && function_rank(&all) == ra
}

pub fn same_tuple_span(a: &[(FieldElement, Vec<Const>)], b: &[(FieldElement, Vec<Const>)]) -> bool {
    let ra = tuple_rank(a);
    let rb = tuple_rank(b);
    let mut all = a.to_vec();
    all.extend(b.iter().cloned());
    ra == rb && tuple_rank(&all) == ra
}

pub enum Case {
    /// Coefficients a_0..a_n of L, expected solution-space dimension.
    Homogeneous(&'static [&'static str], usize),
    /// λ, the b_i, expected dimension of the tuple space.
    Param(&'static str, &'static [&'static str], usize),
}

pub fn cases() -> Vec<Case> {
    use Case::*;
    vec![
        Homogeneous(&["0", "1"], 1),
        Homogeneous(&["-1/x", "1"], 1),
        Homogeneous(&["2/x", "1"], 1),
        Homogeneous(&["-1", "1"], 0),
        Homogeneous(&["0", "0", "1"], 2),
        Homogeneous(&["0", "1/x", "1"], 1),
        Homogeneous(&["-2/x^2", "0", "1"], 2),
        Homogeneous(&["-1/x - 1/(x - 1)", "1"], 1),
        Homogeneous(&["-1/(2*x)", "1"], 0),
        Homogeneous(&["1", "0", "1"], 0),
        Homogeneous(&["-2*x", "x^2 + 1"], 1),
        Homogeneous(&["0", "0", "0", "1"], 3),
        Homogeneous(&["1/(x - 1)^2", "1"], 0),
        Homogeneous(&["-6", "0", "x^2"], 2),
        Homogeneous(&["-3/x", "1"], 1),
        Param("0", &["1"], 2),
        Param("0", &["1/x"], 1),
        Param("1/x", &["1"], 1),
        Param("1/x", &["1/x^2"], 2),
        Param("-1/x", &["1"], 2),
        Param("2/x", &["x"], 1),
        Param("2/x", &["1", "x"], 2),
        Param("0", &["1/x", "1/(x - 1)"], 1),
        Param("0", &["1/x^2", "1/x"], 2),
        Param("1", &["1"], 1),
        Param("1", &["x"], 1),
        Param("3/(2*x)", &["1"], 1),
        Param("3/(2*x)", &["1/x"], 1),
        Param("0", &["1", "1"], 3),
        Param("1/x", &["1", "1/x^2", "x"], 3),
    ]
}

pub fn parse(s: &str) -> FieldElement {
    Tower::rationals().parse_element(s).unwrap()
}
