use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::fields::{const_integer_roots, coprime_factors, Const, Field, FieldElement, Poly};
use crate::matrix::Matrix;

use super::{DiffOperator, OdeError, SolveOptions};

const ROOT_LIMIT: u64 = 100_000;

/// Basis of the rational solutions with bound metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSolutions {
    pub basis: Vec<FieldElement>,
    /// Numerator degree bound used for the ansatz.
    pub degree_bound: i64,
    /// True if the bound came from the cap rather than an indicial equation.
    pub capped: bool,
}

/// ν(ν−1)…(ν−k+1) as a polynomial in ν.
fn falling_poly(k: usize) -> Poly<Const> {
    let mut p = Poly::one();
    for j in 0..k {
        p = p.mul(&Poly::new(vec![Const::from_int(-(j as i64)), Const::one()]));
    }
    p
}

fn multiplicity(p: &Poly<Const>, g: &Poly<Const>) -> (usize, Poly<Const>) {
    let mut k = 0;
    let mut q = p.clone();
    loop {
        match q.div_rem(g) {
            Ok((d, r)) if r.is_zero() => {
                q = d;
                k += 1;
            }
            _ => return (k, q),
        }
    }
}

/// Split factors until every coefficient has a constant order along each factor.
fn refine(mut factors: Vec<Poly<Const>>, polys: &[Poly<Const>]) -> Vec<Poly<Const>> {
    'outer: loop {
        for fi in 0..factors.len() {
            let g = factors[fi].clone();
            for p in polys {
                if p.is_zero() {
                    continue;
                }
                let (_, q) = multiplicity(p, &g);
                let h = q.gcd(&g).expect("gcd");
                if !h.is_constant() && h.deg() < g.deg() {
                    let rest = g.div_exact(&h).expect("exact").monic().expect("monic");
                    factors[fi] = h;
                    factors.push(rest);
                    continue 'outer;
                }
            }
        }
        return factors;
    }
}

/// Polynomial in ν over C through given values at ν = 0, 1, …, by Newton interpolation.
fn interpolate(values: &[Const]) -> Poly<Const> {
    let n = values.len();
    let mut dd: Vec<Const> = values.to_vec();
    let mut coeffs = vec![dd[0].clone()];
    for level in 1..n {
        for i in (level..n).rev() {
            let denom = Const::from_int(level as i64);
            dd[i] = dd[i].minus(&dd[i - 1]).divide(&denom).expect("nonzero");
        }
        coeffs.push(dd[level].clone());
    }
    // Σ coeffs[k] Π_{j<k} (ν − j)
    let mut out = Poly::zero();
    for (k, c) in coeffs.iter().enumerate() {
        out = out.add(&falling_poly(k).scale(c));
    }
    out
}

fn integer_roots_of(p: &Poly<Const>) -> Option<Vec<BigInt>> {
    if p.is_zero() {
        return None;
    }
    const_integer_roots(p.coeffs(), ROOT_LIMIT)
}

/// Integer roots of the indicial equation at the roots of the squarefree factor g.
fn indicial_roots_at(polys: &[Poly<Const>], g: &Poly<Const>) -> Option<Vec<BigInt>> {
    let dg = g.derivative();
    let mut terms: Vec<(i64, usize, Poly<Const>)> = Vec::new();
    for (i, p) in polys.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let (v, q) = multiplicity(p, g);
        terms.push((v as i64 - i as i64, i, q));
    }
    let m = terms.iter().map(|t| t.0).min()?;
    // c_i(X) = q_i · g'^i mod g
    let parts: Vec<(usize, Poly<Const>)> = terms
        .into_iter()
        .filter(|t| t.0 == m)
        .map(|(_, i, q)| (i, q.mul(&dg.pow(i as u32)).rem(g).expect("monic")))
        .collect();
    let d = g.deg() as usize;
    if d == 1 {
        let alpha = g.coeff(0).negate();
        let mut ind = Poly::zero();
        for (i, c) in &parts {
            ind = ind.add(&falling_poly(*i).scale(&c.eval(&alpha)));
        }
        return integer_roots_of(&ind);
    }
    // norm of I(ν) from C[X]/g: determinant of multiplication, interpolated in ν
    let top = parts.iter().map(|p| p.0).max().unwrap_or(0);
    let npts = d * top + 1;
    let mut values = Vec::with_capacity(npts);
    for nu in 0..npts {
        let nu_b = BigInt::from(nu);
        let mut iv = Poly::zero();
        for (i, c) in &parts {
            let ff = crate::fields::falling_factorial(&nu_b, *i);
            iv = iv.add(&c.scale(&Const::Rat(BigRational::from_integer(ff))));
        }
        let mut mat = Matrix::zeros(d, d);
        let mut col = iv.rem(g).expect("monic");
        for k in 0..d {
            for j in 0..d {
                mat.set(j, k, col.coeff(j));
            }
            col = col.shift(1).rem(g).expect("monic");
        }
        values.push(mat.determinant().expect("square"));
    }
    integer_roots_of(&interpolate(&values))
}

/// Integer roots of the indicial equation at infinity (possible degrees of solutions).
fn indicial_roots_at_infinity(polys: &[Poly<Const>]) -> Option<Vec<BigInt>> {
    let m = polys
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, p)| p.deg() - i as i64)
        .max()?;
    let mut ind = Poly::zero();
    for (i, p) in polys.iter().enumerate() {
        if !p.is_zero() && p.deg() - i as i64 == m {
            ind = ind.add(&falling_poly(i).scale(&p.lc()));
        }
    }
    integer_roots_of(&ind)
}

/// C-basis of the rational solutions of L(y) = 0.
pub fn rational_solutions(l: &DiffOperator, opts: &SolveOptions) -> Result<RationalSolutions, OdeError> {
    opts.cancel.check()?;
    if l.order() == 0 {
        return Ok(RationalSolutions { basis: Vec::new(), degree_bound: -1, capped: false });
    }
    // clear denominators
    let mut den = Poly::<Const>::one();
    for a in l.coeffs() {
        let g = den.gcd(a.den())?;
        den = den.mul(&a.den().div_exact(&g)?);
    }
    let polys: Vec<Poly<Const>> =
        l.coeffs().iter().map(|a| a.num().mul(&den.div_exact(a.den()).expect("exact"))).collect();
    let lead = polys.last().expect("order ≥ 1").clone();

    let mut capped = false;
    let factors: Vec<Poly<Const>> = coprime_factors(&lead)?.into_iter().map(|(f, _)| f).collect();
    let factors = refine(factors, &polys);
    let mut denom = Poly::<Const>::one();
    for g in &factors {
        opts.cancel.check()?;
        let e = match indicial_roots_at(&polys, g) {
            Some(roots) => roots.iter().filter_map(|r| (-r).to_i64()).filter(|&e| e > 0).max().unwrap_or(0),
            None => {
                capped = true;
                opts.degree_cap as i64
            }
        };
        if e > opts.degree_cap as i64 {
            return Err(OdeError::DegreeCapExceeded { bound: e, cap: opts.degree_cap });
        }
        denom = denom.mul(&g.pow(e as u32));
    }
    let bound = match indicial_roots_at_infinity(&polys) {
        Some(roots) => match roots.iter().filter_map(|r| r.to_i64()).max() {
            Some(r) => denom.deg() + r,
            None => -1,
        },
        None => {
            capped = true;
            denom.deg() + opts.degree_cap as i64
        }
    };
    if bound < 0 {
        return Ok(RationalSolutions { basis: Vec::new(), degree_bound: bound, capped });
    }
    if bound > opts.degree_cap as i64 && !capped {
        return Err(OdeError::DegreeCapExceeded { bound, cap: opts.degree_cap });
    }
    let bound_u = bound as usize;

    // ansatz y = Σ n_j x^j / D
    let dinv = FieldElement::from_coprime(Poly::one(), denom.clone())?;
    let mut images = Vec::with_capacity(bound_u + 1);
    for j in 0..=bound_u {
        opts.cancel.check()?;
        let y = FieldElement::from_poly(Poly::monomial(Const::one(), j)).times(&dinv);
        images.push(l.apply(&y));
    }
    let mut common = Poly::<Const>::one();
    for r in &images {
        let g = common.gcd(r.den())?;
        common = common.mul(&r.den().div_exact(&g)?);
    }
    let nums: Vec<Poly<Const>> =
        images.iter().map(|r| r.num().mul(&common.div_exact(r.den()).expect("exact"))).collect();
    let rows = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let sys = Matrix::from_fn(rows, bound_u + 1, |i, j| nums[j].coeff(i));
    let kernel = if rows == 0 {
        (0..=bound_u)
            .map(|j| {
                let mut v = vec![Const::zero(); bound_u + 1];
                v[j] = Const::one();
                v
            })
            .collect()
    } else {
        sys.kernel_basis()
    };
    let mut basis = Vec::new();
    for v in kernel {
        let y = FieldElement::from_poly(Poly::new(v)).times(&dinv);
        debug_assert!(l.apply(&y).is_zero());
        if !l.apply(&y).is_zero() {
            unreachable!("rational solution failed verification");
        }
        basis.push(y);
    }
    Ok(RationalSolutions { basis, degree_bound: bound, capped })
}

/// All (g, c) with g' = λ g + Σ c_i b_i, by a direct ansatz with first-order pole and degree
/// bounds. The b_i must be C-independent.
pub(crate) fn first_order_param(
    lambda: &FieldElement,
    bs: &[FieldElement],
    opts: &SolveOptions,
) -> Result<Vec<(FieldElement, Vec<Const>)>, OdeError> {
    opts.cancel.check()?;
    let dl = lambda.den().clone();
    let polys = vec![lambda.num().scale(&Const::from_int(-1)), dl.clone()];
    let mut all = dl.clone();
    for b in bs {
        let g = all.gcd(b.den())?;
        all = all.mul(&b.den().div_exact(&g)?);
    }
    let mut split: Vec<Poly<Const>> = polys.clone();
    split.extend(bs.iter().map(|b| b.den().clone()));
    let factors: Vec<Poly<Const>> = coprime_factors(&all)?.into_iter().map(|(f, _)| f).collect();
    let factors = refine(factors, &split);

    let mut capped = false;
    let mut denom = Poly::<Const>::one();
    for g in &factors {
        opts.cancel.check()?;
        let hom = match indicial_roots_at(&polys, g) {
            Some(roots) => roots.iter().filter_map(|r| (-r).to_i64()).max().unwrap_or(0),
            None => {
                capped = true;
                opts.degree_cap as i64
            }
        };
        let el = multiplicity(&dl, g).0 as i64;
        let eb = bs.iter().map(|b| multiplicity(b.den(), g).0 as i64).max().unwrap_or(0);
        // g' dominates at a simple pole of λ or away from the poles of λ, λg otherwise
        let inhom = if eb == 0 { 0 } else if el <= 1 { eb - 1 } else { eb - el };
        let e = hom.max(inhom).max(0);
        if e > opts.degree_cap as i64 {
            return Err(OdeError::DegreeCapExceeded { bound: e, cap: opts.degree_cap });
        }
        denom = denom.mul(&g.pow(e as u32));
    }
    let k = lambda.num().deg() - dl.deg();
    let db = bs.iter().map(|b| b.num().deg() - b.den().deg()).max().unwrap_or(i64::MIN);
    let inhom = if k >= 0 { db - k } else { db + 1 };
    let hom = match indicial_roots_at_infinity(&polys) {
        Some(roots) => roots.iter().filter_map(|r| r.to_i64()).max().unwrap_or(-1),
        None => {
            capped = true;
            opts.degree_cap as i64
        }
    };
    let bound = denom.deg() + hom.max(inhom);
    if bound > denom.deg() + opts.degree_cap as i64 && !capped {
        return Err(OdeError::DegreeCapExceeded { bound, cap: opts.degree_cap });
    }
    let n = if bound < 0 { 0 } else { bound as usize + 1 };

    let dinv = FieldElement::from_coprime(Poly::one(), denom)?;
    let mut terms = Vec::with_capacity(n);
    let mut images = Vec::with_capacity(n + bs.len());
    for j in 0..n {
        opts.cancel.check()?;
        let y = FieldElement::from_poly(Poly::monomial(Const::one(), j)).times(&dinv);
        images.push(y.derive().minus(&lambda.times(&y)));
        terms.push(y);
    }
    images.extend(bs.iter().map(|b| b.negate()));
    let mut common = Poly::<Const>::one();
    for r in &images {
        let g = common.gcd(r.den())?;
        common = common.mul(&r.den().div_exact(&g)?);
    }
    let nums: Vec<Poly<Const>> =
        images.iter().map(|r| r.num().mul(&common.div_exact(r.den()).expect("exact"))).collect();
    let rows = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let cols = images.len();
    let kernel: Vec<Vec<Const>> = if rows == 0 {
        (0..cols)
            .map(|j| (0..cols).map(|i| if i == j { Const::one() } else { Const::zero() }).collect())
            .collect()
    } else {
        Matrix::from_fn(rows, cols, |i, j| nums[j].coeff(i)).kernel_basis()
    };
    let mut out = Vec::with_capacity(kernel.len());
    for v in kernel {
        let mut g = FieldElement::zero();
        for (t, a) in terms.iter().zip(&v) {
            if !a.is_zero() {
                g = g.plus(&t.times(&FieldElement::constant(a.clone())));
            }
        }
        out.push((g, v[n..].to_vec()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Tower;

    fn op(t: &Tower, cs: &[&str]) -> DiffOperator {
        DiffOperator::new(cs.iter().map(|s| t.parse_element(s).unwrap()).collect()).unwrap()
    }

    fn sols(t: &Tower, cs: &[&str]) -> Vec<FieldElement> {
        rational_solutions(&op(t, cs), &SolveOptions::default()).unwrap().basis
    }

    #[test]
    fn simple_operators() {
        let t = Tower::rationals();
        assert_eq!(sols(&t, &["0", "1"]), vec![FieldElement::one()]);
        assert_eq!(sols(&t, &["-2", "x"]), vec![t.parse_element("x^2").unwrap()]);
        assert_eq!(sols(&t, &["0", "0", "1"]).len(), 2);
        assert!(sols(&t, &["-1", "1"]).is_empty());
    }

    #[test]
    fn poles_found() {
        let t = Tower::rationals();
        // y = 1/x^3: x y' + 3 y = 0
        assert_eq!(sols(&t, &["3", "x"]), vec![t.parse_element("1/x^3").unwrap()]);
        // y = 1/(x^2+1): (x^2+1) y' + 2x y = 0, irreducible factor of degree 2
        assert_eq!(sols(&t, &["2*x", "x^2 + 1"]), vec![t.parse_element("1/(x^2+1)").unwrap()]);
    }

    #[test]
    fn parameter_dependent_exponent() {
        let mut t = Tower::rationals();
        t.adjoin_parameter("m").unwrap();
        // y' = (m/x) y has no rational solution for formal m
        assert!(sols(&t, &["-m/x", "1"]).is_empty());
        // y' = ((m+1)/(2x) - (m-3)/(2x)) y = 2/x y gives x^2
        assert_eq!(sols(&t, &["-(m+1)/(2*x) + (m-3)/(2*x)", "1"]), vec![t.parse_element("x^2").unwrap()]);
    }
}
