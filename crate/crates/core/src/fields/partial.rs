use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::constant::Const;
use super::poly::{integer_roots, Field, Poly};
use super::ratfunc::RatFunc;
use super::FieldError;

const ROOT_SEARCH_LIMIT: u64 = 1_000_000;

/// f = poly + Σ numerator / factor^power, factors pairwise coprime and monic,
/// deg numerator < deg factor.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFraction {
    pub poly: Poly<Const>,
    pub terms: Vec<PartialTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialTerm {
    pub factor: Poly<Const>,
    pub power: usize,
    pub numerator: Poly<Const>,
}

impl PartialFraction {
    pub fn to_ratfunc(&self) -> RatFunc<Const> {
        let mut acc = RatFunc::from_poly(self.poly.clone());
        for t in &self.terms {
            let term = RatFunc::new(t.numerator.clone(), t.factor.pow(t.power as u32)).expect("nonzero factor");
            acc = acc.plus(&term);
        }
        acc
    }
}

/// Integer roots shared by all rational components of a polynomial with constant coefficients.
/// `None` if the polynomial is zero or the search bound is exceeded.
pub fn const_integer_roots(coeffs: &[Const], limit: u64) -> Option<Vec<BigInt>> {
    let comps: Vec<Vec<BigRational>> = Const::rational_components(coeffs)
        .into_iter()
        .filter(|c| c.iter().any(|q| !Zero::is_zero(q)))
        .collect();
    let (first, rest) = comps.split_first()?;
    let mut roots = integer_roots(first, limit)?;
    for c in rest {
        roots.retain(|r| Zero::is_zero(&eval_rational(c, &BigRational::from_integer(r.clone()))));
    }
    Some(roots)
}

fn eval_rational(c: &[BigRational], at: &BigRational) -> BigRational {
    let mut acc = <BigRational as Zero>::zero();
    for q in c.iter().rev() {
        acc = acc * at + q;
    }
    acc
}

/// Rational roots of a polynomial over C (roots lying in ℚ).
pub(crate) fn rational_roots(p: &Poly<Const>) -> Vec<BigRational> {
    let comps: Vec<Vec<BigRational>> = Const::rational_components(p.coeffs())
        .into_iter()
        .filter(|c| c.iter().any(|q| !Zero::is_zero(q)))
        .collect();
    let Some(first) = comps.iter().min_by_key(|c| c.iter().rposition(|q| !Zero::is_zero(q))) else {
        return Vec::new();
    };
    let n = first.iter().rposition(|q| !Zero::is_zero(q)).unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    // integer coefficients, then y = c_n x turns it monic
    let mut lcm = BigInt::one();
    for q in first {
        lcm = lcm.lcm(q.denom());
    }
    let ints: Vec<BigInt> = first[..=n].iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let cn = ints[n].clone();
    let mut monic = Vec::with_capacity(n + 1);
    let mut pw = BigInt::one();
    for k in (0..=n).rev() {
        // coefficient of y^k is ints[k] * cn^(n-1-k) for k < n, 1 for k = n
        if k == n {
            monic.push(<BigRational as One>::one());
        } else {
            monic.push(BigRational::from_integer(&ints[k] * &pw));
            pw *= &cn;
        }
    }
    monic.reverse();
    let Some(ys) = integer_roots(&monic, ROOT_SEARCH_LIMIT) else {
        return Vec::new();
    };
    let mut out: Vec<BigRational> = ys.into_iter().map(|y| BigRational::new(y, cn.clone())).collect();
    out.retain(|a| comps.iter().all(|c| Zero::is_zero(&eval_rational(c, a))));
    out.sort();
    out.dedup();
    out
}

/// Squarefree factorization refined by splitting off ℚ-rational linear factors.
pub(crate) fn coprime_factors(d: &Poly<Const>) -> Result<Vec<(Poly<Const>, usize)>, FieldError> {
    let mut out = Vec::new();
    for (f, e) in d.squarefree_decomposition()? {
        if f.is_constant() {
            continue;
        }
        let mut rest = f.monic()?;
        for a in rational_roots(&rest) {
            let lin = Poly::new(vec![Const::Rat(-a), Const::one()]);
            rest = rest.div_exact(&lin)?;
            out.push((lin, e));
        }
        if !rest.is_constant() {
            out.push((rest, e));
        }
    }
    Ok(out)
}

/// Full partial-fraction decomposition over the factors found by [`coprime_factors`].
pub fn partial_fractions(f: &RatFunc<Const>) -> Result<PartialFraction, FieldError> {
    let (poly, proper) = f.split_polynomial_part();
    let mut terms = Vec::new();
    if proper.is_zero() {
        return Ok(PartialFraction { poly, terms });
    }
    let den = proper.den().clone();
    let num = proper.num().clone();
    for (fac, e) in coprime_factors(&den)? {
        let fe = fac.pow(e as u32);
        let cof = den.div_exact(&fe)?;
        // N = num * cof^{-1} mod fe
        let (g, s, _) = cof.ext_gcd(&fe)?;
        debug_assert!(g.is_constant());
        let mut n = num.mul(&s).scale(&g.lc().inverse()?).rem(&fe)?;
        // fac-adic expansion n = Σ a_k fac^k gives a_k / fac^(e-k)
        let mut k = 0;
        while !n.is_zero() {
            let (q, r) = n.div_rem(&fac)?;
            if !r.is_zero() {
                terms.push(PartialTerm { factor: fac.clone(), power: e - k, numerator: r });
            }
            n = q;
            k += 1;
        }
    }
    terms.sort_by(|a, b| a.factor.deg().cmp(&b.factor.deg()).then(b.power.cmp(&a.power)));
    Ok(PartialFraction { poly, terms })
}
