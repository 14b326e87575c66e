use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Field, Poly};
use super::ratfunc::RatFunc;
use super::FieldError;

/// One step of the constant tower: an algebraic generator (with monic minimal polynomial over
/// the layers below) or a transcendental parameter.
pub struct Layer {
    index: usize,
    name: String,
    minpoly: Option<Poly<Const>>,
}

impl Layer {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn minpoly(&self) -> Option<&Poly<Const>> {
        self.minpoly.as_ref()
    }

    pub fn is_algebraic(&self) -> bool {
        self.minpoly.is_some()
    }
}

impl PartialEq for Layer {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.name == other.name
    }
}

impl Eq for Layer {}

impl Hash for Layer {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.index.hash(state);
    }
}

impl fmt::Debug for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Element of the constant field C.
///
/// Every value is stored at the lowest layer that contains it, so structural equality is
/// field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Const {
    Rat(BigRational),
    /// Polynomial in the generator, reduced modulo the minimal polynomial, degree ≥ 1.
    Alg(Arc<Layer>, Poly<Const>),
    /// Rational function in the parameter, genuinely non-constant.
    Tr(Arc<Layer>, Box<RatFunc<Const>>),
}

impl Const {
    pub fn rational(n: i64, d: i64) -> Const {
        Const::Rat(BigRational::new(n.into(), d.into()))
    }

    pub fn level(&self) -> usize {
        match self {
            Const::Rat(_) => 0,
            Const::Alg(l, _) | Const::Tr(l, _) => l.index + 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Const::Rat(q) => Some(q),
            _ => None,
        }
    }

    fn layer(&self) -> Option<&Arc<Layer>> {
        match self {
            Const::Rat(_) => None,
            Const::Alg(l, _) | Const::Tr(l, _) => Some(l),
        }
    }

    fn make_alg(layer: &Arc<Layer>, p: Poly<Const>) -> Const {
        if p.is_constant() {
            p.coeff(0)
        } else {
            Const::Alg(layer.clone(), p)
        }
    }

    fn make_tr(layer: &Arc<Layer>, f: RatFunc<Const>) -> Const {
        match f.as_constant() {
            Some(c) => c,
            None => Const::Tr(layer.clone(), Box::new(f)),
        }
    }

    fn reduce_alg(layer: &Arc<Layer>, p: Poly<Const>) -> Const {
        let m = layer.minpoly.as_ref().expect("algebraic layer");
        let r = if p.deg() >= m.deg() { p.rem(m).expect("monic minimal polynomial") } else { p };
        Const::make_alg(layer, r)
    }

    /// Representation as a polynomial in the generator of `layer` (self must live at or below it).
    fn alg_poly(&self, layer: &Arc<Layer>) -> Poly<Const> {
        match self {
            Const::Alg(l, p) if l == layer => p.clone(),
            _ => Poly::constant(self.clone()),
        }
    }

    fn tr_func(&self, layer: &Arc<Layer>) -> RatFunc<Const> {
        match self {
            Const::Tr(l, f) if l == layer => (**f).clone(),
            _ => RatFunc::constant(self.clone()),
        }
    }

    /// Sign in the lexicographic ordering: highest generator power first, parameters ordered
    /// as if they tend to +∞. Compatible with addition, so it induces a total order.
    pub fn sign(&self) -> Ordering {
        match self {
            Const::Rat(q) => {
                if q.is_positive() {
                    Ordering::Greater
                } else if q.is_negative() {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
            Const::Alg(_, p) => p.lc().sign(),
            Const::Tr(_, f) => f.num().lc().sign(),
        }
    }

    /// Canonical total order (deterministic, used to sort eigenvalues).
    pub fn canonical_cmp(&self, other: &Const) -> Ordering {
        self.minus(other).sign()
    }

    /// Split a list of constants into rational component vectors: an integer s satisfies
    /// Σ v_k s^k = 0 iff every returned vector r gives Σ r_k s^k = 0.
    pub fn rational_components(values: &[Const]) -> Vec<Vec<BigRational>> {
        let top = values.iter().filter_map(|v| v.layer()).max_by_key(|l| l.index).cloned();
        let layer = match top {
            None => {
                let row: Vec<BigRational> =
                    values.iter().map(|v| v.as_rational().cloned().expect("rational")).collect();
                return vec![row];
            }
            Some(l) => l,
        };
        let mut out = Vec::new();
        if layer.is_algebraic() {
            let polys: Vec<Poly<Const>> = values.iter().map(|v| v.alg_poly(&layer)).collect();
            let n = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
            for j in 0..n {
                let col: Vec<Const> = polys.iter().map(|p| p.coeff(j)).collect();
                if col.iter().all(|c| c.is_zero()) {
                    continue;
                }
                out.extend(Const::rational_components(&col));
            }
        } else {
            let funcs: Vec<RatFunc<Const>> = values.iter().map(|v| v.tr_func(&layer)).collect();
            let mut den = Poly::one();
            for f in &funcs {
                let g = den.gcd(f.den()).expect("gcd");
                den = den.mul(&f.den().div_exact(&g).expect("exact"));
            }
            let nums: Vec<Poly<Const>> = funcs
                .iter()
                .map(|f| f.num().mul(&den.div_exact(f.den()).expect("exact")))
                .collect();
            let n = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
            for j in 0..n {
                let col: Vec<Const> = nums.iter().map(|p| p.coeff(j)).collect();
                if col.iter().all(|c| c.is_zero()) {
                    continue;
                }
                out.extend(Const::rational_components(&col));
            }
        }
        out
    }

    /// True if the string form is a top-level sum (needs parentheses as a factor).
    pub(crate) fn is_sum(&self) -> bool {
        match self {
            Const::Rat(_) => false,
            Const::Alg(_, p) => p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 || p.lc().is_sum(),
            Const::Tr(_, f) => {
                f.den().is_one() && (f.num().coeffs().iter().filter(|c| !c.is_zero()).count() > 1 || f.num().lc().is_sum())
            }
        }
    }
}

impl Field for Const {
    fn zero() -> Self {
        Const::Rat(<BigRational as Zero>::zero())
    }

    fn one() -> Self {
        Const::Rat(<BigRational as One>::one())
    }

    fn is_zero(&self) -> bool {
        matches!(self, Const::Rat(q) if Zero::is_zero(q))
    }

    fn is_one(&self) -> bool {
        matches!(self, Const::Rat(q) if One::is_one(q))
    }

    fn plus(&self, rhs: &Self) -> Self {
        if let (Const::Rat(a), Const::Rat(b)) = (self, rhs) {
            return Const::Rat(a + b);
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.level() >= rhs.level() { (self, rhs) } else { (rhs, self) };
        let same = hi.level() == lo.level();
        match hi {
            Const::Alg(l, p) => {
                let q = if same { p.add(&lo.alg_poly(l)) } else { p.add(&Poly::constant(lo.clone())) };
                Const::make_alg(l, q)
            }
            Const::Tr(l, f) => Const::make_tr(l, f.plus(&lo.tr_func(l))),
            Const::Rat(_) => unreachable!(),
        }
    }

    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negate())
    }

    fn times(&self, rhs: &Self) -> Self {
        if let (Const::Rat(a), Const::Rat(b)) = (self, rhs) {
            return Const::Rat(a * b);
        }
        if self.is_zero() || rhs.is_zero() {
            return Const::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        let (hi, lo) = if self.level() >= rhs.level() { (self, rhs) } else { (rhs, self) };
        let same = hi.level() == lo.level();
        match hi {
            Const::Alg(l, p) => {
                if same {
                    Const::reduce_alg(l, p.mul(&lo.alg_poly(l)))
                } else {
                    Const::make_alg(l, p.scale(lo))
                }
            }
            Const::Tr(l, f) => Const::make_tr(l, f.times(&lo.tr_func(l))),
            Const::Rat(_) => unreachable!(),
        }
    }

    fn negate(&self) -> Self {
        match self {
            Const::Rat(q) => Const::Rat(-q),
            Const::Alg(l, p) => Const::Alg(l.clone(), p.neg()),
            Const::Tr(l, f) => Const::Tr(l.clone(), Box::new(f.negate())),
        }
    }

    fn inverse(&self) -> Result<Self, FieldError> {
        match self {
            Const::Rat(q) => {
                if Zero::is_zero(q) {
                    Err(FieldError::DivisionByZero("0".into()))
                } else {
                    Ok(Const::Rat(q.recip()))
                }
            }
            Const::Alg(l, p) => {
                let m = l.minpoly.as_ref().expect("algebraic layer");
                let (g, s, _) = p.ext_gcd(m)?;
                if !g.is_constant() {
                    return Err(FieldError::NonInvertibleAlgebraic {
                        generator: l.name.clone(),
                        factor: super::expr::format_poly(&g, &l.name),
                    });
                }
                Ok(Const::reduce_alg(l, s))
            }
            Const::Tr(l, f) => Ok(Const::make_tr(l, f.inverse()?)),
        }
    }

    fn from_rational(q: &BigRational) -> Self {
        Const::Rat(q.clone())
    }
}

impl fmt::Debug for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Rat(q) => write!(f, "{}", q),
            Const::Alg(l, p) => write!(f, "{}", super::expr::format_poly(p, &l.name)),
            Const::Tr(l, r) => write!(f, "{}", super::expr::format_ratfunc(r, &l.name)),
        }
    }
}

/// The constant field: ℚ followed by an ordered list of layers.
#[derive(Clone, Default)]
pub struct Tower {
    layers: Vec<Arc<Layer>>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.layers.iter().map(|l| (&l.name, &l.minpoly))).finish()
    }
}

impl Tower {
    pub fn rationals() -> Tower {
        Tower { layers: Vec::new() }
    }

    pub fn layers(&self) -> &[Arc<Layer>] {
        &self.layers
    }

    fn check_name(&self, name: &str) -> Result<(), FieldError> {
        if name == "x" || self.layers.iter().any(|l| l.name == name) {
            return Err(FieldError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    /// Adjoin a root of a monic polynomial whose coefficients live in the tower built so far.
    /// Irreducibility is trusted; a reducible polynomial surfaces later as NonInvertibleAlgebraic.
    pub fn adjoin_algebraic(&mut self, name: &str, minpoly: Poly<Const>) -> Result<Const, FieldError> {
        self.check_name(name)?;
        if minpoly.deg() < 2 {
            return Err(FieldError::BadMinimalPolynomial(format!("{name}: degree must be at least 2")));
        }
        if !minpoly.lc().is_one() {
            return Err(FieldError::BadMinimalPolynomial(format!("{name}: not monic")));
        }
        if minpoly.coeffs().iter().any(|c| c.level() > self.layers.len()) {
            return Err(FieldError::BadMinimalPolynomial(format!("{name}: coefficient outside the tower")));
        }
        let layer = Arc::new(Layer { index: self.layers.len(), name: name.to_string(), minpoly: Some(minpoly) });
        self.layers.push(layer.clone());
        Ok(Const::Alg(layer, Poly::x()))
    }

    pub fn adjoin_parameter(&mut self, name: &str) -> Result<Const, FieldError> {
        self.check_name(name)?;
        let layer = Arc::new(Layer { index: self.layers.len(), name: name.to_string(), minpoly: None });
        self.layers.push(layer.clone());
        Ok(Const::Tr(layer, Box::new(RatFunc::var())))
    }

    pub fn generator(&self, name: &str) -> Option<Const> {
        let l = self.layers.iter().find(|l| l.name == name)?;
        Some(if l.is_algebraic() { Const::Alg(l.clone(), Poly::x()) } else { Const::Tr(l.clone(), Box::new(RatFunc::var())) })
    }

    pub fn names(&self) -> Vec<String> {
        self.layers.iter().map(|l| l.name.clone()).collect()
    }

    /// True if the value only uses layers of this tower.
    pub fn contains(&self, c: &Const) -> bool {
        match c.layer() {
            None => true,
            Some(l) => self.layers.get(l.index).is_some_and(|m| Arc::ptr_eq(m, l)),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Const {
        Const::from_int(n)
    }

    fn i_sqrt3() -> (Tower, Const, Const) {
        let mut t = Tower::rationals();
        let i = t.adjoin_algebraic("i", Poly::new(vec![q(1), q(0), q(1)])).unwrap();
        let s = t.adjoin_algebraic("s", Poly::new(vec![q(-3), q(0), q(1)])).unwrap();
        (t, i, s)
    }

    #[test]
    fn tower_relations() {
        let (_, i, s) = i_sqrt3();
        let is = i.times(&s);
        assert_eq!(is.times(&is), q(-3));
        assert_eq!(i.times(&i), q(-1));
        assert_eq!(is.inverse().unwrap().times(&is), q(1));
        let a = i.plus(&s).plus(&q(2));
        assert_eq!(a.times(&a.inverse().unwrap()), q(1));
    }

    #[test]
    fn parameters_and_mixed_layers() {
        let (mut t, i, s) = i_sqrt3();
        let m = t.adjoin_parameter("m").unwrap();
        let m2 = m.times(&m).minus(&q(1));
        let c = q(48).times(&s).times(&i).divide(&m2).unwrap();
        let l = t.adjoin_algebraic("L", Poly::new(vec![c.clone(), q(0), q(1)])).unwrap();
        assert_eq!(l.times(&l), c.negate());
        let u = l.plus(&m);
        assert_eq!(u.times(&u.inverse().unwrap()), q(1));
        assert_eq!(m.minus(&m), q(0));
        assert!(q(0).is_zero());
    }

    #[test]
    fn reducible_minpoly_is_reported() {
        let mut t = Tower::rationals();
        let a = t.adjoin_algebraic("a", Poly::new(vec![q(-1), q(0), q(1)])).unwrap();
        let e = a.minus(&q(1));
        match e.inverse() {
            Err(FieldError::NonInvertibleAlgebraic { generator, .. }) => assert_eq!(generator, "a"),
            other => panic!("expected reducibility witness, got {other:?}"),
        }
    }

    #[test]
    fn canonical_order() {
        let mut t = Tower::rationals();
        let m = t.adjoin_parameter("m").unwrap();
        let f = m.plus(&q(1));
        let mut v = vec![f.scale_int(2), q(0), f.scale_int(-3), f.clone()];
        v.sort_by(|a, b| a.canonical_cmp(b));
        assert_eq!(v, vec![f.scale_int(-3), q(0), f.clone(), f.scale_int(2)]);
    }

    #[test]
    fn components_split_independent_parts() {
        let (mut t, i, _) = i_sqrt3();
        let m = t.adjoin_parameter("m").unwrap();
        // (s - 2)(s + 3) with coefficients multiplied by i*m: s^2 + s - 6
        let k = i.times(&m);
        let vals = vec![k.scale_int(-6), k.clone(), k.clone()];
        let comps = Const::rational_components(&vals);
        assert_eq!(comps.len(), 1);
        let r = crate::fields::poly::integer_roots(&comps[0], 100).unwrap();
        assert_eq!(r, vec![num_bigint::BigInt::from(-3), num_bigint::BigInt::from(2)]);
    }
}
