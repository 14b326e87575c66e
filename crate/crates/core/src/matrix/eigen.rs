use std::cmp::Ordering;

use crate::fields::{format_poly, Const, Field, FieldElement, Poly};

use super::{Matrix, MatrixC, MatrixError, Span};

/// A joint generalized eigenspace of commuting constant maps with its nilpotent flag.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpace {
    /// Eigenvalue of each map.
    pub mu: Vec<Const>,
    /// Σ g_i μ_i.
    pub lambda: FieldElement,
    /// `levels[l]` is an echelon basis of E^(l+1) (cumulative), in ambient coordinates.
    pub levels: Vec<Vec<Vec<Const>>>,
}

impl JointSpace {
    pub fn dim(&self) -> usize {
        self.levels.last().map_or(0, |l| l.len())
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Basis of E^(l) modulo E^(l-1) (1-based level): echelon rows of E^(l) not in the span of
    /// E^(l-1), chosen greedily.
    pub fn level_complement(&self, l: usize) -> Vec<Vec<Const>> {
        let dim = self.levels.first().and_then(|b| b.first()).map_or(0, |v| v.len());
        let mut span = Span::new(dim);
        if l >= 2 {
            for v in &self.levels[l - 2] {
                span.insert(v);
            }
        }
        let mut out = Vec::new();
        for v in &self.levels[l - 1] {
            if span.insert(v) {
                out.push(v.clone());
            }
        }
        out
    }
}

pub(crate) fn cmp_tuple(a: &[Const], b: &[Const]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.canonical_cmp(y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Matrix of `m` restricted to the invariant subspace spanned by `basis`.
fn restrict(m: &MatrixC, basis: &[Vec<Const>]) -> MatrixC {
    let mut span = Span::new(m.rows());
    for v in basis {
        span.insert(v);
    }
    let k = basis.len();
    let mut r = Matrix::zeros(k, k);
    for (j, v) in basis.iter().enumerate() {
        let img = m.mul_vec(v);
        let c = span.coordinates(&img).expect("subspace is invariant");
        for (i, x) in c.into_iter().enumerate() {
            r.set(i, j, x);
        }
    }
    r
}

fn combine(basis: &[Vec<Const>], coords: &[Const]) -> Vec<Const> {
    let n = basis.first().map_or(0, |v| v.len());
    let mut out = vec![Const::zero(); n];
    for (c, v) in coords.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        for (a, b) in out.iter_mut().zip(v) {
            if !b.is_zero() {
                *a = a.plus(&c.times(b));
            }
        }
    }
    out
}

fn shifted(r: &MatrixC, mu: &Const) -> MatrixC {
    let mut n = r.clone();
    for i in 0..r.rows() {
        let v = n.get(i, i).minus(mu);
        n.set(i, i, v);
    }
    n
}

/// Generalized eigenspace ker (r - μ)^∞.
fn generalized_kernel(r: &MatrixC, mu: &Const) -> Vec<Vec<Const>> {
    let n = shifted(r, mu);
    let mut power = n.clone();
    let mut k = power.kernel_basis();
    if k.is_empty() {
        return k;
    }
    loop {
        power = power.mul(&n);
        let k2 = power.kernel_basis();
        if k2.len() == k.len() {
            return k;
        }
        k = k2;
    }
}

/// Split T^m into generalized eigenspaces of r, using `hints` as eigenvalue candidates.
fn eigen_split(r: &MatrixC, hints: &[Const]) -> Result<Vec<(Const, Vec<Vec<Const>>)>, MatrixError> {
    let m = r.rows();
    let mut found: Vec<(Const, Vec<Vec<Const>>)> = Vec::new();
    let mut total = 0;
    let mut tried: Vec<Const> = Vec::new();
    let mut try_mu = |mu: &Const, found: &mut Vec<(Const, Vec<Vec<Const>>)>, total: &mut usize| {
        if tried.contains(mu) {
            return;
        }
        tried.push(mu.clone());
        let k = generalized_kernel(r, mu);
        if !k.is_empty() {
            *total += k.len();
            found.push((mu.clone(), k));
        }
    };
    for h in hints {
        if total == m {
            break;
        }
        try_mu(h, &mut found, &mut total);
    }
    if total < m {
        let mut rest = r.minimal_polynomial()?;
        for (mu, _) in &found {
            let lin = Poly::new(vec![mu.negate(), Const::one()]);
            while let Ok(q) = rest.div_exact(&lin) {
                rest = q;
            }
        }
        let roots = crate::fields::rational_roots(&rest);
        let mut extra: Vec<Const> = roots.into_iter().map(Const::Rat).collect();
        if rest.deg() == 1 {
            extra.push(rest.coeff(0).negate());
        }
        for mu in &extra {
            try_mu(mu, &mut found, &mut total);
        }
        if total < m {
            for (mu, _) in &found {
                let lin = Poly::new(vec![mu.negate(), Const::one()]);
                while let Ok(q) = rest.div_exact(&lin) {
                    rest = q;
                }
            }
            return Err(MatrixError::EigenvalueOutsideTower { factor: format_poly(&rest, "X") });
        }
    }
    Ok(found)
}

/// Joint nilpotent flag of commuting nilpotent maps on T^m: E^(l) = {v : N_i v ∈ E^(l-1) ∀i}.
fn nilpotent_flag(ns: &[MatrixC], m: usize) -> Vec<Vec<Vec<Const>>> {
    let mut levels: Vec<Vec<Vec<Const>>> = Vec::new();
    let mut current: Vec<Vec<Const>> = Vec::new();
    loop {
        // projection with kernel span(current)
        let mut span = Span::new(m);
        for v in &current {
            span.insert(v);
        }
        let mut basis = current.clone();
        for i in 0..m {
            let mut e = vec![Const::zero(); m];
            e[i] = Const::one();
            if span.insert(&e) {
                basis.push(e);
            }
        }
        let t = Matrix::from_fn(m, m, |i, j| basis[j][i].clone());
        let tinv = t.inverse().expect("basis");
        let proj = tinv.block(current.len(), m, 0, m);
        let mut stacked: Vec<Vec<Const>> = Vec::new();
        for n in ns {
            let pn = proj.mul(n);
            for i in 0..pn.rows() {
                stacked.push(pn.row(i).to_vec());
            }
        }
        let next = if stacked.is_empty() {
            (0..m).map(|i| {
                let mut e = vec![Const::zero(); m];
                e[i] = Const::one();
                e
            }).collect()
        } else {
            Matrix::from_rows(stacked).kernel_basis()
        };
        assert!(next.len() > current.len(), "maps are not nilpotent on the joint space");
        let done = next.len() == m;
        levels.push(next.clone());
        current = next;
        if done {
            return levels;
        }
    }
}

/// Joint generalized eigenspaces of pairwise-commuting constant maps Ψ_i, with eigenvalues
/// λ = Σ g_i μ_i and their flags. `hints` are candidate eigenvalues tried before falling back on
/// the minimal polynomial. Output sorted by the canonical order on (μ_1, …).
pub fn joint_characteristic_spaces(
    maps: &[MatrixC],
    weights: &[FieldElement],
    hints: &[Const],
) -> Result<Vec<JointSpace>, MatrixError> {
    if maps.len() != weights.len() {
        return Err(MatrixError::DimensionMismatch("one weight per map".into()));
    }
    let Some(first) = maps.first() else {
        return Err(MatrixError::DimensionMismatch("at least one map is required".into()));
    };
    let d = first.rows();
    for (i, a) in maps.iter().enumerate() {
        if !a.is_square() || a.rows() != d {
            return Err(MatrixError::DimensionMismatch(format!("map {i} is not {d}x{d}")));
        }
        for (j, b) in maps.iter().enumerate().skip(i + 1) {
            if !a.bracket(b).is_zero() {
                return Err(MatrixError::NonCommuting(i, j));
            }
        }
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let whole: Vec<Vec<Const>> = (0..d)
        .map(|i| {
            let mut e = vec![Const::zero(); d];
            e[i] = Const::one();
            e
        })
        .collect();
    let mut spaces: Vec<(Vec<Const>, Vec<Vec<Const>>)> = vec![(Vec::new(), whole)];
    for map in maps {
        let mut next = Vec::new();
        for (mu, basis) in spaces {
            let r = restrict(map, &basis);
            for (m, coords) in eigen_split(&r, hints)? {
                let sub: Vec<Vec<Const>> = coords.iter().map(|c| combine(&basis, c)).collect();
                let mut mu2 = mu.clone();
                mu2.push(m);
                next.push((mu2, sub));
            }
        }
        spaces = next;
    }
    let mut out = Vec::new();
    for (mu, basis) in spaces {
        let k = basis.len();
        let ns: Vec<MatrixC> = maps.iter().zip(&mu).map(|(a, m)| shifted(&restrict(a, &basis), m)).collect();
        let flag = nilpotent_flag(&ns, k);
        let levels = flag
            .into_iter()
            .map(|lvl| {
                let mut span = Span::new(d);
                for c in &lvl {
                    span.insert(&combine(&basis, c));
                }
                span.echelon_basis()
            })
            .collect();
        let mut lambda = FieldElement::zero();
        for (g, m) in weights.iter().zip(&mu) {
            lambda = lambda.plus(&g.times(&FieldElement::constant(m.clone())));
        }
        out.push(JointSpace { mu, lambda, levels });
    }
    out.sort_by(|a, b| cmp_tuple(&a.mu, &b.mu));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Tower;

    fn c(n: i64) -> Const {
        Const::from_int(n)
    }

    #[test]
    fn zero_map_single_space() {
        let z = MatrixC::zeros(3, 3);
        let s = joint_characteristic_spaces(&[z], &[FieldElement::one()], &[]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mu, vec![c(0)]);
        assert_eq!(s[0].depth(), 1);
        assert_eq!(s[0].dim(), 3);
    }

    #[test]
    fn two_commuting_maps() {
        let t = Tower::rationals();
        let a = Matrix::diagonal(&[c(1), c(2)]);
        let b = Matrix::diagonal(&[c(3), c(3)]);
        let g = vec![t.parse_element("1/x").unwrap(), FieldElement::one()];
        let s = joint_characteristic_spaces(&[a, b], &g, &[]).unwrap();
        let lams: Vec<FieldElement> = s.iter().map(|j| j.lambda.clone()).collect();
        assert_eq!(lams, vec![t.parse_element("1/x + 3").unwrap(), t.parse_element("2/x + 3").unwrap()]);
    }

    #[test]
    fn jordan_block_flag() {
        let a = Matrix::from_rows(vec![vec![c(2), c(1), c(0)], vec![c(0), c(2), c(0)], vec![c(0), c(0), c(5)]]);
        let s = joint_characteristic_spaces(&[a.clone()], &[FieldElement::one()], &[c(5)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].mu, vec![c(2)]);
        assert_eq!(s[0].depth(), 2);
        assert_eq!(s[0].level_complement(2).len(), 1);
        // (A - 2)^l kills E^(l)
        let n = shifted(&a, &c(2));
        for v in &s[0].levels[0] {
            assert!(n.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        for v in &s[0].levels[1] {
            assert!(n.mul(&n).mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn outside_tower_is_reported() {
        let a = Matrix::from_rows(vec![vec![c(0), c(2)], vec![c(1), c(0)]]);
        match joint_characteristic_spaces(&[a], &[FieldElement::one()], &[]) {
            Err(MatrixError::EigenvalueOutsideTower { factor }) => assert_eq!(factor, "X^2 - 2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_commuting_rejected() {
        let a = Matrix::unit(2, 2, 0, 1);
        let b = Matrix::unit(2, 2, 1, 0);
        let g = vec![FieldElement::one(), FieldElement::one()];
        assert_eq!(joint_characteristic_spaces(&[a, b], &g, &[]), Err(MatrixError::NonCommuting(0, 1)));
    }
}
