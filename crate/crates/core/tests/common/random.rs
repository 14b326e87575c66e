//! Seeded random instances over Q(x).

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use redform::reducer::ReductionState;
use redform::variational::sym_power;
use redform::{BlockSystem, Const, Field, FieldElement, Matrix, MatrixK, Poly};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn small(rng: &mut StdRng) -> Const {
    Const::from_int(rng.gen_range(-3..=3))
}

fn nonzero(rng: &mut StdRng) -> Const {
    let n = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let d = rng.gen_range(1..=2);
    Const::rational(n, d)
}

pub fn poly(rng: &mut StdRng, max_deg: usize) -> Poly<Const> {
    let d = rng.gen_range(0..=max_deg);
    Poly::new((0..=d).map(|_| small(rng)).collect())
}

const DENOMINATORS: [&[i64]; 6] = [&[1], &[0, 1], &[1, 1], &[0, 0, 1], &[0, -1, 1], &[1, 0, 1]];

pub fn ratfunc(rng: &mut StdRng) -> FieldElement {
    let den = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
    let den = Poly::new(den.iter().map(|&c| Const::from_int(c)).collect());
    FieldElement::new(poly(rng, 2), den).unwrap()
}

pub fn matrix(rng: &mut StdRng, n: usize) -> MatrixK {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, ratfunc(rng));
        }
    }
    m
}

/// L·D·U with unit triangular L, U and a diagonal of nonzero constants times 1, x or x + 1.
pub fn invertible(rng: &mut StdRng, n: usize) -> MatrixK {
    ldu(rng, n, ratfunc)
}

/// Like `invertible` with linear polynomial entries in L and U, for the larger symmetric powers.
pub fn small_invertible(rng: &mut StdRng, n: usize) -> MatrixK {
    ldu(rng, n, |r| FieldElement::from_poly(poly(r, 1)))
}

fn ldu(rng: &mut StdRng, n: usize, entry: impl Fn(&mut StdRng) -> FieldElement) -> MatrixK {
    let mut l: MatrixK = Matrix::identity(n);
    let mut u: MatrixK = Matrix::identity(n);
    let mut d: MatrixK = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(0.7) {
                l.set(i, j, entry(rng));
            }
            if rng.gen_bool(0.7) {
                u.set(j, i, entry(rng));
            }
        }
        let shape = match rng.gen_range(0..3) {
            0 => Poly::one(),
            1 => Poly::x(),
            _ => Poly::new(vec![Const::one(), Const::one()]),
        };
        d.set(i, i, FieldElement::from_poly(shape.scale(&nonzero(rng))));
    }
    l.mul(&d).mul(&u)
}

/// Order-2 block system over 2 variables: diagonal blocks sym²(D), D with D = a/x·diag(1, −1)
/// or, half the time, D = [[0, 0], [a/x, 0]], and a random coupling block.
pub fn synthetic_system(rng: &mut StdRng) -> BlockSystem {
    let a = FieldElement::constant(nonzero(rng)).times(&FieldElement::var().inverse().unwrap());
    let mut d1: MatrixK = Matrix::diagonal(&[a.clone(), a.negate()]);
    if rng.gen_bool(0.5) {
        d1 = Matrix::diagonal(&[FieldElement::zero(), FieldElement::zero()]);
        d1.set(1, 0, a.clone());
    }
    let top = sym_power(&d1, 2).unwrap();
    let mut m: MatrixK = Matrix::block_diag(&[&top, &d1]);
    for r in 3..5 {
        for c in 0..3 {
            if rng.gen_bool(0.6) {
                m.set(r, c, ratfunc(rng));
            }
        }
    }
    BlockSystem { order: 2, nvars: 2, matrix: m }
}

pub fn synthetic_state(seed: u64) -> ReductionState {
    ReductionState::new(synthetic_system(&mut rng(seed))).unwrap()
}
