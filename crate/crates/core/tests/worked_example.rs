use std::sync::OnceLock;

use redform::fixtures::{self, Problem};
use redform::reducer::{full_reduce, mrs_driver, DriverOptions, DriverOutput, Mode, ReductionState, Verdict};
use redform::{Field, FieldElement, Matrix, MatrixK, Poly};

fn problem() -> &'static Problem {
    static P: OnceLock<Problem> = OnceLock::new();
    P.get_or_init(fixtures::potential)
}

fn run(mode: Mode) -> DriverOutput {
    let p = problem();
    let opts = DriverOptions { mode, ..Default::default() };
    mrs_driver(&p.system, &p.curve, &p.ve1_gauge, None, 3, &opts).unwrap()
}

fn full() -> &'static DriverOutput {
    static OUT: OnceLock<DriverOutput> = OnceLock::new();
    OUT.get_or_init(|| run(Mode::Full))
}

fn el(s: &str) -> FieldElement {
    problem().tower.parse_element(s).unwrap()
}

fn c2() -> FieldElement {
    el("s*i*(m^2 - 1)/(12*L)")
}

fn sparse(rows: usize, cols: usize, entries: &[(usize, usize, &str)]) -> MatrixK {
    let mut m = Matrix::zeros(rows, cols);
    for &(r, c, v) in entries {
        m.set(r - 1, c - 1, el(v));
    }
    m
}

#[test]
fn c2_closed_form() {
    assert_eq!(c2(), el("-(m^2 - 1)^2*L/576"));
}

#[test]
fn prereduced_order_two() {
    let r = &full().orders[0];
    let expected = sparse(
        4,
        10,
        &[
            (1, 8, "1/x^3"),
            (1, 9, "1/x^2"),
            (1, 10, "1/x"),
            (2, 8, "-1/x^2"),
            (2, 9, "-1/x"),
            (2, 10, "-1"),
            (3, 3, "1/(x*m)"),
            (3, 4, "1/m"),
            (3, 6, "1/(m*x^2)"),
            (3, 7, "1/(x*m)"),
            (3, 8, "10/3*i*s/(m*x^2)"),
            (3, 9, "10/3*i*s/(x*m)"),
            (3, 10, "10/3*i*s/m"),
            (4, 3, "-1/(m*x^2)"),
            (4, 4, "-1/(x*m)"),
            (4, 6, "-1/(m*x^3)"),
            (4, 7, "-1/(m*x^2)"),
            (4, 8, "-10/3*i*s/(m*x^3)"),
            (4, 9, "-10/3*i*s/(m*x^2)"),
            (4, 10, "-10/3*i*s/(x*m)"),
        ],
    );
    assert_eq!(r.state.prereduced.off_diagonal(), expected.scale(&c2()));
}

#[test]
fn order_two_spectrum_and_reduced_form() {
    let r = &full().orders[0];
    assert_eq!(r.sub_dim(), 10);
    let f = el("(m + 1)/(2*x)");
    let expected: Vec<FieldElement> = (-3..=3).map(|k| f.scale_int(k)).collect();
    assert_eq!(r.eigenvalues(), expected);
    assert!(r.state.adjoint.is_diagonalizable());
    let reduced = sparse(4, 10, &[(2, 9, "-1/x"), (3, 3, "1/(x*m)"), (4, 4, "-1/(x*m)")]).scale(&c2());
    assert_eq!(r.reduced().off_diagonal(), reduced);
    assert_eq!(r.lie.dim(), 1);
    assert!(r.lie.abelian);
    assert_eq!(r.envelope_dim, Some(2));
}

fn minimal_polynomial(roots: &[(i64, u32)]) -> Poly<FieldElement> {
    let f = el("(m + 1)/(2*x)");
    let mut p = Poly::one();
    for &(k, e) in roots {
        p = p.mul(&Poly::new(vec![f.scale_int(-k), FieldElement::one()]).pow(e));
    }
    p
}

#[test]
fn order_three() {
    let out = full();
    assert_eq!(out.verdict, Verdict::AbelianUpTo { order: 3 });
    let r = &out.orders[1];
    assert_eq!(r.sub_dim(), 29);
    assert!(!r.state.adjoint.is_diagonalizable());
    let pi = minimal_polynomial(&[(0, 2), (1, 2), (-1, 2), (2, 2), (-2, 2), (3, 2), (-3, 2), (4, 1), (-4, 1)]);
    assert_eq!(r.minimal_polynomial(), pi);
    let m3 = sparse(
        10,
        20,
        &[
            (2, 9, "-1"),
            (3, 3, "2/m"),
            (4, 4, "-2/m"),
            (5, 15, "-1"),
            (6, 6, "1/m"),
            (6, 18, "-2"),
            (7, 7, "-1/m"),
            (7, 19, "-2"),
            (8, 8, "2/m"),
            (10, 10, "-2/m"),
        ],
    );
    let off = r.reduced().off_diagonal();
    // rows of the sym² block; the constant 2/3 is the top-block normalization
    assert_eq!(off.block(0, 10, 0, 20), m3.scale(&c2().times(&el("2/(3*x)"))));
    assert_eq!(r.lie.dim(), 1);
    assert!(r.lie.abelian);
    assert_eq!(r.envelope_dim, Some(2));
}

#[test]
fn reduction_invariants() {
    for r in &full().orders {
        let st = &r.state;
        assert!(st.log.iter().all(|s| s.closed_form_matches));
        assert_eq!(st.gauge.apply(&st.prereduced.matrix).unwrap(), st.current.matrix);
        assert_eq!(r.total_gauge.apply(&r.lve.matrix).unwrap(), st.current.matrix);
        // diagonal blocks untouched
        assert_eq!(st.current.top_block(), st.prereduced.top_block());
        assert_eq!(st.current.lower_block(), st.prereduced.lower_block());
        for space in 0..st.spaces() {
            for level in 1..=st.depth(space) {
                assert_eq!(st.removable_dimension(space, level, &Default::default()).unwrap(), 0);
            }
        }
        let mut again = ReductionState::new(st.current.clone()).unwrap();
        full_reduce(&mut again, &Default::default()).unwrap();
        assert!(again.gauge.matrix().is_identity());
        assert_eq!(again.current, st.current);
    }
}

#[test]
fn simplified_mode_agrees() {
    let out = run(Mode::Simplified);
    assert_eq!(out.verdict, Verdict::AbelianUpTo { order: 3 });
    for (a, b) in out.orders.iter().zip(&full().orders) {
        assert_eq!(a.sub_dim(), b.sub_dim());
        assert!(a.lie.abelian);
    }
}

#[test]
fn stated_reduced_form_is_checked() {
    let p = problem();
    let f = el("(m + 1)/(2*x)");
    let good = Matrix::diagonal(&[el("0"), el("0"), f.clone(), f.negate()]);
    let opts = DriverOptions::default();
    assert!(mrs_driver(&p.system, &p.curve, &p.ve1_gauge, Some(&good), 1, &opts).is_ok());
    let bad = Matrix::diagonal(&[el("0"), el("0"), f.clone(), f.clone()]);
    assert!(matches!(
        mrs_driver(&p.system, &p.curve, &p.ve1_gauge, Some(&bad), 1, &opts),
        Err(redform::ReducerError::Ve1NotReduced(_))
    ));
}
