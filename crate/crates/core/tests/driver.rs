mod common;

use common::oracle::oracle_has_solution;
use redform::fixtures;
use redform::reducer::{full_reduce, partial_reduce_level, DriverOptions, Mode, ReductionState};
use redform::variational::{build_lve, first_variational, taylor_field};
use redform::{mrs_driver, Field, FieldElement, Matrix, ReducerError, Verdict, Witness};

fn opts(mode: Mode) -> DriverOptions {
    DriverOptions { mode, ..Default::default() }
}

#[test]
fn obstruction_in_both_modes() {
    let p = fixtures::obstruction();
    for mode in [Mode::Full, Mode::Simplified] {
        let out = mrs_driver(&p.system, &p.curve, &p.ve1_gauge, None, 3, &opts(mode)).unwrap();
        let Verdict::Obstruction { order, witness } = out.verdict else {
            panic!("{mode:?}: expected an obstruction");
        };
        assert_eq!(order, 2);
        assert_eq!(out.orders.len(), 1);
        let Witness::Unremovable { lambda, coefficient, b, .. } = &witness else {
            panic!("{mode:?}: expected an unremovable coordinate, got {witness:?}");
        };
        assert_eq!(*lambda, p.tower.parse_element("1/x").unwrap());
        assert_eq!(lambda, coefficient);
        assert!(witness.brackets_hold());
        assert!(!oracle_has_solution(coefficient, b));
    }
}

#[test]
fn free_particle_is_abelian() {
    let p = fixtures::free_particle();
    for mode in [Mode::Full, Mode::Simplified] {
        let out = mrs_driver(&p.system, &p.curve, &p.ve1_gauge, None, 3, &opts(mode)).unwrap();
        assert_eq!(out.verdict, Verdict::AbelianUpTo { order: 3 });
        assert_eq!(out.orders.len(), 2);
        for r in &out.orders {
            assert!(r.lie.abelian);
        }
    }
}

#[test]
fn first_order_only() {
    let p = fixtures::free_particle();
    let out = mrs_driver(&p.system, &p.curve, &p.ve1_gauge, None, 1, &opts(Mode::Full)).unwrap();
    assert_eq!(out.verdict, Verdict::AbelianUpTo { order: 1 });
    assert!(out.orders.is_empty());
}

#[test]
fn curve_that_is_not_a_solution() {
    let p = fixtures::free_particle();
    let bad: Vec<FieldElement> = ["x^2", "1"].iter().map(|s| p.tower.parse_element(s).unwrap()).collect();
    let err = mrs_driver(&p.system, &bad, &p.ve1_gauge, None, 2, &opts(Mode::Full)).unwrap_err();
    assert!(matches!(err, ReducerError::CurveNotSolution { component: 0, .. }), "{err:?}");
    assert!(!err.is_capacity());
}

#[test]
fn gauge_that_does_not_reduce() {
    // singular gauge, then a stated form the gauge does not produce
    let p = fixtures::free_particle();
    let singular = Matrix::from_rows(vec![
        vec![FieldElement::one(), FieldElement::one()],
        vec![FieldElement::one(), FieldElement::one()],
    ]);
    let err = mrs_driver(&p.system, &p.curve, &singular, None, 2, &opts(Mode::Full)).unwrap_err();
    assert!(matches!(err, ReducerError::Ve1NotReduced(_)), "{err:?}");
    let wrong = Matrix::zeros(2, 2);
    let err = mrs_driver(&p.system, &p.curve, &p.ve1_gauge, Some(&wrong), 2, &opts(Mode::Full)).unwrap_err();
    assert!(matches!(err, ReducerError::Ve1NotReduced(_)), "{err:?}");
}

#[test]
fn non_abelian_first_order_is_rejected() {
    // A₁ of the potential problem itself is not abelian
    let p = fixtures::potential();
    let id = Matrix::identity(4);
    let err = mrs_driver(&p.system, &p.curve, &id, None, 2, &opts(Mode::Full)).unwrap_err();
    assert!(matches!(err, ReducerError::Ve1NotReduced(_)), "{err:?}");
}

/// Taylor coefficients of X_H at φ against repeated symbolic differentiation: the
/// coefficient of δ^γ in component i is ∂^γ X_i(φ) / γ!.
#[test]
fn taylor_field_matches_differentiation() {
    for p in [fixtures::potential(), fixtures::obstruction(), fixtures::free_particle()] {
        let t = taylor_field(&p.system, &p.curve, 3).unwrap();
        let field = p.system.vector_field();
        let nv = field.len();
        for (i, xi) in field.iter().enumerate() {
            for gamma in exponents(nv, 3) {
                let mut d = xi.clone();
                let mut fact = 1i64;
                for (v, &k) in gamma.iter().enumerate() {
                    for j in 0..k {
                        d = d.derivative(v);
                        fact *= j as i64 + 1;
                    }
                }
                let val = d.eval(&p.curve, |c| FieldElement::constant(c.clone())).unwrap();
                let expected = val.times(&FieldElement::from_int(fact).inverse().unwrap());
                let got = t[i].get(&gamma).cloned().unwrap_or_else(FieldElement::zero);
                assert_eq!(got, expected, "component {i}, exponent {gamma:?}");
            }
        }
    }
}

fn exponents(nv: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nv {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=max - used).map(move |k| {
                    let mut f = e.clone();
                    f.push(k);
                    f
                })
            })
            .collect();
    }
    out.retain(|e| e.iter().sum::<u32>() >= 1);
    out
}

#[test]
fn lve_blocks_are_consistent() {
    let p = fixtures::potential();
    let a1 = first_variational(&p.system, &p.curve).unwrap();
    let l1 = build_lve(&p.system, &p.curve, 1, None).unwrap();
    assert_eq!(l1.matrix, a1);
    let l2 = build_lve(&p.system, &p.curve, 2, Some(&l1)).unwrap();
    assert_eq!(l2.dim(), 14);
    assert_eq!(l2.lower_block(), a1);
    assert!(l2.upper_violation().is_none());
    let direct = build_lve(&p.system, &p.curve, 2, None).unwrap();
    assert_eq!(direct, l2);
    let l3 = build_lve(&p.system, &p.curve, 3, Some(&l2)).unwrap();
    assert_eq!(l3.dim(), 34);
    assert_eq!(l3.lower_block(), l2.matrix);
    assert!(build_lve(&p.system, &p.curve, 3, Some(&l1)).is_err());
}

// nilpotent Ψ: two proportional coordinates at level 1 must both go
#[test]
fn proportional_coordinates_are_removed_together() {
    let mut st = common::random::synthetic_state(9023987040126053939);
    let o = Default::default();
    for level in (1..=st.depth(0)).rev() {
        let step = partial_reduce_level(&mut st, 0, level, &o).unwrap();
        assert_eq!(st.removable_dimension(0, level, &o).unwrap(), 0);
        assert!(step.closed_form_matches);
    }
    let low = st.level_coordinates(0, 1);
    assert!(low.iter().all(|c| c.is_zero()), "{low:?}");
}

// nilpotent Ψ: the residue at level 2 hides a removable level-1 combination in the first
// decomposition; full_reduce restarts and reaches a fixpoint
#[test]
fn restart_reaches_a_fixpoint() {
    let mut st = common::random::synthetic_state(6966858387297143464);
    let start = st.current.matrix.clone();
    full_reduce(&mut st, &Default::default()).unwrap();
    assert!(st.log.iter().any(|s| s.round > 0));
    assert_eq!(st.gauge.apply(&start).unwrap(), st.current.matrix);
    let mut again = ReductionState::new(st.current.clone()).unwrap();
    full_reduce(&mut again, &Default::default()).unwrap();
    assert!(again.gauge.matrix().is_identity());
}
