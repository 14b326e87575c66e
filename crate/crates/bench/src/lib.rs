//! Benchmark workloads, shared with the criterion harness.

use redform::fixtures;
use redform::ode::{parametrized_first_order, rational_solutions, DiffOperator, SolveOptions};
use redform::reducer::{DriverOptions, Mode};
use redform::variational::{build_lve, sym_power};
use redform::{mrs_driver, FieldElement, Tower, Verdict};

/// The potential problem up to order `p_max`.
pub fn worked_example(p_max: u32, mode: Mode) -> Verdict {
    let p = fixtures::potential();
    let opts = DriverOptions { mode, ..Default::default() };
    mrs_driver(&p.system, &p.curve, &p.ve1_gauge, None, p_max, &opts).expect("worked example").verdict
}

pub fn obstruction(mode: Mode) -> Verdict {
    let p = fixtures::obstruction();
    let opts = DriverOptions { mode, ..Default::default() };
    mrs_driver(&p.system, &p.curve, &p.ve1_gauge, None, 3, &opts).expect("obstruction fixture").verdict
}

/// Size of LVE_p of the potential problem.
pub fn build_variational(p_max: u32) -> usize {
    let p = fixtures::potential();
    let mut lve = None;
    for order in 1..=p_max {
        lve = Some(build_lve(&p.system, &p.curve, order, lve.as_ref()).expect("lve"));
    }
    lve.map_or(0, |l| l.dim())
}

/// sym^p of A₁ of the potential problem.
pub fn symmetric_power(power: u32) -> usize {
    let p = fixtures::potential();
    let a1 = redform::variational::first_variational(&p.system, &p.curve).expect("A1");
    sym_power(&a1, power).expect("sym power").rows()
}

fn parse(s: &str) -> FieldElement {
    Tower::rationals().parse_element(s).expect("expression")
}

/// A handful of rational-solution problems of increasing size.
pub fn solver_mix() -> usize {
    let opts = SolveOptions::default();
    let mut total = 0;
    let ops: [&[&str]; 3] = [&["-6", "0", "x^2"], &["-2*x", "x^2 + 1"], &["0", "0", "0", "1"]];
    for cs in ops {
        let l = DiffOperator::new(cs.iter().map(|s| parse(s)).collect()).expect("operator");
        total += rational_solutions(&l, &opts).expect("solutions").basis.len();
    }
    let params: [(&str, &[&str]); 3] = [
        ("0", &["1/x^2", "1/x", "1/(x - 1)", "x/(x^2 + 1)"]),
        ("1/x", &["1", "1/x^2", "x"]),
        ("2/(x + 1)", &["1/(x^2 - x)", "(x - 2)/(x^2 + 1)", "1"]),
    ];
    for (lambda, bs) in params {
        let bs: Vec<FieldElement> = bs.iter().map(|s| parse(s)).collect();
        total += parametrized_first_order(&parse(lambda), &bs, &opts).expect("tuples").dim();
    }
    total
}
