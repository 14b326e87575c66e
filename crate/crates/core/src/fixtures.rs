//! Reference problems shared by tests, benches and the command line front end.

use crate::fields::{FieldElement, Tower};
use crate::matrix::{Matrix, MatrixK};
use crate::variational::{build_vector_field, HamiltonianSystem};

/// A Hamiltonian, a particular solution and a gauge reducing its first variational equation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub tower: Tower,
    pub system: HamiltonianSystem,
    pub curve: Vec<FieldElement>,
    pub ve1_gauge: MatrixK,
}

fn parse_matrix(t: &Tower, rows: &[&[&str]]) -> MatrixK {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| t.parse_element(s).expect("fixture entry")).collect()).collect())
}

/// Tower ℚ(i, s, m, L) with i² = −1, s² = 3, m a parameter and L² = −48·s·i/(m² − 1).
pub fn potential_tower() -> Tower {
    let mut t = Tower::rationals();
    t.adjoin_algebraic_expr("i", "i^2 + 1").expect("i");
    t.adjoin_algebraic_expr("s", "s^2 - 3").expect("s");
    t.adjoin_parameter("m").expect("m");
    t.adjoin_algebraic_expr("L", "L^2 + 48*s*i/(m^2 - 1)").expect("L");
    t
}

pub const POTENTIAL_HAMILTONIAN: &str = "p1^2/2 + p2^2/2 + q2*(9*q1^2 + q2^2)/q1^3";

pub const POTENTIAL_CURVE: [&str; 4] = ["L*x", "-i*s*L*x", "L", "-i*s*L"];

/// The gauge matrix as usually printed; it reduces A₁ under Y ↦ P⁻¹Y.
pub const POTENTIAL_P1: [[&str; 4]; 4] = [
    ["x", "1", "i*s", "1"],
    ["-i*s*x", "-i*s", "1", "-i*s/3"],
    ["1", "0", "i*s*(m+1)/(2*x)", "-(m-1)/(2*x)"],
    ["-i*s", "0", "(m+1)/(2*x)", "i*s*(m-1)/(6*x)"],
];

/// Two-degree-of-freedom potential with a straight-line solution family parametrized by m.
/// The gauge is diag(s·i, s·i, s·i, 1/x)·P₁⁻¹, which sends A₁ to diag(0, 0, f, −f), f = (m+1)/(2x).
pub fn potential() -> Problem {
    let tower = potential_tower();
    let system = build_vector_field(&tower, 2, POTENTIAL_HAMILTONIAN).expect("hamiltonian");
    let curve = POTENTIAL_CURVE.iter().map(|s| tower.parse_element(s).expect("curve")).collect();
    let p1 = potential_p1(&tower);
    let d = parse_matrix(&tower, &[&["s*i", "0", "0", "0"], &["0", "s*i", "0", "0"], &["0", "0", "s*i", "0"], &["0", "0", "0", "1/x"]]);
    let ve1_gauge = d.mul(&p1.inverse().expect("invertible"));
    Problem { tower, system, curve, ve1_gauge }
}

pub fn potential_p1(tower: &Tower) -> MatrixK {
    let rows: Vec<Vec<&str>> = POTENTIAL_P1.iter().map(|r| r.to_vec()).collect();
    let refs: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
    parse_matrix(tower, &refs)
}

/// H = p_w + q·p/w + p·p_w² along (q, w, p, p_w) = (0, x, 0, 0). A₁ = diag(1/x, 0, −1/x, 0) is
/// used as is; order 2 couples δq to δp_w² with y' = y/x − 1, which has no rational solution.
pub fn obstruction() -> Problem {
    let tower = Tower::rationals();
    let system = build_vector_field(&tower, 2, "p2 + q1*p1/q2 + p1*p2^2").expect("hamiltonian");
    let curve = ["0", "x", "0", "0"].iter().map(|s| tower.parse_element(s).expect("curve")).collect();
    Problem { tower, system, curve, ve1_gauge: Matrix::identity(4) }
}

/// H = p²/2 along (x, 1).
pub fn free_particle() -> Problem {
    let tower = Tower::rationals();
    let system = build_vector_field(&tower, 1, "p1^2/2").expect("hamiltonian");
    let curve = ["x", "1"].iter().map(|s| tower.parse_element(s).expect("curve")).collect();
    Problem { tower, system, curve, ve1_gauge: Matrix::identity(2) }
}
