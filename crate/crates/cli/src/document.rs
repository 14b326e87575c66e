//! Problem documents: the TOML input of every subcommand.

use serde::{Deserialize, Serialize};

use redform::reducer::{DriverOptions, Mode};
use redform::variational::{build_vector_field, Gauge, HamiltonianSystem};
use redform::{FieldElement, Matrix, MatrixK, Tower};

use crate::CliError;

/// A generator of the constant field. Without a minimal polynomial it is a transcendental parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constant {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_polynomial: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hamiltonian {
    pub degrees_of_freedom: usize,
    /// Expression in q1..qn, p1..pn and the constants.
    pub expression: String,
    /// 2n expressions in x: q1..qn then p1..pn.
    pub curve: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// The matrix acts as written: Y ↦ P·Y.
    #[default]
    Direct,
    /// The matrix is printed for the opposite direction: Y ↦ P⁻¹·Y.
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeFactor {
    #[serde(default)]
    pub convention: Convention,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ve1 {
    /// Factors multiplied left to right; empty means the identity.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gauge: Vec<GaugeFactor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    #[default]
    Full,
    Simplified,
}

impl From<RunMode> for Mode {
    fn from(m: RunMode) -> Mode {
        match m {
            RunMode::Full => Mode::Full,
            RunMode::Simplified => Mode::Simplified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_p_max")]
    pub p_max: u32,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default)]
    pub iterate_unreduced: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
}

fn default_p_max() -> u32 {
    2
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { p_max: default_p_max(), mode: RunMode::Full, iterate_unreduced: false, degree_cap: None }
    }
}

/// Matrices for the standalone gauge check: is P[A] = B?
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gauge: Vec<GaugeFactor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<Constant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<Hamiltonian>,
    #[serde(default)]
    pub ve1: Ve1,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
}

impl ProblemDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Document(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("documents always serialize")
    }

    pub fn tower(&self) -> Result<Tower, CliError> {
        let mut t = Tower::rationals();
        for c in &self.constants {
            let r = match &c.minimal_polynomial {
                Some(p) => t.adjoin_algebraic_expr(&c.name, p),
                None => t.adjoin_parameter(&c.name),
            };
            r.map_err(|e| CliError::input("constants", e))?;
        }
        Ok(t)
    }

    /// Every expression in the document, parsed against the declared tower.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let tower = self.tower()?;
        let problem = match &self.hamiltonian {
            Some(h) => {
                let system = build_vector_field(&tower, h.degrees_of_freedom, &h.expression)
                    .map_err(|e| CliError::input("hamiltonian", e))?;
                if h.curve.len() != 2 * h.degrees_of_freedom {
                    return Err(CliError::Document(format!(
                        "the curve has {} components, expected {}",
                        h.curve.len(),
                        2 * h.degrees_of_freedom
                    )));
                }
                let curve = h
                    .curve
                    .iter()
                    .map(|s| tower.parse_element(s).map_err(|e| CliError::input("curve", e)))
                    .collect::<Result<Vec<_>, _>>()?;
                let n = 2 * h.degrees_of_freedom;
                let gauge = compose_factors(&tower, &self.ve1.gauge, n, "ve1.gauge")?;
                let expected = self.ve1.expected.as_ref().map(|m| parse_matrix(&tower, m, "ve1.expected")).transpose()?;
                Some(ResolvedProblem { system, curve, ve1_gauge: gauge, expected })
            }
            None => None,
        };
        Ok(Resolved { tower, problem })
    }

    pub fn driver_options(&self) -> DriverOptions {
        let mut o = DriverOptions { mode: self.run.mode.into(), iterate_unreduced: self.run.iterate_unreduced, ..Default::default() };
        if let Some(cap) = self.run.degree_cap {
            o.solve.degree_cap = cap;
        }
        o
    }
}

pub struct ResolvedProblem {
    pub system: HamiltonianSystem,
    pub curve: Vec<FieldElement>,
    pub ve1_gauge: MatrixK,
    pub expected: Option<MatrixK>,
}

pub struct Resolved {
    pub tower: Tower,
    pub problem: Option<ResolvedProblem>,
}

impl Resolved {
    pub fn problem(&self) -> Result<&ResolvedProblem, CliError> {
        self.problem.as_ref().ok_or_else(|| CliError::Document("missing [hamiltonian] section".into()))
    }
}

pub fn parse_matrix(tower: &Tower, rows: &[Vec<String>], what: &str) -> Result<MatrixK, CliError> {
    let n = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Document(format!("{what}: rows must be non-empty and of equal length")));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| tower.parse_element(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::input(what, e))?;
    Ok(Matrix::from_rows(parsed))
}

/// Product of the gauge factors, identity of size n when there are none.
pub fn compose_factors(tower: &Tower, factors: &[GaugeFactor], n: usize, what: &str) -> Result<MatrixK, CliError> {
    let mut out: MatrixK = Matrix::identity(n);
    for f in factors {
        let m = parse_matrix(tower, &f.matrix, what)?;
        if m.rows() != n || m.cols() != n {
            return Err(CliError::Document(format!("{what}: expected a {n}×{n} matrix")));
        }
        let m = match f.convention {
            Convention::Direct => m,
            Convention::Inverse => Gauge::new(m).map_err(|e| CliError::input(what, e))?.inverse_matrix().clone(),
        };
        out = out.mul(&m);
    }
    Ok(out)
}

pub fn render_matrix(m: &MatrixK) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
}
