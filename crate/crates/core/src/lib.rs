//! Exact reduced-form engine for variational equations of Hamiltonian systems.

pub mod fields;
pub mod fixtures;
pub mod lie;
pub mod matrix;
pub mod ode;
pub mod reducer;
pub mod variational;

pub use fields::{Const, Field, FieldElement, FieldError, Poly, RatFunc, Tower};
pub use matrix::{Matrix, MatrixC, MatrixError, MatrixK};
pub use variational::{BlockSystem, Gauge, HamiltonianSystem, VariationalError};
pub use reducer::{mrs_driver, DriverOptions, DriverOutput, Mode, ReducerError, Verdict, Witness};
