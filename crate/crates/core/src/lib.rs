//! Numerical toolkit for slice functions over the quaternions and octonions:
//! division-algebra arithmetic, stem functions, real differentials assembled
//! from the standard set of curves, slice-conformality audits, a catalog of
//! hypercomplex Riemann manifolds, and the logarithm and n-th root manifolds
//! with their branch functions.

pub mod algebra;
pub mod battery;
pub mod cli;
pub mod differential;
pub mod error;
pub mod expr;
pub mod logroot;
pub mod manifolds;
pub mod parallel;
pub mod sampling;
pub mod stem;

pub use algebra::{complete_basis, decompose, Algebra, Basis, Completion, HyperNum, ImaginaryUnit, SlicePoint};
pub use error::{Error, Result};
pub use parallel::Execution;
pub use stem::{StemFunction, SymmetricDomain, Target};
