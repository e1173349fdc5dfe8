//! Exact symbol calculus for phase spaces with linear second-class
//! constraints: Dirac brackets, the constrained star product and Moyal
//! bracket, Darboux reduction, and classical/quantum evolution.

pub mod bracket;
pub mod cli;

pub mod constraint;
pub mod dynamics;
pub mod error;
pub mod matrix;
pub mod parse;
pub mod reduction;
pub mod sample;
pub mod scalar;
pub mod star;
pub mod symbol;

pub use bracket::{dirac, jacobi_defect, poisson, BracketKind};
pub use constraint::{build_dirac_structure, random_symplectic, ConstraintSet, DiracStructure};
pub use dynamics::{project_to_m, FloatSymbol, HamiltonianSystem, Trajectory};
pub use error::{AlgebraError, DynamicsError, ParseError, StructureError};
pub use matrix::QMatrix;
pub use parse::parse_symbol;
pub use reduction::{darboux_basis, push_to_reduced, reduced_star_consistency, ReducedChart};
pub use scalar::Scalar;
pub use star::{class_equal, moyal, moyal_dirac_defect, reduce_to_canonical, star, EquivalenceClass};
pub use symbol::{PhaseSpace, Symbol};
