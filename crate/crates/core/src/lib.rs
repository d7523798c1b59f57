//! Exact tools for nice nilpotent Lie algebras: structure constants, nice
//! diagrams and root matrices, and a decision procedure for σ-diagonal
//! Einstein metrics with verifiable certificates.

// tensor formulas read best with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod constructions;
pub mod diagram;
pub mod einstein;
pub mod error;
pub mod exactla;
pub mod lie;
pub mod parser;
pub mod poly;

pub use constructions::{contraction_limit, extension_tower, is_one_bracket_extension, one_bracket_extension, TowerLevel};
pub use diagram::{build_diagram, IndexElem, Involution, NiceDiagram, RootMatrix};
pub use einstein::{
    solve_diagonal, solve_sigma, verify_einstein, EinsteinCertificate, Flavor, Metric, Scalar, SigmaDiagonalMetric,
    SolveOptions, SolveReport, Verdict,
};
pub use error::{Error, Result};
pub use exactla::{Gf2Matrix, Rational, RationalMatrix, Surd, SurdSum};
pub use lie::StructureConstants;
pub use parser::{AlgebraDocument, BracketEntry};
