//! Exact scalars and linear algebra over the rationals and GF(2).

pub mod factor;
pub mod gf2;
pub mod matrix;
pub mod number;
pub mod surd;

pub use gf2::{Gf2Matrix, Gf2Solution};
pub use matrix::{integer_content_one, AffineSolution, RationalMatrix};
pub use number::{format_rational, int, parse_rational, rat, rational_to_f64, Rational};
pub use surd::{Surd, SurdSum};
