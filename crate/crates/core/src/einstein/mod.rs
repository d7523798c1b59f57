//! Einstein metrics: Ricci computation, verification and the σ-diagonal
//! solver.

pub mod gauge;
pub mod metric;
pub mod ricci;
pub mod solve;
pub mod system;

pub use gauge::{gauge_group, gauge_group_sigma, GaugeGroup};
pub use metric::{Metric, MetricValues, MonomialMetric, Scalar, SigmaDiagonalMetric};
pub use ricci::{ricci_components, ricci_via_contraction, verify_einstein, ResidualEntry, ResidualReport, RicciOperator};
pub use solve::{
    solve_diagonal, solve_sigma, EinsteinCertificate, GaugeChoice, Mode, NonexistenceProof, Obstruction, OrthonormalForm,
    SolveOptions, SolveReport, Verdict,
};
pub use system::{check_h, solve_k, AffineSolutionSet, Cell, CellEnumeration, Flavor, SigmaSystem};
