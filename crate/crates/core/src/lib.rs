//! Exact and high-precision computations for one-parameter Calabi–Yau
//! threefold families at a point of maximal unipotent monodromy.
//!
//! The pipeline runs from a fourth-order Picard–Fuchs operator to its
//! Frobenius periods ([`picard_fuchs`]), the mirror map, Yukawa coupling and
//! genus-zero invariants ([`mirror`]), numeric Hodge and Weil–Petersson
//! geometry ([`hodge`]) and residual checks of the holomorphic anomaly
//! equations on sampled data ([`anomaly`]).

pub mod anomaly;
pub mod hodge;
pub mod mirror;
pub mod numeric;
pub mod picard_fuchs;
pub mod poly;
pub mod series;

pub use rug::{Float, Integer, Rational};

pub use numeric::ComplexHP;
pub use picard_fuchs::{PeriodBasis, PfOperator};
pub use series::{LogBranch, LogSeries, SeriesError};
