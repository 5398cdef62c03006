//! Numerical probes of the product, superposition and measure-condition statements.

pub mod algebra;
pub mod constants;
pub mod gamma;
pub mod measure;
pub mod quadrature;
pub mod superposition;

pub use algebra::{algebra_ratio, algebra_report, holder_exponent, AlgebraEntry, AlgebraReport, LabSettings};
pub use constants::{subalgebra_constant, ConstantParams, ConstantsReport, Variant};
pub use gamma::{incomplete_gamma_lower, incomplete_gamma_upper, inverse_incomplete_gamma};
pub use measure::{measure_condition_check, Density, MeasureOptions, MeasureReport, PhiMuTransform};
pub use superposition::{exp_map_continuity, superposition_growth, ContinuityReport, SuperpositionOptions, SuperpositionReport};
