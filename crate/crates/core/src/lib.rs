pub mod checks;
pub mod class;
pub mod cli;
pub mod corpus;
pub mod decomposition;
pub mod error;
pub mod lab;
pub mod norm;
pub mod report;
pub mod sequence;
pub mod weight;

pub use error::{Error, Result};
pub use weight::{BuiltinWeightSpec, WeightFunction, WeightSpec};
