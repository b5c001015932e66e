pub mod checks;
pub mod cli;
pub mod config;
pub mod conventions;
pub mod error;
pub mod expr;
pub mod gallery;
pub mod lift;
pub mod projective;
pub mod pseudoriemann;
pub mod report;
pub mod sampling;
pub mod symmetry;
pub mod tolerances;
pub mod tensor;
pub mod twistor;

pub use conventions::{conventions, Conventions};
pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use lift::MetricFamily;
pub use projective::Connection;
