pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod fields;
pub mod special;

pub use error::{Error, Result};
pub use special::ModelParams;
