pub mod ap;
pub mod bohr;
pub mod cli;
pub mod error;
pub mod exact;
pub mod expr;
pub mod fleischhack;
pub mod frequency;
pub mod hilbert;
pub mod json;
pub mod linalg;
pub mod measure;

pub use error::{Error, Result};
