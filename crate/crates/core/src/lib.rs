pub mod dioph;
pub mod error;
pub mod exact;
pub mod expr;
pub mod oracle;
pub mod real;
pub mod region;
pub mod ring;
pub mod synth;

pub use error::{Error, Result};
