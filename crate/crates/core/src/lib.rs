pub mod cli;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod runner;
pub mod state;

pub use error::{Error, Result};
