//! Extropy and extropy-rate toolkit for discrete distributions and processes.

pub mod base;
pub mod chaos;
pub mod complexity;
pub mod data;
pub mod dist;
pub mod error;
pub mod eval;
pub mod info;
pub mod rate;
pub mod selection;
pub mod synthetic;

pub use base::LogBase;
pub use dist::{JointPmf, Pmf};
pub use error::{Error, Result};
