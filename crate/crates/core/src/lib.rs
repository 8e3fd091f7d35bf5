//! Exact solver and claim checker for collaborative capacitated
//! multiple-allocation hub location under setup-cost uncertainty.

pub mod claims;
pub mod cli;
pub mod error;
pub mod formulation;
pub mod instance;
pub mod lp;
pub mod milp;
pub mod model;
pub mod regret;
pub mod report;

pub use error::{Error, Result};
