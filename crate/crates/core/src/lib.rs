//! Projected ensembles of measured bipartite states and the tools to certify
//! how close they come to quantum state designs.

pub mod cli;
pub mod designs;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod projected;
pub mod rmt;
pub mod weingarten;

pub use error::{Error, Result};
