//! Almost-chains of tree branches and the signed measures that witness them.

pub mod chain;
pub mod config;
pub mod construct;
pub mod error;
pub mod eta;
pub mod lifting;
pub mod measure;
pub mod noise;
pub mod oracle;
pub mod reduction;
pub mod runner;
pub mod tree;

pub use error::{Error, Result};
