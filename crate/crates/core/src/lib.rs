pub mod descriptor;
pub mod error;
pub mod exec;
pub mod fusion;
pub mod group;
pub mod instances;
pub mod locality;
pub mod partial;
pub mod pgroup;
pub mod products;
pub mod report;

pub use error::{Error, Result};
