pub mod error;
pub mod model;
pub mod rng;
pub mod simulate;
pub mod coupling;
pub mod companion;
pub mod bounds;
pub mod driver;
pub mod metrics;
pub mod config;
pub mod toggle;
pub mod output;
pub mod commands;

pub use error::{Error, Result};
