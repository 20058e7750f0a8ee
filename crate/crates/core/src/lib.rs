pub mod analysis;
pub mod cli;
pub mod counting;
pub mod error;
pub mod formats;
pub mod mobius;
pub mod packing;

pub use error::{Error, Result};
