pub mod analysis;
pub mod elements;
pub mod error;
pub mod fock;
pub mod gates;
pub mod program;

pub use error::{Error, Result};
