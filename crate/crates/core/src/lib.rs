pub mod arith;
pub mod cli;
pub mod conic;
pub mod error;
pub mod f2;
pub mod oracle;
pub mod quadfield;
pub mod redeimatrix;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
