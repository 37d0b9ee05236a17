pub mod arith;
pub mod binary;
pub mod error;
pub mod field;
pub mod group;
pub mod matrix;
pub mod multipoly;
pub mod poly;
pub mod projective;
pub mod quintic;
pub mod reduction;
pub mod report;
pub mod status;
pub mod v22;
pub mod v5;

pub use error::{Error, Result};
pub use status::Status;
