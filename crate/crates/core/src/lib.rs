pub mod checks;
pub mod csv;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod hj;
pub mod implicit;
pub mod systems;

pub use error::{Error, Result};
