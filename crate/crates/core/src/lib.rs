pub mod bipoly;
pub mod error;
pub mod ext;
pub mod field;
pub mod lattice;
mod modp;
pub mod ring;
pub mod upoly;

pub use error::{Error, Result};
pub mod config;
pub mod exec;
pub mod polytope;
pub mod laurent;
pub mod algebraic;
pub mod solver;
pub mod hyperbolicity;
pub mod deformation;
pub mod io;
pub mod casebook;
