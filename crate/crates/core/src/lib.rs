//! Definability of relations and functions over finite classes of finite
//! algebras, with witness synthesis, term interpolation and congruence tools.

pub mod algebra;
pub mod cli;
pub mod clone;
pub mod closure;
pub mod congruences;
pub mod definability;
pub mod error;
pub mod formula;
pub mod subpowers;
pub mod target;
pub mod term;
pub mod terminterp;

pub use error::{Error, Result};
