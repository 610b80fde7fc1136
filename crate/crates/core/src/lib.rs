//! Generalized circuits, polymatrix and bimatrix games, and the reductions
//! that connect them, with desk-scale solvers for checking small instances.

pub mod birthday;
pub mod ceei;
pub mod error;
pub mod fanout;
pub mod gadgets;
pub mod games;
pub mod instances;
pub mod partition;
pub mod relative;
pub mod gcircuit;
pub mod solvers;

pub use error::{Error, Result};
