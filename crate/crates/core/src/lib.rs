//! Orbits, Poincare series, limit sets and box dimensions of finitely generated
//! Kleinian groups acting on the Poincare disc (`n = 2`) or ball (`n = 3`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod group;
pub mod groupfile;
pub mod limitset;
pub mod poincare;
pub mod policy;
mod spatial;
pub mod verify;

pub use error::{Error, Result};
