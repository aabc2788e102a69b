//! Mixed-integer models for DC-OPF based intentional controlled islanding.
//!
//! The crate builds two families of islanding models over a [`net::NetworkCase`]:
//! a big-M reference model with commodity-flow connectivity and angle
//! variables, and a big-M-free model that expresses connectivity through
//! directed spanning forests and Ohm's law through cycle-wise Kirchhoff
//! voltage constraints. Exponential constraint families are generated lazily
//! by the separators in [`separation`]. Every solution is re-checked against
//! DC power-flow physics by [`validate`].

// Negated comparisons are how the validators reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod formulations;
pub mod graph;
pub mod heuristic;
pub mod milp;
pub mod net;
pub mod pipeline;
pub mod separation;
pub mod validate;

pub use error::{Error, Result};
