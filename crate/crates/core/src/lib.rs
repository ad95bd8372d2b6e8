//! Counting and verification engine for rational points near finite-type
//! planar curves.
//!
//! The central quantity is
//!
//! ```text
//! N_f(Q, delta) = #{ (a, q) : 1 <= q <= Q, a/q in I, ||q f(a/q)|| < delta }
//! ```
//!
//! computed by independent methods in [`counting`], compared against the
//! main term `|I| delta Q^2` in [`asymptotics`], and accompanied by numeric
//! checks of the analytic tools behind it in [`expsums`].

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod counting;
pub mod curves;
pub mod expsums;
pub mod error;
pub mod provenance;
pub mod rational;

pub use error::{Error, Result};
