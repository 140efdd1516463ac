//! Exact arithmetic for Hodge-Tate crystals over a p-adic field.
//!
//! Elements of the ring of integers are kept modulo a fixed power of `p`,
//! divided-power series are truncated at a total-degree cap, and every
//! identity is checked exactly inside those bounds.

pub mod base_rings;
pub mod cohomology;
pub mod corpus;
pub mod crystal;
pub mod error;
pub mod galois;
pub mod json;
pub mod pd_series;
pub mod qcalc;
pub mod selftest;
pub mod weights;

pub use base_rings::{
    Matrix, MatRing, OkElem, OkModule, OkRing, Ring, RingSpec, SnfResult, Valuation,
};
pub use crystal::{Crystal, NilpotencyVerdict};
pub use error::{Error, Result};
pub use pd_series::{Mono, PdSeries};
