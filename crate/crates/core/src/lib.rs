//! A verification toolkit for sum-product decoding on small LDPC codes.
//!
//! The central demonstration: a tree-like local neighborhood of a Tanner
//! graph edge does *not* make the belief-propagation message locally
//! ML-optimal, because checks outside the neighborhood can impose implicit
//! constraints on the projected sub-codebook. Everything here is built to
//! make that checkable on explicit small codes:
//!
//! - [`gf2`] — dense GF(2) linear algebra, codeword enumeration, projections,
//!   duals, and implicit-constraint detection;
//! - [`tanner`] — Tanner graphs and computation-tree unrolling;
//! - [`channels`] — BSC / BI-AWGN / BEC models, LLRs, and physical
//!   degradation;
//! - [`bp`] — sum-product decoding with full message traces, on graphs and
//!   on standalone trees;
//! - [`ml_oracle`] — brute-force bitwise ML and MAP estimators;
//! - [`counterexamples`] — the two explicit constructions and the
//!   BP-vs-local-ML witness search;
//! - [`experiments`] — exact and Monte Carlo validation of the corrected
//!   degradation-monotonicity argument.

pub mod alist;
pub mod bp;
pub mod channels;
pub mod counterexamples;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod ml_oracle;
pub mod tanner;

pub use error::{Error, Result};
