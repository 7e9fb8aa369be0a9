//! Recognition of hyperelliptic-type tropical curves with verifiable
//! certificates.
//!
//! A tropical curve is a connected multigraph with nonnegative integer vertex
//! weights and positive rational edge lengths.  This crate decides whether a
//! curve is of hyperelliptic type and backs the answer with a certificate the
//! caller can re-check: a forbidden-minor model (complete graph on four
//! vertices, or the doubled triangle) for negatives, and for positives a
//! hyperelliptic curve together with its involution and a length-preserving
//! 2-isomorphism connecting the two curves' 3-edge connectivizations.

pub mod error;
pub mod graph;

pub mod connectivity;
pub mod decision;
pub mod ears;
pub mod fixtures;
pub mod gen;
pub mod hyperelliptic;
pub mod io;
pub mod iso;
pub mod matroid;
pub mod minors;

pub use error::{Error, Result};
pub use graph::{Rat, TropicalCurve, WeightedGraph};
