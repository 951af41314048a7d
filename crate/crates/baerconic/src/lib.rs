//! Exact engine for counting Baer-subplane points external to a conic of
//! PG(2,q²), by two independent routes: a brute-force point classifier over
//! the subplane, and a prediction pipeline that decomposes the problem into
//! counting points on a cubic surface of PG(3,q) (or, when that surface
//! splits, reading the answer off quadric discriminants).
//!
//! Every batch run cross-validates the two routes conic by conic.

pub mod gf;
pub mod proj;
pub mod conic;
pub mod surface;
pub mod classifier;
pub mod harness;

pub use gf::{ExtElem, FieldCtx, FieldElem, QuadClass};
