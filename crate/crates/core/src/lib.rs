//! Counting mapping class group orbits of closed geodesics on hyperbolic
//! 2-orbifolds, and numerical checks of the geometry behind the count.

// `!(x > 0.0)` is used on purpose so that NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod hypgeom;
pub mod orbifold;
pub mod tolerances;
pub mod words;
pub mod mcg;
pub mod counting;
pub mod simplerep;
pub mod cli;
