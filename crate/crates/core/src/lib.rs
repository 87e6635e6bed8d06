//! Exact p-adic arithmetic for rank-two Breuil modules over W(F_q)[u] with a
//! fixed Eisenstein polynomial: Hodge, Newton and tame-inertia polygons,
//! adapted bases, and filtered (φ, N)-module checks.

pub mod adapted;
pub mod arith;
pub mod breuil;
pub mod error;
pub mod fontaine;
pub mod oracles;
pub mod polygons;
pub mod ring;

pub use error::{Error, Result};
