//! Coefficient rings: Witt vectors, the residue field, truncations of S,
//! k[u]/u^(ep) and the totally ramified extension K.

pub mod config;
pub mod kelem;
pub mod strunc;
pub mod tilde;
pub mod witt;

pub use config::{RingConfig, RingParams};
pub use kelem::{KElem, KVal};
pub use strunc::STrunc;
pub use tilde::TildePoly;
pub use witt::{Fq, Witt, WittRing};
