// NaN must fail parameter checks, so `!(x > 0.0)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codec;
pub mod error;
pub mod graph;
pub mod mdp;
pub mod policy;
pub mod mw;
pub mod exact;
pub mod truncated;
pub mod decay;
pub mod td;
pub mod lpi;
pub mod envs;
pub mod config;
pub mod harness;

pub use error::{Error, Result};
