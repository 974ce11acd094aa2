#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod epsfair;
pub mod error;
pub mod metrics;
pub mod model;
pub mod objectives;
pub mod pfsmg;
pub mod problem;
pub mod rng;
pub mod smg;
pub mod streaming;

pub use error::{Error, Result};
pub use problem::MultiObjective;
