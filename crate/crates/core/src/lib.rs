// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fluctuation;
pub mod hitting;
pub mod kernels;
pub mod levy_model;
pub mod mc_engine;
pub mod numerics;
pub mod verify;

pub use error::{LevyError, Result};
pub use levy_model::{LevyModel, MeasureSpec};
