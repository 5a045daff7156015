#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` guards also reject NaN
extern crate alloc;

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod adiabatic;
pub mod floquet;
pub mod gaussian;
pub mod model;
pub mod spectrum;
pub mod steady;
