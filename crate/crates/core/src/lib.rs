#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod camera;
pub mod collision;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod grasp;
pub mod pipeline;
pub mod scene;
pub mod seal;

pub use error::{Error, Result};
