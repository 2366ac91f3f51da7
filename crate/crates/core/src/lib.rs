#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod error;
pub mod mapping;
pub mod numerics;
pub mod simulate;
pub mod triplet;
pub mod verify;
