// SPDX-License-Identifier: Apache-2.0

//! Averages of 3-torsion in S-class groups of quadratic fields, checked
//! against census data over fundamental discriminants and cubic fields.

pub mod abgrp;
pub mod arith;
pub mod census;
pub mod cubic;
pub mod error;
pub mod predict;
pub mod quadform;

pub use error::{Error, Result};
