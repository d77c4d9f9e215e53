//! Densities, tail asymptotics and implied-volatility smiles for the uncorrelated Heston and
//! Stein–Stein stochastic volatility models.

// `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
mod entire;
mod error;

pub mod densities;
pub mod montecarlo;
pub mod pricing;
pub mod quadrature;
pub mod special_roots;
pub mod transforms;

pub use error::{Error, Result};
pub use transforms::{HestonParams, Model, SteinSteinParams};
