//! Computation on Carnot groups.

pub mod algebra;
pub mod bump;
pub mod cli;
pub mod contact;
pub mod error;
pub mod exterior;
pub mod flows;
pub mod group;
pub mod linalg;
pub mod mollifier;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod weak;

pub use error::{CarnotError, Result};
pub use rational::Q;
