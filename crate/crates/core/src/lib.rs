//! Parabolicity and hyperbolicity of model spaces and of submanifolds whose
//! mean convexity and radial tangency are controlled by radial bounds.
//!
//! The pipeline: a [`geometry::WarpingDescriptor`] fixes the comparison model,
//! [`profiles`] carry the bounds `h` and `g`, [`quadrature`] builds the weights
//! `Λ`, `Λ_g` and classifies their tail integrals, [`classifier`] turns those
//! into verdicts with certificates, and [`dirichlet`] solves the associated
//! radial Dirichlet problem. [`stochastic`] and [`network`] are independent
//! oracles for the same quantities.

pub mod error;
pub mod geometry;
pub mod io;
pub mod profiles;
pub mod problem;
pub mod quadrature;
pub mod dirichlet;
pub mod classifier;
pub mod network;
pub mod stochastic;

pub use error::{Error, Result};
