//! Geodesic P-splines: smoothing of point data on the sphere.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the numerical
//! core of the method:
//!
//! * [`grid`]: icosahedral geodesic grids built by recursive four-way
//!   subdivision, with hierarchical point location;
//! * [`basis`]: sparse B-spline bases evaluated with Bernstein polynomials in
//!   planar barycentric coordinates;
//! * [`penalty`]: intrinsic CAR structure matrices, generalized-inverse
//!   diagonals and scaling to unit geometric-mean marginal variance;
//! * [`cholesky`] and [`gmrf`]: sparse Cholesky factorization and exact
//!   sampling of Gaussian Markov random fields under a linear constraint;
//! * [`model`]: the hierarchical model and its Gibbs sampler;
//! * [`predict`]: composite sampling of the latent field at new locations;
//! * [`detect`]: rank-based probability of belonging to the latitudinal band
//!   where the latent field is highest.
//!
//! File formats, synthetic data and the command line live in the companion
//! `geopspline` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod basis;
pub mod cholesky;
pub mod detect;
mod error;
pub mod geom;
pub mod gmrf;
pub mod grid;
pub mod model;
pub mod penalty;
pub mod predict;
pub mod sparse;

pub use error::{Error, Result};
