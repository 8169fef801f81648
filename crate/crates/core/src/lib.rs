//! Gaussian phase-space simulation of squeezed cylindrically polarized light.
//!
//! A squeezed azimuthally (or radially) polarized beam is a single
//! composite mode built from two orthogonally polarized first-order
//! Hermite-Gauss modes. Squeezing the composite mode two-mode squeezes its
//! constituents, so the beam carries polarization, spatial and hybrid
//! (spatial on one arm, polarization on the other) entanglement once it is
//! split at a polarizing beam splitter.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: Gaussian states and the symplectic maps that act on them.
//! - [`vector_modes`]: classical vector-beam coefficient matrices, Schmidt
//!   decomposition, basis changes, field evaluation and intensity images.
//! - [`states`]: the bright squeezed cylindrically polarized states, built
//!   both as a squeezed composite mode and as a product of single- and
//!   two-mode operations.
//! - [`observables`]: quadratic observables (Stokes operators, photon
//!   numbers), photodetection in dB relative to the quantum noise limit and
//!   an independent truncated number-basis oracle.
//! - [`entanglement`]: the Stokes-operator inseparability criterion for the
//!   polarization, spatial and hybrid measurement sets.
//! - [`cli`]: the `hybrid-cv` command-line front end.
//!
//! Units: quadratures are `x = a + a†`, `p = -i(a - a†)`, so the vacuum has
//! unit variance in every quadrature and "dB below the quantum noise limit"
//! is a plain variance ratio.

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod entanglement;
mod error;
pub mod gaussian;
pub mod numeric;
pub mod observables;
pub mod states;
pub mod vector_modes;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, SymplecticTransform};
