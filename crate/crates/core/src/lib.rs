//! Electronic structure of two-valence-electron heteronuclear alkali dimers.
//!
//! The pipeline runs, per internuclear distance, Gaussian-basis integrals with
//! semi-local effective core potentials and an ℓ-dependent core polarization
//! operator, a closed-shell Hartree-Fock reference, and an exact two-electron
//! configuration interaction in the Λ = 0 singlet and triplet blocks. Curves
//! are assembled with core-core terms and fed to a radial nuclear solver for
//! vibrationally averaged dipole moments.
//!
//! Modules map onto the processing stages:
//!
//! - [`data`]: basis sets, core parameters, experimental levels, reference tables
//! - [`integrals`]: one- and two-electron matrix elements, ECP and CPP quadrature
//! - [`atomic`]: one-center spectra and parameter fitting
//! - [`electronic`]: RHF, full CI, dipole moments
//! - [`corecore`]: core-core energy terms and curve assembly
//! - [`vibrational`]: DVR / Numerov vibrational levels and dipole averaging
//! - [`pipeline`]: configuration-driven scans, comparisons and artifacts

// index loops mirror the recurrences; `!(x > 0.0)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod corecore;
pub mod curve;
pub mod data;
pub mod electronic;
pub mod error;
pub mod integrals;
pub mod linalg;
pub mod optimize;
pub mod pipeline;
pub mod quadrature;
pub mod units;
pub mod vibrational;

pub use error::{Error, Result};
