//! Thermal near-field spectral power densities (SPD) of the electric field
//! close to metal surfaces and thin films.
//!
//! Three tiers of metal response are provided:
//!
//! * a local Drude baseline and the hydrodynamic (nonlocal) half-space model
//!   in [`continuum`], together with the bulk nonlocal spectrum;
//! * a self-consistent jellium slab (Kohn–Sham subbands without
//!   exchange–correlation) in [`jellium`];
//! * the independent-particle and RPA-screened density response of that slab
//!   and the resulting film SPD in [`response`].
//!
//! All internal quantities are Hartree atomic units (ℏ = m = e = 1). Inputs
//! quoted in SI/CGS units are converted with [`units::UnitContext`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuum;
pub mod dielectric;
pub mod error;
pub mod experiments;
pub mod jellium;
pub mod material;
pub mod quadrature;
pub mod response;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
pub use material::{DerivedMaterial, MaterialParams};
