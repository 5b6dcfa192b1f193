//! Generalized Wigner-Smith time-delay matrices for electromagnetic systems
//! whose ports carry both propagating and evanescent modes.
//!
//! The crate is organised around five pieces:
//!
//! - [`modes`]: port geometries and their guided / Floquet mode catalogs.
//! - [`ws`]: assembly of the time-delay matrix from volume integrals and
//!   impedance corrections, the inversion-free frequency derivative of `S`,
//!   and extraction of WS modes and their delays.
//! - [`reference`]: analytically known scattering systems (shorted guides,
//!   thru lines, step junctions, a dielectric slab with Floquet ports) that
//!   expose fields, `S(ω)` and exact `S'(ω)`.
//! - [`cascade`]: composition of `S` and of the volume-integral part of `Q`
//!   for two subsystems joined through a shared port.
//! - [`quadrature`] and [`linalg`]: numerical plumbing.

pub mod cascade;
pub mod error;
pub mod linalg;
pub mod modes;
pub mod quadrature;
pub mod reference;
pub mod ws;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
