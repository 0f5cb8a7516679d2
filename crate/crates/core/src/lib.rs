//! Quantum Otto and Stirling cycles whose working substance is a gapped
//! two-dimensional Dirac material (stanene class) in a perpendicular
//! electric field.
//!
//! The field potential `u` drives the monolayer from a topological insulator
//! (`|u| < λ_SO`) to a band insulator (`|u| > λ_SO`) through a gap closing at
//! `|u| = λ_SO`. The cycle modules compute heats, work and efficiency from
//! Fermi–Dirac statistics of the two positive bands, and the sweep module
//! locates features of the cycle output on deterministic grids.
//!
//! Units: energies and momenta in meV with ħ = v_f = 1, temperatures in K,
//! per-area densities in meV³.

pub mod cli;
pub mod cycles;
mod error;
pub mod material;
pub mod quadrature;
pub mod statmech;
pub mod sweep;

pub use error::{Error, Result};
