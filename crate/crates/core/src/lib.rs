//! Finite-volume simulation of a quasilinear attraction-repulsion chemotaxis
//! system with signal-dependent sensitivities, plus the exponent machinery
//! behind its uniform-in-time boundedness.
//!
//! ```text
//! u_t = div(D(u) grad u) - div(G(u) chi(v) grad v) + div(H(u) xi(w) grad w)
//! v_t = d1 Lap v + alpha u - beta v
//! w_t = d2 Lap w + gamma u - delta w
//! ```
//!
//! on rectangles with homogeneous Neumann boundaries.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod params;
pub mod plot;
pub mod run;
pub mod snapshot;
pub mod solver;
pub mod sweep;
pub mod witness;

pub use error::{Error, Result};
pub use grid::{Grid, InitialProfile, Profile, SimState};
pub use kernels::KernelSet;
pub use params::{validate_params, ModelParams, ValidationReport};
pub use witness::{find_exponent_witness, ExponentWitness};
