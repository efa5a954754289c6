//! Two q-bits coupled to a classical harmonic oscillator.
//!
//! The q-bit pair lives in the σ_x eigenbasis {φ₁, φ₂, φ₃, φ₄}; the
//! oscillator couples to it through Ŝ_x and drives entanglement changes
//! that are tracked through the concurrence.

pub mod check;
pub mod config;
pub mod dynamics;
pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod model;
pub mod output;
pub mod perturbations;
pub mod protocols;

pub use dynamics::{integrate, CouplingSchedule, HybridSystem, Trajectory};
pub use entanglement::{concurrence_mixed, concurrence_pure, entanglement_of_formation, TwoQubitDensity};
pub use error::{Error, Result};
pub use model::{named_state, HybridState, ModelParams, QuantumAmplitudes};
pub use perturbations::{PerturbationKind, PerturbationMatrix};
