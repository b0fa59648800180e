//! Numerics for locally stable mixed states of qudit lattices.
//!
//! Entropies are in bits. Trace distance is `‖ρ − σ‖₁` without the factor ½.

pub mod channels;
pub mod correlators;
pub mod error;
pub mod fit;
pub mod info;
pub mod lindblad;
pub mod linalg;
pub mod markov;
pub mod models;
pub mod purification;
pub mod stability;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use states::{DensityMatrix, Region, RegionPartition, Register};
