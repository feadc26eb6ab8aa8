//! Interacting particle systems confined to sets of positive reach.
//!
//! Particles minimise a pairwise interaction energy
//! `E_N = 1/(2N²) Σ_i Σ_j W(x_i - x_j)` while staying on a closed set `M`,
//! either through a quadratic distance penalty or by projecting back onto
//! `M` after every step. The crate provides the geometry of `M`, the
//! energies and forces, both time-stepping schemes, an exact quadratic
//! Wasserstein distance for measuring scheme errors, and experiment drivers.

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod point;
pub mod potential;
pub mod wasserstein;

pub use dynamics::{run, InitialSpec, Scheme, SchemeConfig, StepSize, Stopping, Termination, Trace};
pub use energy::ParticleState;
pub use error::{Error, Result};
pub use geometry::{Domain, DomainSpec};
pub use point::Point;
pub use potential::Potential;
