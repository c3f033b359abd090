//! Simulation and characterization toolkit for a polarization-entangled
//! photon-pair source.
//!
//! The crate models a two-crystal down-conversion source emitting states of
//! the form α|HH⟩ + β|VV⟩ (with tunable coherence, emission-angle-dependent
//! phase, seed distortion, and polarization-dependent loss) and implements
//! the two characterization pipelines used on such sources:
//!
//! * **QST** — quantum state tomography from Poisson coincidence counts in
//!   the six-element polarization basis, and
//! * **SET** — stimulated-emission tomography from classical intensities of
//!   the seeded (difference-frequency) output, including the seed/idler
//!   coupling renormalization and rotated measurement operators that correct
//!   for seed distortion.
//!
//! Both pipelines end in the same constrained least-squares fit that returns
//! a physical two-photon density matrix plus entanglement metrics (purity,
//! concurrence, fidelity). The [`experiments`] module scripts the standard
//! comparisons between the two methods, and [`validate`] bundles the
//! end-to-end consistency checks run by `settomo validate`.

pub mod acquisition;
pub mod density;
pub mod errors;
pub mod experiments;
pub mod matrix;
pub mod optimize;
pub mod plot;
pub mod polarization;
pub mod quadrature;
pub mod reconstruction;
pub mod source;
pub mod validate;

pub use errors::{Error, Result};
