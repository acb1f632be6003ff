//! Control, decoupling, thermal and entanglement models for globally driven,
//! inhomogeneous solid-state spin ensembles.
//!
//! - [`numerics`]: 2×2/4×4 complex matrices, Jacobi eigensolver, quadrature, L-BFGS, fits
//! - [`siv`]: silicon-vacancy Hamiltonians, optical transition vs. strain, strain window, Rabi driving
//! - [`pulses`]: error-afflicted rotations, composite pulses, infidelity maps
//! - [`grape`]: gradient-based robust pulse synthesis over an error grid
//! - [`dds`]: decoupling sequences, filter functions, coherence extraction
//! - [`thermal`]: fridge power budget and sample temperature traces
//! - [`entangle`]: heralded entanglement protocol, channels, link statistics
//! - [`compiler`]: global drive waveform and coincidence scheduling
//! - [`pipeline`]: grid-wide coherence and link evaluation tying the above together

// `!(x > 0.0)` also rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod dds;
pub mod entangle;
pub mod grape;
pub mod numerics;
pub mod pipeline;
pub mod pulses;
pub mod siv;
pub mod thermal;

mod error;

pub use error::Error;
