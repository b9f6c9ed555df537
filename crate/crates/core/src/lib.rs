//! Affine frequency division multiplexing with per-block chirp optimization.
//!
//! The crate is `no_std` and only needs `alloc`. It provides the discrete affine
//! Fourier transform, closed-form effective channels, an analytic PAPR surrogate
//! with a coarse-to-fine search, a fractional-programming SIR optimizer, sensing
//! Cramér-Rao bounds and a particle swarm optimizer.

#![no_std]

extern crate alloc;

pub mod baselines;
pub mod channel;
pub mod chirp;
pub mod crlb;
pub mod daft;
pub mod error;
pub mod fft;
pub mod papr;
pub mod pso;
pub mod rng;
pub mod sir;
pub mod trig;

pub use chirp::ChirpParams;
pub use error::{Error, Result};
pub use num_complex::Complex64;

pub(crate) use core::f64::consts::PI;
pub(crate) const TAU: f64 = 2.0 * PI;

/// `exp(j 2 pi phase)` evaluated with the phase reduced to `[0, 1)` first.
#[inline]
pub fn cis_turns(phase: f64) -> Complex64 {
    let r = phase - libm::floor(phase);
    let (s, c) = libm::sincos(TAU * r);
    Complex64::new(c, s)
}
