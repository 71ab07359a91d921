//! Simulation and analysis of fractional annealing dynamics
//!
//! ```text
//! dX_t = −∇g(X_t) dt + √(2T) dB^H_t
//! ```
//!
//! driven by Liouville fractional Brownian motion `B^H` or its regularised
//! semimartingale approximation `B^{H,ε}`.
//!
//! * [`fbm`]: Wiener paths, Liouville fBm, `φ^ε`, covariance oracles.
//! * [`sde`]: energy landscapes and Euler integrators.
//! * [`steady`]: steady states, linearisation, matrix exponentials and the
//!   explicit linear solution.
//! * [`analysis`]: L² distances, rate fits, Gronwall bounds, Hurst estimation.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod ensemble;
mod error;
pub mod fbm;
pub mod quad;
pub mod rng;
pub mod sde;
pub mod steady;

pub use error::{Error, Result};
pub use fbm::{FbmPath, HurstParam, TimeGrid, WienerPath};
