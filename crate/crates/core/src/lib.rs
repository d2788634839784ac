//! Recurrence and transience of random walks on ℤ.
//!
//! The crate covers homogeneous walks, oscillating walks that switch step
//! law at the origin, and the concentrated chain obtained from their
//! one-sided entrance laws. Most quantities are computed by two independent
//! routes so that each can serve as a check on the other.

pub mod error;
pub mod extrapolate;
pub mod fourier;
pub mod greens;
pub mod measure;
pub mod montecarlo;
pub mod oscillating;
pub mod quad;
pub mod renewal;
pub mod report;
pub mod wiener_hopf;

pub use error::{Error, Result};
