//! Numerical laboratory for the slightly supercritical fractional Burgers
//! equation with vanishing viscosity,
//!
//! ```text
//! theta_t + theta * theta_x + (-lap)^s theta - eps1 * lap theta = 0
//! ```
//!
//! on a large periodic domain. The crate provides:
//!
//! * [`fraclap`] — the fractional Laplacian `(-lap)^s` as a Fourier
//!   multiplier and, independently, as a singular-integral quadrature with
//!   the matching normalization constant `C_s`;
//! * [`solver`] — a pseudo-spectral integrating-factor solver with
//!   dealiasing, deterministic initial-data generators and the two
//!   rescaling maps of the equation;
//! * [`diagnostics`] — quantitative checks along computed trajectories:
//!   the explicit `L^inf` decay bound, Hölder seminorms, the oscillation
//!   ladder over shrinking parabolic cylinders, and the barrier ODE `m(t)`;
//! * [`constants`] — numeric certification of the bump/barrier
//!   construction and of the feasibility inequalities that drive the
//!   oscillation iteration;
//! * [`artifacts`] — on-disk run directories (manifest, scalar series,
//!   binary snapshots) with bit-exact round-trips.

pub mod artifacts;
pub mod constants;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod fraclap;
pub mod prng;
pub mod solver;
pub mod special;

mod fft;

pub use error::{Error, Result};
pub use field::SpectralField;
