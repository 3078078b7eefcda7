//! Analytics and Monte Carlo validation for the dual-zone hard-core process,
//! a dependent thinning of a Poisson bipolar network that models RTS/CTS
//! channel access in WLANs.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: exclusion-region areas and two-pair membership tests.
//! - [`sampling`]: Poisson bipolar sampling and Type I / Type II thinning.
//! - [`quadrature`]: Gauss–Legendre machinery for the kernel integrals.
//! - [`analytics`]: intensities, retention kernels, mean interference, MISR,
//!   asymptotic gain and success probabilities.
//! - [`montecarlo`]: estimators with confidence intervals that validate every
//!   analytic quantity.
//! - [`cli`]: sweep and validation commands behind the `dzhcp` binary.

// `!(x > 0.0)` is the NaN-rejecting form used by every input check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{Disk, ExclusionShape, PairConfiguration, Point2, RegionClass};
pub use params::NetworkParams;
pub use process::{ProcessType, ThinningRule};

/// Shortest round-trip text of `v`, switching to exponent form for very small or large magnitudes.
pub(crate) fn csv_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
