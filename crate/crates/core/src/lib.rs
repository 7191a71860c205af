//! Determinantal point processes on the unit sphere `S^d`.
//!
//! The crate samples the harmonic ensemble (the projection process onto
//! spherical polynomials of degree at most `L`) and, more generally, any
//! rotation-invariant projection kernel; it evaluates discrete Riesz and
//! logarithmic energies of the resulting configurations and the exact and
//! asymptotic formulas for their expectations, so the two can be checked
//! against each other.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`specfun`] | `ln Γ`, digamma, Jacobi/Gegenbauer recurrences, the terminating `4F3` |
//! | [`quadrature`] | Gauss–Jacobi rules (Golub–Welsch) and zonal integrals over `S^d` |
//! | [`kernels`] | harmonic ensemble, isotropic projection kernels, kernel enumeration |
//! | [`sampling`] | exact sequential DPP sampler, uniform baseline, seeded streams |
//! | [`energy`] | discrete energies and expected-energy formulas |
//! | [`stats`] | cap counts, variances, discrepancy, separation |
//! | [`io`] | point-set CSV files and JSON reports |
//! | [`cli`] | batch front end behind the `sphere-dpp` binary |
//!
//! ```
//! use sphere_dpp::{energy, kernels::HarmonicEnsemble, sampling::{sample_dpp, RngStream}};
//!
//! let ensemble = HarmonicEnsemble::new(2, 4).unwrap();
//! let points = sample_dpp(&ensemble, RngStream::new(7, 0)).unwrap();
//! assert_eq!(points.len(), 25);
//!
//! let observed = energy::discrete_riesz(&points, 1.0).unwrap();
//! let expected = energy::expected_riesz_harmonic(2, 4, 1.0).unwrap();
//! assert!(observed > 0.0 && expected > 0.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod energy;
pub mod error;
pub mod io;
pub mod kernels;
pub mod quadrature;
pub mod sampling;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
pub use kernels::{HarmonicEnsemble, IsotropicProjectionKernel, KernelSpec, ProjectionKernel};
pub use sampling::{PointConfiguration, RngStream};
