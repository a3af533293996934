//! Numerical toolkit for Möbius dynamics on the hyperbolic disk: the group
//! PSU(1,1) and its discrete subgroups, complex measures on the group and on
//! the unit circle, the Cauchy and log-Poisson transforms, and executable
//! stationarity diagnostics for random-walk hitting measures.
//!
//! The crate is organized as a pipeline:
//!
//! * [`moebius`] — exact Möbius algebra and the hyperbolic scalar functions;
//! * [`group`] — generator presets and breadth-first group balls;
//! * [`gmeasure`] — finitely supported complex measures on the group,
//!   convolution, and moment/Blaschke diagnostics;
//! * [`cmeasure`] — circle measures (atomic / Fourier band / grid density),
//!   pushforward, and the Markov operator;
//! * [`transforms`] — Cauchy transform, log-Poisson transform, Borel series,
//!   Blaschke products, Hardy norms, and boundary-gap statistics;
//! * [`stationarity`] — the functional-equation residual, drift, operator
//!   sections, contour charges, and Stolz coverage;
//! * [`walk`] — seeded Monte-Carlo walks and empirical hitting measures.
//!
//! Heavy inner loops route through [`exec`]; with the default `parallel`
//! feature they run on rayon, and without it sequentially, with
//! bitwise-identical results either way.

pub mod cmeasure;
pub mod error;
pub mod exec;
pub mod gmeasure;
pub mod group;
pub mod moebius;
pub mod sample;
pub mod stationarity;
pub mod transforms;
pub mod walk;

pub use error::{Error, Result};
