//! Synthetic time-series pairs with known warps, four dynamic time warping
//! variants, and the metrics used to score them.
//!
//! The crate is organised bottom-up:
//!
//! * [`synthesis`] generates reference signals and deforms them while
//!   recording the true index correspondence.
//! * [`dtw`] aligns two series with DTW, DDTW, WDTW or WDDTW, optionally
//!   inside a band around the (scaled) diagonal.
//! * [`metrics`] scores an alignment (ADM, ADT, AADFT, Euclidean).
//! * [`weightopt`] tunes the logistic weight steepness by Monte Carlo sampling.
//! * [`fitter`] recovers a deformation plan between two signals by simulated
//!   annealing and quantifies the scaling and peak effects it finds.
//! * [`classify`] builds parent/offspring datasets and runs 1-NN.
//! * [`search`] computes curvature/torsion profiles of 3-D polylines and runs
//!   a sliding-window search over them.
//! * [`bench`] drives whole experiment suites and aggregates reports.
//! * [`cli`] is the command-line frontend used by the `warpbench` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod classify;
pub mod cli;
pub mod dtw;
mod error;
pub mod fitter;
pub mod metrics;
pub mod search;
pub mod seed;
mod series;
pub mod synthesis;
pub mod weightopt;

pub use error::{Error, Result};
pub use series::Series;
