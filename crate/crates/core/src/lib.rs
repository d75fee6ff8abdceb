//! Approximation algorithms for diversification problems.
//!
//! * [`ranking`]: rankings that cover sets early under the DCG discount.
//! * [`dispersion`]: pick `p` points of a metric space with large pairwise
//!   distance sum.
//! * [`dks`]: densest `k`-subgraph with a forced set and a submodular bonus.
//! * [`diversification`]: dispersion plus a monotone submodular term.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod dispersion;
pub mod diversification;
pub mod dks;
pub mod error;
pub mod io;
pub mod lp;
pub mod metric;
pub mod ranking;
pub mod rng;
mod scalar;
pub mod setsystem;
pub mod submodular;

pub use dks::DksInstance;
pub use error::{Error, Result};
pub use metric::{MetricInstance, MetricReport};
pub use ranking::{GainFunction, Ranking};
pub use rng::RngState;
pub use scalar::Real;
pub use setsystem::{CoverSet, SetSystemInstance};
pub use submodular::{SetFunction, SubmodularSpec};

pub type Metric = MetricInstance<f64>;
pub type Submodular = SubmodularSpec<f64>;
