//! Simulation and design toolkit for differential spatiotemporally-modulated
//! (STM) magnetless circulators.
//!
//! * [`analytic`] - closed-form voltage-mode and current-mode small-signal models
//! * [`design`] - isolation solver, design charts and the reference design
//! * [`tdsim`] - time-domain LPTV oracle (periodic steady state, spectra, S-parameters)
//! * [`metrics`] - IL/RL/IX and bandwidth extraction
//!
//! Conventions: angular frequencies in rad/s, phasors in the `e^{+jwt}` convention,
//! and column `j` of every S-matrix holds the response to an excitation at port `j`.

pub mod analytic;
pub mod design;
pub mod error;
pub mod metrics;
pub mod params;
pub mod sparams;
pub mod tdsim;

pub use error::{Error, Result};
pub use metrics::{metrics, metrics_at, MetricSet, Thresholds};
pub use params::{derive, CircuitParams, DerivedParams, Direction, ModulationParams};
pub use sparams::SParameterSet;

pub use num_complex::Complex64;
