//! Beamforming for reconfigurable intelligent surfaces with phase-dependent
//! amplitude response and transceiver hardware impairments.
//!
//! The numerical core is generic over [`scalar::Real`]; the aliases below
//! fix it to `f64` or `f32`.
//!
//! ```
//! use risbf::{ChannelParams, ImpairmentParams, PhaseModelParams, SolverConfig};
//!
//! # fn main() -> risbf::Result<()> {
//! let real = ChannelParams { m: 4, n: 8, seed: 1, ..Default::default() }.realize::<f64>()?;
//! let imp = ImpairmentParams::from_snr_db(0.0025, 0.0025, 10.0)?;
//! let report = risbf::solve(&real, &imp, &PhaseModelParams::default(), &SolverConfig::default())?;
//! assert!(report.final_se() <= risbf::upper_bound(4, &imp)?);
//! # Ok(())
//! # }
//! ```

pub mod baselines;
pub mod channel;
pub mod error;
pub mod hardware;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod optimizer;
pub mod scalar;

pub use baselines::{pga_solve, random_solve, PgaConfig, StepRule};
pub use channel::{generate_realization, rng_from_seed, ChannelParams};
pub use error::{Error, Result};
pub use hardware::{amplitude_response, feasible_point, reflection_coefficient, wrap_phase};
pub use metrics::{spectral_efficiency, upper_bound};
pub use optimizer::{solve, InitStrategy, SolverConfig, Termination};

pub type Complex64 = scalar::Cx<f64>;
pub type Complex32 = scalar::Cx<f32>;

pub type ChannelRealization = channel::ChannelRealization<f64>;
pub type ChannelRealization32 = channel::ChannelRealization<f32>;
pub type PhaseModelParams = hardware::PhaseModelParams<f64>;
pub type PhaseModelParams32 = hardware::PhaseModelParams<f32>;
pub type ReflectionState = hardware::ReflectionState<f64>;
pub type ReflectionState32 = hardware::ReflectionState<f32>;
pub type ImpairmentParams = metrics::ImpairmentParams<f64>;
pub type ImpairmentParams32 = metrics::ImpairmentParams<f32>;
pub type SolveReport = optimizer::SolveReport<f64>;
pub type SolveReport32 = optimizer::SolveReport<f32>;
