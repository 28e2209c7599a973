//! Secrecy-rate analysis of multiuser massive-MIMO downlinks whose base station
//! uses low-resolution DACs and injects artificial noise (AN).
//!
//! The crate has two layers that cross-check each other:
//!
//! * a Monte Carlo engine ([`montecarlo`]) evaluating per-realization SIQNRs and
//!   eavesdropper capacities on sampled channels ([`channel`]) under the
//!   Bussgang DAC model ([`quantizer`]);
//! * a closed-form layer ([`analytic`]) with the asymptotic user rates, the
//!   eavesdropper capacity bound, secrecy-rate lower bounds, the `beta_bar`,
//!   `alpha_bar` and SNR thresholds, and the optimal power split, plus numeric
//!   counterparts in [`optimizer`].
//!
//! [`experiment`] turns both into CSV sweeps and figure data.

// Negated comparisons are used so that NaN fails parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
pub mod quantizer;
pub mod sampling;

pub use error::{Error, Result};
pub use model::{derive_params, validate_regime, AnKind, DacModel, DerivedParams, SystemConfig};
