//! Finite-blocklength packet-error bounds and peak-age-of-information
//! guarantees for short-packet transmission over MIMO Rayleigh block-fading
//! channels.
//!
//! The crate has two halves that meet at a single scalar, the
//! single-transmission packet error probability:
//!
//! - [`channel`] and [`fbl`] sample pilot-assisted QPSK transmission over
//!   independent fading blocks and evaluate an achievability bound on the
//!   packet error probability by Monte Carlo, with search helpers over the
//!   bound parameter, the pilot count, and the SNR.
//! - [`pgf`], [`age`], and [`queue`] turn that error probability into the
//!   exact distribution of the steady-state peak age of an LCFS queue with
//!   preemption in service and simple ARQ, plus a discrete-event simulator
//!   that validates the analytic path.
//!
//! The [`cli`] module exposes all of it as the `paoi` command-line tool.

pub mod age;
pub mod channel;
pub mod cli;
pub mod error;
pub mod fbl;
pub mod pgf;
pub mod queue;

pub use age::{
    assemble_age_pgf, invert_pgf, limiting_violation, violation_probability, AgeDistribution,
    QueueParams,
};
pub use channel::{sample_block, snn_metric_log, BlockSample, ChannelConfig, PilotMode};
pub use error::{Error, Result};
pub use fbl::{
    default_alpha_grid, info_density_block, min_snr_for_target, optimize_alpha,
    optimize_alpha_auto, optimize_np, optimize_np_scan, rcus_estimate, rcus_estimate_grid,
    refine_alpha, snr_db_to_linear, snr_linear_to_db, CodeConfig, FblEstimate, FblParams,
    SnrSearch,
};
pub use pgf::RationalPgf;
pub use queue::{empirical_violation, run_sim, ArrivalGranularity, SimConfig, SimResult};
