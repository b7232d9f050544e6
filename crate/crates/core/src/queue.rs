//! Frame-level discrete-event simulation of the LCFS queue with preemption
//! in service and simple ARQ over an erasure service.
//!
//! The physical layer is abstracted into a single per-frame failure
//! probability `eps`, mirroring the separation between the packet-error
//! bound and the queueing analysis. The simulator validates the analytic
//! peak-age distribution.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::age::{violation_threshold_frames, QueueParams};
use crate::error::{Error, Result};

/// How per-frame arrivals are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalGranularity {
    /// One Bernoulli(1 - (1-lambda)^n) indicator per frame.
    Frame,
    /// n per-channel-use Bernoulli(lambda) draws, ORed together. The draw
    /// stops at the first arrival; only the indicator and the frame index
    /// matter, so the two modes are statistically identical.
    ChannelUse,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub qp: QueueParams,
    /// Number of peak-age samples to record before stopping.
    pub n_deliveries: u64,
    pub seed: u64,
    pub granularity: ArrivalGranularity,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.qp.validate()?;
        if self.n_deliveries < 1 {
            return Err(Error::Config("n_deliveries >= 1 violated".into()));
        }
        if self.qp.lambda <= 0.0 {
            return Err(Error::Config(
                "lambda > 0 violated: simulation would never deliver".into(),
            ));
        }
        Ok(())
    }
}

/// Counts collected by one simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    /// Histogram of recorded peak ages, in frames.
    pub peak_ages: BTreeMap<u64, u64>,
    /// Number of recorded peak-age samples (the first delivery only
    /// initializes the age reference and is not counted here).
    pub delivered: u64,
    /// Packets discarded because a fresher packet preempted their service.
    pub preempted: u64,
    pub frames_elapsed: u64,
}

impl SimResult {
    pub fn mean_age(&self) -> f64 {
        if self.delivered == 0 {
            return f64::NAN;
        }
        let sum: f64 = self
            .peak_ages
            .iter()
            .map(|(&age, &count)| age as f64 * count as f64)
            .sum();
        sum / self.delivered as f64
    }

    /// Fraction of service attempts that ended in preemption.
    pub fn preemption_fraction(&self) -> f64 {
        self.preempted as f64 / (self.preempted + self.delivered) as f64
    }
}

fn draw_arrival<R: Rng>(rng: &mut R, qp: &QueueParams, granularity: ArrivalGranularity) -> bool {
    match granularity {
        ArrivalGranularity::Frame => {
            let p_arrival = 1.0 - qp.no_arrival_prob();
            rng.random::<f64>() < p_arrival
        }
        ArrivalGranularity::ChannelUse => (0..qp.n).any(|_| rng.random::<f64>() < qp.lambda),
    }
}

/// Runs the simulation until `n_deliveries` peak-age samples are recorded.
///
/// Per frame: an arrival indicator is drawn and the arriving packet is
/// timestamped with the current frame index. If a packet is in service, its
/// decode succeeds with probability `1 - eps`; success takes precedence over
/// a same-frame arrival. On success the packet is delivered at frame end and
/// the peak age `t - T_prev` is recorded; on failure a same-frame arrival
/// preempts the packet in service. A waiting packet starts service at the
/// next frame boundary.
pub fn run_sim(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let qp = cfg.qp;

    let mut peak_ages: BTreeMap<u64, u64> = BTreeMap::new();
    let mut recorded: u64 = 0;
    let mut delivered_total: u64 = 0;
    let mut preempted: u64 = 0;
    let mut entered_service: u64 = 0;
    let mut in_service: Option<u64> = None;
    let mut waiting: Option<u64> = None;
    let mut last_delivered_ts: Option<u64> = None;

    let mut t: u64 = 0;
    while recorded < cfg.n_deliveries {
        t += 1;
        let arrival = draw_arrival(&mut rng, &qp, cfg.granularity);

        if let Some(ts) = in_service {
            let success = rng.random::<f64>() < 1.0 - qp.eps;
            if success {
                if let Some(prev) = last_delivered_ts {
                    *peak_ages.entry(t - prev).or_insert(0) += 1;
                    recorded += 1;
                }
                delivered_total += 1;
                last_delivered_ts = Some(ts);
                in_service = None;
                if arrival {
                    waiting = Some(t);
                }
            } else if arrival {
                preempted += 1;
                in_service = None;
                waiting = Some(t);
            }
        } else if arrival {
            waiting = Some(t);
        }

        // Frame boundary: a waiting packet enters service.
        if in_service.is_none() {
            in_service = waiting.take();
            if in_service.is_some() {
                entered_service += 1;
            }
        }
    }

    // Conservation: every packet that entered service was delivered,
    // preempted, or is still in flight.
    assert_eq!(
        entered_service,
        delivered_total + preempted + u64::from(in_service.is_some())
    );

    Ok(SimResult {
        peak_ages,
        delivered: recorded,
        preempted,
        frames_elapsed: t,
    })
}

/// Empirical violation probability `P[A >= a/n]` with binomial standard
/// error, using the same inclusive integer-threshold convention as the
/// analytic path.
pub fn empirical_violation(res: &SimResult, a: f64, n: u32) -> Result<(f64, f64)> {
    if res.delivered < 1 {
        return Err(Error::Config("no recorded deliveries".into()));
    }
    let threshold = violation_threshold_frames(a, n) as u64;
    let hits: u64 = res
        .peak_ages
        .range(threshold..)
        .map(|(_, &count)| count)
        .sum();
    let total = res.delivered as f64;
    let p = hits as f64 / total;
    let se = (p * (1.0 - p) / total).sqrt();
    Ok((p, se))
}
