//! Peak-age-of-information distribution for the LCFS queue with preemption
//! in service and simple ARQ.
//!
//! Time is organized in frames of `n` channel uses. Packets arrive per
//! channel use with probability `lambda` and each frame-long transmission
//! attempt fails independently with probability `eps`. The steady-state peak
//! age `A` (measured in frames) has a rational PGF assembled from geometric
//! building blocks; its pmf follows by exact series expansion, and the
//! violation probability `P[A >= a/n]` by summing the complementary CDF.

use crate::error::{Error, Result};
use crate::pgf::RationalPgf;

/// Arrival, framing, and per-round error parameters of the queue model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    /// Per-channel-use arrival probability, in [0, 1].
    pub lambda: f64,
    /// Frame length in channel uses.
    pub n: u32,
    /// Single-transmission packet error probability, in [0, 1).
    pub eps: f64,
}

impl QueueParams {
    pub fn new(lambda: f64, n: u32, eps: f64) -> Result<Self> {
        let qp = QueueParams { lambda, n, eps };
        qp.validate()?;
        Ok(qp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) || !self.lambda.is_finite() {
            return Err(Error::Config(format!(
                "lambda in [0, 1] violated (lambda = {})",
                self.lambda
            )));
        }
        if self.n < 1 {
            return Err(Error::Config("n >= 1 violated (n = 0)".into()));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::Config(format!(
                "eps in [0, 1) violated (eps = {})",
                self.eps
            )));
        }
        Ok(())
    }

    /// Probability that a frame carries no arrival: `(1 - lambda)^n`,
    /// evaluated in the log domain so that lambda near 1 underflows cleanly
    /// to 0 instead of losing precision.
    pub fn no_arrival_prob(&self) -> f64 {
        if self.lambda == 1.0 {
            return 0.0;
        }
        (f64::from(self.n) * (-self.lambda).ln_1p()).exp()
    }
}

/// Truncated pmf of the steady-state peak age, in frames.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeDistribution {
    /// `pmf[m] = P[A = m]` for `m = 0 ..= truncation`.
    pub pmf: Vec<f64>,
    pub truncation: usize,
    /// Probability mass beyond the truncation order: `1 - sum(pmf)`.
    pub tail_mass: f64,
}

/// Assembles the rational PGF of the steady-state peak age from the queue
/// parameters.
///
/// The peak age is the interarrival time of the delivered packet plus a
/// geometric number of uninterrupted service times:
/// `G_A = G_T0 * p G_H0 / (1 - (1-p) G_H0)` with `q_f = (1 - lambda)^n`,
/// `beta = eps q_f`, and `p = (1 - eps) / (1 - beta)`. That composition
/// telescopes exactly: `(1-p)(1-beta) = eps (1-q_f)` collapses it to
///
/// ```text
/// G_A(s) = (1-q_f)(1-beta)(1-eps) s^2 / [(1-q_f s)(1-beta s)(1-eps s)]
/// ```
///
/// which is the form constructed here; the few coefficient roundings keep
/// `G_A(1) = 1` well within 1e-10 over the whole parameter range. Tests
/// verify the identity against the step-by-step composition.
pub fn assemble_age_pgf(qp: &QueueParams) -> Result<RationalPgf> {
    qp.validate()?;
    if qp.lambda == 0.0 {
        return Err(Error::Config(
            "lambda > 0 violated: no arrivals, no steady state".into(),
        ));
    }
    let q_f = qp.no_arrival_prob();
    let beta = qp.eps * q_f;
    let scale = (1.0 - q_f) * (1.0 - beta) * (1.0 - qp.eps);
    // den = (1 - q_f s)(1 - beta s)(1 - eps s), expanded.
    let den = [q_f, beta, qp.eps].iter().fold(vec![1.0], |acc, &root| {
        let mut out = vec![0.0; acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            out[i] += c;
            out[i + 1] -= c * root;
        }
        out
    });
    RationalPgf::new(vec![0.0, 0.0, scale], den)
}

/// Expands a proper PGF into a truncated pmf.
///
/// The input must evaluate to 1 at `s = 1` (within 1e-8). Coefficients more
/// negative than -1e-9 indicate catastrophic cancellation or an invalid PGF
/// and are reported as a numerical error.
pub fn invert_pgf(g: &RationalPgf, m: usize) -> Result<AgeDistribution> {
    let at_one = g.eval(1.0);
    if (at_one - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "invert_pgf: input is not a normalized PGF (G(1) = {at_one})"
        )));
    }
    let pmf = g.series(m);
    for (i, &c) in pmf.iter().enumerate() {
        if !c.is_finite() || c < -1e-9 {
            return Err(Error::Numerical(format!(
                "invert_pgf: unstable series coefficient c[{i}] = {c}"
            )));
        }
    }
    let tail_mass = 1.0 - pmf.iter().sum::<f64>();
    Ok(AgeDistribution {
        pmf,
        truncation: m,
        tail_mass,
    })
}

/// Smallest integer age (in frames) that violates the threshold `a` channel
/// uses, i.e. the least integer `>= a/n`. The event `A >= a/n` is inclusive
/// at integer thresholds.
pub fn violation_threshold_frames(a: f64, n: u32) -> usize {
    (a / f64::from(n)).ceil().max(0.0) as usize
}

/// Peak-age violation probability `P[A >= a/n]` with the threshold `a` in
/// channel uses.
pub fn violation_probability(qp: &QueueParams, a: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::Config(format!("a > 0 violated (a = {a})")));
    }
    let t = violation_threshold_frames(a, qp.n);
    let g = assemble_age_pgf(qp)?;
    let dist = invert_pgf(&g, t.saturating_sub(1))?;
    let below: f64 = dist.pmf.iter().take(t).sum();
    Ok((1.0 - below).clamp(0.0, 1.0))
}

/// Closed-form limit of the violation probability as `lambda -> 1`.
///
/// In that regime the peak age is `1 + H` frames with `H ~ Geom(1 - eps)` on
/// {1, 2, ...}, so `P[A >= a/n] = P[H >= a/n - 1] = eps^(ceil(a/n - 1) - 1)`
/// whenever the threshold exceeds the one-frame minimum, and 1 otherwise.
pub fn limiting_violation(eps: f64, n: u32, a: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Config(format!(
            "eps in [0, 1) violated (eps = {eps})"
        )));
    }
    if n < 1 || a.is_nan() || a <= 0.0 {
        return Err(Error::Config("a > 0 and n >= 1 violated".into()));
    }
    let x = a / f64::from(n) - 1.0;
    let t = x.ceil();
    if t <= 1.0 {
        return Ok(1.0);
    }
    Ok(eps.powi(t as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force construction of the peak-age pmf by truncated convolution
    /// of the probabilistic building blocks, independent of the rational
    /// series recurrence.
    pub(crate) fn convolution_oracle(qp: &QueueParams, m: usize) -> Vec<f64> {
        let q_f = qp.no_arrival_prob();
        let beta = qp.eps * q_f;
        let p = (1.0 - qp.eps) / (1.0 - beta);
        let geom = |cont: f64, i: usize| {
            if i == 0 {
                0.0
            } else {
                (1.0 - cont) * cont.powi(i as i32 - 1)
            }
        };
        // T0 pmf: (pmf_T - (1-p) pmf_H0) / p.
        let t0: Vec<f64> = (0..=m)
            .map(|i| (geom(q_f, i) - (1.0 - p) * geom(beta, i)) / p)
            .collect();
        let h0: Vec<f64> = (0..=m).map(|i| geom(beta, i)).collect();
        // Geometric compound sum_{j>=1} p (1-p)^{j-1} h0^{*j}, truncated.
        let mut compound = vec![0.0; m + 1];
        let mut conv = h0.clone();
        let mut weight = p;
        for _ in 1..=m {
            for i in 0..=m {
                compound[i] += weight * conv[i];
            }
            weight *= 1.0 - p;
            let mut next = vec![0.0; m + 1];
            for a in 1..=m {
                if conv[a] == 0.0 {
                    continue;
                }
                for b in 1..=(m - a) {
                    next[a + b] += conv[a] * h0[b];
                }
            }
            conv = next;
        }
        let mut pmf = vec![0.0; m + 1];
        for a in 1..=m {
            if t0[a] == 0.0 {
                continue;
            }
            for b in 1..=(m - a) {
                pmf[a + b] += t0[a] * compound[b];
            }
        }
        pmf
    }

    #[test]
    fn deterministic_point_gives_s_squared() {
        let qp = QueueParams::new(1.0, 17, 0.0).unwrap();
        let g = assemble_age_pgf(&qp).unwrap();
        assert_eq!(g.num(), &[0.0, 0.0, 1.0]);
        assert_eq!(g.den(), &[1.0]);
        let dist = invert_pgf(&g, 5).unwrap();
        assert_eq!(dist.pmf, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn error_free_service_is_never_preempted() {
        // p = 1 when eps = 0, so the compound collapses to a single service.
        for lambda in [0.01, 0.3, 0.9] {
            let qp = QueueParams::new(lambda, 100, 0.0).unwrap();
            let g = assemble_age_pgf(&qp).unwrap();
            assert!((g.eval(1.0) - 1.0).abs() < 1e-10);
            // A = T + 1: shifting the interarrival PGF by one frame.
            let q_f = qp.no_arrival_prob();
            let dist = invert_pgf(&g, 30).unwrap();
            for m in 2..=30 {
                let expect = (1.0 - q_f) * q_f.powi(m as i32 - 2);
                assert!((dist.pmf[m] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_arrivals_is_a_config_error() {
        let qp = QueueParams::new(0.0, 100, 0.1).unwrap();
        assert!(matches!(assemble_age_pgf(&qp), Err(Error::Config(_))));
    }

    #[test]
    fn geometric_service_pmf_matches_closed_form() {
        // beta = eps * q_f = 0.3 exercised through the full assembly at
        // lambda = 1 - it reduces to the pure retransmission chain.
        let g = RationalPgf::new(vec![0.0, 0.7], vec![1.0, -0.3]).unwrap();
        let dist = invert_pgf(&g, 50).unwrap();
        for m in 1..=50 {
            let expect = 0.7 * 0.3f64.powi(m as i32 - 1);
            assert!((dist.pmf[m] - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn inversion_matches_convolution_oracle() {
        let qp = QueueParams::new(0.05, 100, 0.05).unwrap();
        let g = assemble_age_pgf(&qp).unwrap();
        let dist = invert_pgf(&g, 200).unwrap();
        let oracle = convolution_oracle(&qp, 200);
        for m in 0..=200 {
            assert!(
                (dist.pmf[m] - oracle[m]).abs() < 1e-9,
                "m={m}: {} vs {}",
                dist.pmf[m],
                oracle[m]
            );
        }
    }

    #[test]
    fn closed_form_matches_step_by_step_composition() {
        // Build G_A the long way: interarrival conditioned on delivery
        // times the geometric compound of conditional service times.
        for (lambda, n, eps) in [
            (0.01f64, 100u32, 0.3f64),
            (0.5, 10, 0.9),
            (0.9, 1, 0.05),
            (0.001, 400, 0.7),
        ] {
            let qp = QueueParams::new(lambda, n, eps).unwrap();
            let q_f = qp.no_arrival_prob();
            let beta = eps * q_f;
            let p = (1.0 - eps) / (1.0 - beta);
            let g_h0 = RationalPgf::new(vec![0.0, 1.0 - beta], vec![1.0, -beta]).unwrap();
            let g_t = RationalPgf::new(vec![0.0, 1.0 - q_f], vec![1.0, -q_f]).unwrap();
            let g_t0 = g_t
                .sub(&g_h0.scale(1.0 - p).unwrap())
                .unwrap()
                .scale(1.0 / p)
                .unwrap();
            let compound = g_h0
                .scale(p)
                .unwrap()
                .div(
                    &RationalPgf::constant(1.0)
                        .sub(&g_h0.scale(1.0 - p).unwrap())
                        .unwrap(),
                )
                .unwrap();
            let composed = g_t0.mul(&compound).unwrap();
            let direct = assemble_age_pgf(&qp).unwrap();
            let (a, b) = (composed.series(120), direct.series(120));
            for m in 0..=120 {
                assert!(
                    (a[m] - b[m]).abs() <= 1e-12,
                    "lambda={lambda} eps={eps} m={m}: {} vs {}",
                    a[m],
                    b[m]
                );
            }
            assert!((composed.eval(0.7) - direct.eval(0.7)).abs() < 1e-12);
        }
    }

    #[test]
    fn support_floor_is_two_frames() {
        for (lambda, eps) in [(0.01, 0.3), (0.5, 0.9), (1.0, 0.146), (0.09, 0.0032)] {
            let qp = QueueParams::new(lambda, 100, eps).unwrap();
            let dist = invert_pgf(&assemble_age_pgf(&qp).unwrap(), 10).unwrap();
            assert_eq!(dist.pmf[0], 0.0);
            assert_eq!(dist.pmf[1], 0.0);
        }
    }

    #[test]
    fn violation_is_one_below_the_support_floor() {
        let qp = QueueParams::new(1.0, 100, 0.0).unwrap();
        assert_eq!(violation_probability(&qp, 150.0).unwrap(), 1.0);
        assert_eq!(violation_probability(&qp, 200.0).unwrap(), 1.0);
        // A == 2 exactly, so any threshold beyond 2 frames is never hit.
        assert_eq!(violation_probability(&qp, 201.0).unwrap(), 0.0);
    }

    #[test]
    fn paper_checkpoints_near_the_limit() {
        // lambda = 0.09 at a = 400 and lambda = 0.05 at a = 800 operate
        // within a few percent of the lambda -> 1 limit.
        let qp = QueueParams::new(0.09, 100, 3.2e-3).unwrap();
        let v = violation_probability(&qp, 400.0).unwrap();
        assert!((v - 1.0503048e-5).abs() < 1e-10, "got {v}");
        let lim = limiting_violation(3.2e-3, 100, 400.0).unwrap();
        assert!((v - lim).abs() / lim < 0.10);

        let qp = QueueParams::new(0.05, 100, 1.46e-1).unwrap();
        let v = violation_probability(&qp, 800.0).unwrap();
        assert!((v - 1.0086023e-5).abs() < 1e-10, "got {v}");
        let lim = limiting_violation(1.46e-1, 100, 800.0).unwrap();
        assert!((v - lim).abs() / lim < 0.10);
    }

    #[test]
    fn limiting_violation_closed_forms() {
        let v = limiting_violation(3.2e-3, 100, 400.0).unwrap();
        assert!((v - 1.024e-5).abs() / 1.024e-5 < 1e-12);
        let v = limiting_violation(1.46e-1, 100, 800.0).unwrap();
        assert!((v - 0.146f64.powi(6)).abs() / v < 1e-12);
        // Error-free service delivers in one frame; age is always 2 frames.
        assert_eq!(limiting_violation(0.0, 100, 300.0).unwrap(), 0.0);
        assert_eq!(limiting_violation(0.9, 100, 200.0).unwrap(), 1.0);
    }

    #[test]
    fn violation_agrees_with_limit_as_lambda_approaches_one() {
        for (eps, a) in [(0.1, 700.0), (0.3, 400.0), (0.146, 800.0)] {
            let qp = QueueParams::new(1.0 - 1e-12, 100, eps).unwrap();
            let v = violation_probability(&qp, a).unwrap();
            let lim = limiting_violation(eps, 100, a).unwrap();
            assert!((v - lim).abs() < 1e-8, "eps={eps} a={a}: {v} vs {lim}");
        }
    }

    proptest! {
        #[test]
        fn pgf_is_normalized_and_nonnegative(
            lambda in 1e-4f64..1.0,
            eps in 0.0f64..0.999,
            n in 1u32..400,
        ) {
            let qp = QueueParams::new(lambda, n, eps).unwrap();
            let g = assemble_age_pgf(&qp).unwrap();
            prop_assert!((g.eval(1.0) - 1.0).abs() < 1e-10);
            let dist = invert_pgf(&g, 100).unwrap();
            for &c in &dist.pmf {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
            }
            prop_assert_eq!(dist.pmf[0], 0.0);
            prop_assert_eq!(dist.pmf[1], 0.0);
        }
    }
}
