//! Monte Carlo evaluation of the random-coding union achievability bound
//! for pilot-assisted QPSK over MIMO Rayleigh block fading with mismatched
//! scaled nearest-neighbor decoding, plus search helpers over the bound
//! parameter, the pilot count, and the SNR.
//!
//! The per-sample quantity is the generalized information density summed
//! over the coherence blocks of one packet. For a data channel use with
//! received column `y` the density contribution is
//!
//! ```text
//! -alpha ||y - H_hat x||^2 - log( 4^-m_t * sum_xbar exp(-alpha ||y - H_hat xbar||^2) )
//! ```
//!
//! where the inner expectation runs exactly over all `4^m_t` scaled-QPSK
//! candidate columns. The bound is the mean over channel realizations of
//! `exp(-[sum_j density_j - log(2^k - 1)]^+)`.
//!
//! Every Monte Carlo sample index maps to its own counter-mode RNG stream of
//! the master seed, and partial sums are reduced in fixed batch order, so
//! results are bit-identical for a given `(seed, config)` regardless of the
//! worker count. Grid evaluations (over alpha, pilot counts, or SNR) reuse
//! the same per-sample streams: common random numbers couple every point of
//! a sweep through identical fading, noise, and payload draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    candidate_matrix, draw_cn01, pilot_matrix, BlockSample, ChannelConfig, PilotMode,
};
use crate::error::{Error, Result};

/// Payload size and coded packet length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeConfig {
    /// Information bits per packet.
    pub k: u32,
    /// Coded packet length in channel uses.
    pub n: usize,
}

impl CodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::Config("k >= 1 violated (k = 0)".into()));
        }
        if self.n < 1 {
            return Err(Error::Config("n >= 1 violated (n = 0)".into()));
        }
        Ok(())
    }

    /// Transmission rate in bits per channel use.
    pub fn rate(&self) -> f64 {
        f64::from(self.k) / self.n as f64
    }

    /// `log(2^k - 1)`, computed as `k log 2 + log1p(-2^-k)` so it stays
    /// exact to double precision for any k.
    pub fn log_codebook_minus_one(&self) -> f64 {
        let k = f64::from(self.k);
        k * std::f64::consts::LN_2 + (-(-k).exp2()).ln_1p()
    }
}

/// Monte Carlo budget and bound parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FblParams {
    /// Bound parameter alpha >= 0.
    pub alpha: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Worker threads. Results do not depend on this value.
    pub workers: usize,
}

impl FblParams {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::Config(format!(
                "alpha >= 0 violated (alpha = {})",
                self.alpha
            )));
        }
        if self.n_samples < 1 {
            return Err(Error::Config("n_samples >= 1 violated".into()));
        }
        if self.workers < 1 {
            return Err(Error::Config("workers >= 1 violated".into()));
        }
        Ok(())
    }
}

/// Monte Carlo estimate of the error-probability bound together with the
/// parameters that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FblEstimate {
    pub eps_mean: f64,
    /// Standard error of the mean (population variance over sqrt N).
    pub std_err: f64,
    pub n_samples: u64,
    pub alpha: f64,
    pub n_p: usize,
    pub rho: f64,
}

/// Linear SNR from decibels.
pub fn snr_db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Decibels from a linear SNR.
pub fn snr_linear_to_db(rho: f64) -> f64 {
    10.0 * rho.log10()
}

/// Coarse search grid for alpha: 0.1 to 3.0 in steps of 0.1.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=30).map(|i| f64::from(i) * 0.1).collect()
}

/// Generalized information density of one coherence block.
///
/// Exact over the candidate alphabet: the inner expectation enumerates all
/// `4^m_t` scaled-QPSK columns, with the log-sum computed in shifted
/// (log-sum-exp) form. `alpha = 0` and `H_hat = 0` both give exactly 0.
pub fn info_density_block(alpha: f64, sample: &BlockSample) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Config(format!(
            "alpha >= 0 violated (alpha = {alpha})"
        )));
    }
    let (m_r, m_t) = sample.h_hat.dim();
    if sample.h.dim() != (m_r, m_t)
        || sample.x_d.nrows() != m_t
        || sample.y_d.nrows() != m_r
        || sample.x_d.ncols() != sample.y_d.ncols()
    {
        return Err(Error::Dimension(
            "info_density_block: sample matrices disagree on antenna counts or data length".into(),
        ));
    }
    let k = 1usize << (2 * m_t);
    let ln_k = (k as f64).ln();
    let cand = candidate_matrix(m_t, sample.rho);
    let v = sample.h_hat.dot(&cand); // m_r x K candidate images

    let mut d = vec![0.0; k];
    let mut iota = 0.0;
    for i in 0..sample.y_d.ncols() {
        d.fill(0.0);
        let mut d_tx = 0.0;
        for r in 0..m_r {
            let y = sample.y_d[(r, i)];
            for (c, dc) in d.iter_mut().enumerate() {
                *dc += (y - v[(r, c)]).norm_sqr();
            }
            let mut z = y;
            for t in 0..m_t {
                z -= sample.h_hat[(r, t)] * sample.x_d[(t, i)];
            }
            d_tx += z.norm_sqr();
        }
        let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let s: f64 = d.iter().map(|&dc| (-alpha * (dc - d_min)).exp()).sum();
        let contrib = -alpha * (d_tx - d_min) + ln_k - s.ln();
        if !contrib.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite information density at data use {i}"
            )));
        }
        iota += contrib;
    }
    Ok(iota)
}

/// Samples per RNG batch. Fixed so that the reduction order, and therefore
/// the result, is independent of the worker count.
const BATCH_SIZE: u64 = 1024;

/// Product spill threshold: per-use metric sums lie in [1, 4^m_t], so the
/// running product is folded into a log before it can overflow.
const PRODUCT_SPILL: f64 = 1e280;

enum AlphaPlan {
    /// Ascending arithmetic grid: per-candidate exponentials are advanced by
    /// repeated multiplication instead of one `exp` per grid point.
    Uniform {
        step: f64,
    },
    List,
}

fn classify_grid(alphas: &[f64]) -> AlphaPlan {
    if alphas.len() < 3 {
        return AlphaPlan::List;
    }
    let step = alphas[1] - alphas[0];
    if step <= 0.0 {
        return AlphaPlan::List;
    }
    for w in alphas.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-12 {
            return AlphaPlan::List;
        }
    }
    AlphaPlan::Uniform { step }
}

/// Shared, read-only state for one Monte Carlo run over an alpha grid.
struct GridEval<'a> {
    cfg: ChannelConfig,
    alphas: &'a [f64],
    plan: AlphaPlan,
    n_d: usize,
    k: usize,
    /// Candidate columns, split real/imaginary, indexed `t * k + c`.
    cand_re: Vec<f64>,
    cand_im: Vec<f64>,
    /// Conjugated pilot matrix (`t * n_p + p`), Explicit mode only.
    pilot_conj: Option<(Vec<f64>, Vec<f64>)>,
    sigma_e: f64,
    total_uses_ln_k: f64,
    log_m1: f64,
}

/// Per-worker scratch buffers, reused across samples.
struct Scratch {
    h_re: Vec<f64>,
    h_im: Vec<f64>,
    hh_re: Vec<f64>,
    hh_im: Vec<f64>,
    v_re: Vec<f64>,
    v_im: Vec<f64>,
    g_re: Vec<f64>,
    g_im: Vec<f64>,
    wp_re: Vec<f64>,
    wp_im: Vec<f64>,
    sym: Vec<u8>,
    idx: Vec<usize>,
    w_re: Vec<f64>,
    w_im: Vec<f64>,
    d: Vec<f64>,
    base: Vec<f64>,
    ratio: Vec<f64>,
    log_s: Vec<f64>,
    prod: Vec<f64>,
}

impl<'a> GridEval<'a> {
    fn new(ch: &ChannelConfig, code: &CodeConfig, alphas: &'a [f64]) -> Result<Self> {
        ch.validate()?;
        code.validate()?;
        if code.n != ch.packet_len() {
            return Err(Error::Config(format!(
                "n = ell * n_c violated (n = {}, ell * n_c = {})",
                code.n,
                ch.packet_len()
            )));
        }
        if alphas.is_empty() {
            return Err(Error::Config("alpha grid must be nonempty".into()));
        }
        for &a in alphas {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::Config(format!("alpha >= 0 violated (alpha = {a})")));
            }
        }
        let k = 1usize << (2 * ch.m_t);
        let cand = candidate_matrix(ch.m_t, ch.rho);
        let mut cand_re = vec![0.0; ch.m_t * k];
        let mut cand_im = vec![0.0; ch.m_t * k];
        for t in 0..ch.m_t {
            for c in 0..k {
                cand_re[t * k + c] = cand[(t, c)].re;
                cand_im[t * k + c] = cand[(t, c)].im;
            }
        }
        let pilot_conj = match ch.pilot_mode {
            PilotMode::Equivalent => None,
            PilotMode::Explicit => {
                let xp = pilot_matrix(ch.m_t, ch.n_p, ch.rho);
                let mut re = vec![0.0; ch.m_t * ch.n_p];
                let mut im = vec![0.0; ch.m_t * ch.n_p];
                for t in 0..ch.m_t {
                    for p in 0..ch.n_p {
                        re[t * ch.n_p + p] = xp[(t, p)].re;
                        im[t * ch.n_p + p] = -xp[(t, p)].im;
                    }
                }
                Some((re, im))
            }
        };
        let n_d = ch.data_uses();
        let ln_k = (k as f64).ln();
        Ok(GridEval {
            cfg: *ch,
            alphas,
            plan: classify_grid(alphas),
            n_d,
            k,
            cand_re,
            cand_im,
            pilot_conj,
            sigma_e: ch.estimate_error_variance().sqrt(),
            total_uses_ln_k: (ch.ell * n_d) as f64 * ln_k,
            log_m1: code.log_codebook_minus_one(),
        })
    }

    fn scratch(&self) -> Scratch {
        let (m_r, m_t) = (self.cfg.m_r, self.cfg.m_t);
        let n_a = self.alphas.len();
        Scratch {
            h_re: vec![0.0; m_r * m_t],
            h_im: vec![0.0; m_r * m_t],
            hh_re: vec![0.0; m_r * m_t],
            hh_im: vec![0.0; m_r * m_t],
            v_re: vec![0.0; m_r * self.k],
            v_im: vec![0.0; m_r * self.k],
            g_re: vec![0.0; m_r * self.k],
            g_im: vec![0.0; m_r * self.k],
            wp_re: vec![0.0; m_r * self.cfg.n_p],
            wp_im: vec![0.0; m_r * self.cfg.n_p],
            sym: vec![0; m_t * self.n_d],
            idx: vec![0; self.n_d],
            w_re: vec![0.0; m_r * self.n_d],
            w_im: vec![0.0; m_r * self.n_d],
            d: vec![0.0; self.k],
            base: vec![0.0; self.k],
            ratio: vec![0.0; self.k],
            log_s: vec![0.0; n_a],
            prod: vec![0.0; n_a],
        }
    }

    /// Draws one packet (ell blocks) and accumulates, for every alpha, the
    /// log of the per-use metric expectations. The random draws replicate
    /// `channel::sample_block` exactly: fading, estimation noise, symbol
    /// indices, then data noise, each row-major.
    ///
    /// Returns the total transmitted-metric excess `sum_i (d_tx - d_min)`.
    fn eval_sample<R: Rng>(&self, s: &mut Scratch, rng: &mut R) -> f64 {
        let (n_d, k) = (self.n_d, self.k);
        let (m_r, m_t) = (self.cfg.m_r, self.cfg.m_t);
        let n_a = self.alphas.len();
        s.log_s.fill(0.0);
        s.prod.fill(1.0);
        let mut d_excess = 0.0;

        for _ in 0..self.cfg.ell {
            for j in 0..m_r * m_t {
                let z = draw_cn01(rng);
                s.h_re[j] = z.re;
                s.h_im[j] = z.im;
            }
            match self.pilot_conj {
                None => {
                    for j in 0..m_r * m_t {
                        let z = draw_cn01(rng);
                        s.hh_re[j] = s.h_re[j] + self.sigma_e * z.re;
                        s.hh_im[j] = s.h_im[j] + self.sigma_e * z.im;
                    }
                }
                Some((ref xpc_re, ref xpc_im)) => {
                    let n_p = self.cfg.n_p;
                    for j in 0..m_r * n_p {
                        let z = draw_cn01(rng);
                        s.wp_re[j] = z.re;
                        s.wp_im[j] = z.im;
                    }
                    let scale = m_t as f64 / (self.cfg.rho * n_p as f64);
                    for r in 0..m_r {
                        for t in 0..m_t {
                            let mut acc_re = 0.0;
                            let mut acc_im = 0.0;
                            for p in 0..n_p {
                                let wre = s.wp_re[r * n_p + p];
                                let wim = s.wp_im[r * n_p + p];
                                let xre = xpc_re[t * n_p + p];
                                let xim = xpc_im[t * n_p + p];
                                acc_re += wre * xre - wim * xim;
                                acc_im += wre * xim + wim * xre;
                            }
                            s.hh_re[r * m_t + t] = s.h_re[r * m_t + t] + scale * acc_re;
                            s.hh_im[r * m_t + t] = s.h_im[r * m_t + t] + scale * acc_im;
                        }
                    }
                }
            }

            // Candidate images under the estimated and the true channel.
            s.v_re.fill(0.0);
            s.v_im.fill(0.0);
            s.g_re.fill(0.0);
            s.g_im.fill(0.0);
            for r in 0..m_r {
                let vo = r * k;
                for t in 0..m_t {
                    let hre = s.hh_re[r * m_t + t];
                    let him = s.hh_im[r * m_t + t];
                    let gre = s.h_re[r * m_t + t];
                    let gim = s.h_im[r * m_t + t];
                    let co = t * k;
                    for c in 0..k {
                        let cre = self.cand_re[co + c];
                        let cim = self.cand_im[co + c];
                        s.v_re[vo + c] += hre * cre - him * cim;
                        s.v_im[vo + c] += hre * cim + him * cre;
                        s.g_re[vo + c] += gre * cre - gim * cim;
                        s.g_im[vo + c] += gre * cim + gim * cre;
                    }
                }
            }

            // Same index stream as `draw_symbol_indices`, without the
            // per-block allocation.
            for j in 0..m_t * n_d {
                s.sym[j] = rng.random_range(0..4u8);
            }
            for i in 0..n_d {
                let mut ci = 0usize;
                for t in 0..m_t {
                    ci |= (s.sym[t * n_d + i] as usize) << (2 * t);
                }
                s.idx[i] = ci;
            }
            for j in 0..m_r * n_d {
                let z = draw_cn01(rng);
                s.w_re[j] = z.re;
                s.w_im[j] = z.im;
            }

            for i in 0..n_d {
                let ci = s.idx[i];
                s.d.fill(0.0);
                for r in 0..m_r {
                    let off = r * k;
                    let yre = s.g_re[off + ci] + s.w_re[r * n_d + i];
                    let yim = s.g_im[off + ci] + s.w_im[r * n_d + i];
                    for c in 0..k {
                        let dr = yre - s.v_re[off + c];
                        let di = yim - s.v_im[off + c];
                        s.d[c] += dr * dr + di * di;
                    }
                }
                let d_min = s.d.iter().cloned().fold(f64::INFINITY, f64::min);
                d_excess += s.d[ci] - d_min;

                match self.plan {
                    AlphaPlan::Uniform { step } => {
                        let a0 = self.alphas[0];
                        for c in 0..k {
                            let u = s.d[c] - d_min;
                            s.base[c] = (-a0 * u).exp();
                            s.ratio[c] = (-step * u).exp();
                        }
                        for ai in 0..n_a {
                            let sum: f64 = s.base.iter().sum();
                            s.prod[ai] *= sum;
                            if s.prod[ai] > PRODUCT_SPILL {
                                s.log_s[ai] += s.prod[ai].ln();
                                s.prod[ai] = 1.0;
                            }
                            if ai + 1 < n_a {
                                for c in 0..k {
                                    s.base[c] *= s.ratio[c];
                                }
                            }
                        }
                    }
                    AlphaPlan::List => {
                        for (ai, &alpha) in self.alphas.iter().enumerate() {
                            let mut sum = 0.0;
                            for &dc in s.d.iter() {
                                sum += (-alpha * (dc - d_min)).exp();
                            }
                            s.prod[ai] *= sum;
                            if s.prod[ai] > PRODUCT_SPILL {
                                s.log_s[ai] += s.prod[ai].ln();
                                s.prod[ai] = 1.0;
                            }
                        }
                    }
                }
            }
        }

        for ai in 0..n_a {
            s.log_s[ai] += s.prod[ai].ln();
        }
        d_excess
    }
}

/// Evaluates the bound at every alpha of a grid in one Monte Carlo pass with
/// common random numbers: every grid point sees the same channel, noise, and
/// payload realizations sample for sample.
pub fn rcus_estimate_grid(
    ch: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
    alphas: &[f64],
) -> Result<Vec<FblEstimate>> {
    par.validate()?;
    let eval = GridEval::new(ch, code, alphas)?;
    let n_a = alphas.len();
    let n_batches = par.n_samples.div_ceil(BATCH_SIZE);

    let run_batch = |b: u64| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut scratch = eval.scratch();
        let mut sum = vec![0.0; n_a];
        let mut sum_sq = vec![0.0; n_a];
        let base_rng = ChaCha8Rng::seed_from_u64(par.seed);
        let lo = b * BATCH_SIZE;
        let hi = (lo + BATCH_SIZE).min(par.n_samples);
        for sample in lo..hi {
            let mut rng = base_rng.clone();
            rng.set_stream(sample);
            let d_excess = eval.eval_sample(&mut scratch, &mut rng);
            for ai in 0..n_a {
                // alpha = 0 makes the density identically zero; bypassing
                // the accumulators keeps the identity exact in floating
                // point as well.
                let iota = if alphas[ai] == 0.0 {
                    0.0
                } else {
                    -alphas[ai] * d_excess + eval.total_uses_ln_k - scratch.log_s[ai]
                };
                if !iota.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite information density at sample {sample} (alpha = {})",
                        alphas[ai]
                    )));
                }
                let z = (-(iota - eval.log_m1).max(0.0)).exp();
                sum[ai] += z;
                sum_sq[ai] += z * z;
            }
        }
        Ok((sum, sum_sq))
    };

    let parts: Vec<Result<(Vec<f64>, Vec<f64>)>> = if par.workers == 1 {
        (0..n_batches).map(run_batch).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(par.workers)
            .build()
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        pool.install(|| (0..n_batches).into_par_iter().map(run_batch).collect())
    };

    let mut sum = vec![0.0; n_a];
    let mut sum_sq = vec![0.0; n_a];
    for part in parts {
        let (ps, pq) = part?;
        for ai in 0..n_a {
            sum[ai] += ps[ai];
            sum_sq[ai] += pq[ai];
        }
    }

    let n = par.n_samples as f64;
    Ok((0..n_a)
        .map(|ai| {
            let mean = sum[ai] / n;
            // Summands live in (0, 1], so the population variance is at
            // most 1/4 and the standard error at most 0.5/sqrt(N).
            let var = (sum_sq[ai] / n - mean * mean).clamp(0.0, 0.25);
            FblEstimate {
                eps_mean: mean,
                std_err: (var / n).sqrt(),
                n_samples: par.n_samples,
                alpha: alphas[ai],
                n_p: ch.n_p,
                rho: ch.rho,
            }
        })
        .collect())
}

/// Monte Carlo estimate of the bound at `par.alpha`.
pub fn rcus_estimate(
    ch: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
) -> Result<FblEstimate> {
    let mut v = rcus_estimate_grid(ch, code, par, &[par.alpha])?;
    Ok(v.pop().expect("singleton grid"))
}

/// Minimizes the bound over an alpha grid under common random numbers.
/// Ties break toward smaller alpha.
pub fn optimize_alpha(
    ch: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
    alpha_grid: &[f64],
) -> Result<FblEstimate> {
    let estimates = rcus_estimate_grid(ch, code, par, alpha_grid)?;
    let mut order: Vec<usize> = (0..estimates.len()).collect();
    order.sort_by(|&a, &b| alpha_grid[a].total_cmp(&alpha_grid[b]));
    let mut best: Option<FblEstimate> = None;
    for i in order {
        let e = estimates[i];
        if best.is_none_or(|b| e.eps_mean < b.eps_mean) {
            best = Some(e);
        }
    }
    Ok(best.expect("grid validated nonempty"))
}

/// One refinement pass, step 0.02 across the incumbent's coarse-grid cell.
/// Returns the refined estimate if it improves on the incumbent.
pub fn refine_alpha(
    ch: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
    incumbent: FblEstimate,
) -> Result<FblEstimate> {
    let grid: Vec<f64> = (-4..=4)
        .map(|d| incumbent.alpha + f64::from(d) * 0.02)
        .filter(|&a| a >= 0.0)
        .collect();
    let refined = optimize_alpha(ch, code, par, &grid)?;
    Ok(if refined.eps_mean < incumbent.eps_mean {
        refined
    } else {
        incumbent
    })
}

/// Coarse grid search over alpha followed by one refinement pass.
pub fn optimize_alpha_auto(
    ch: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
) -> Result<FblEstimate> {
    let incumbent = optimize_alpha(ch, code, par, &default_alpha_grid())?;
    refine_alpha(ch, code, par, incumbent)
}

/// Optimizes alpha for every feasible pilot count `n_p` in
/// `{m_t, ..., n_c - 1}` under common random numbers. Returns one estimate
/// per `n_p`, in ascending `n_p` order.
pub fn optimize_np_scan(
    ch: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
    alpha_grid: &[f64],
) -> Result<Vec<FblEstimate>> {
    ch.validate()?;
    (ch.m_t..ch.n_c)
        .map(|n_p| {
            let ch_np = ChannelConfig { n_p, ..*ch };
            optimize_alpha(&ch_np, code, par, alpha_grid)
        })
        .collect()
}

/// Minimizes the bound jointly over the pilot count `n_p` in
/// `{m_t, ..., n_c - 1}` and the alpha grid, with common random numbers
/// across every point. Ties break toward smaller `n_p`.
pub fn optimize_np(
    ch: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
    alpha_grid: &[f64],
) -> Result<FblEstimate> {
    let scan = optimize_np_scan(ch, code, par, alpha_grid)?;
    let mut best: Option<FblEstimate> = None;
    for est in scan {
        if best.is_none_or(|b| est.eps_mean < b.eps_mean) {
            best = Some(est);
        }
    }
    Ok(best.expect("n_p range {m_t, ..., n_c - 1} is nonempty for valid configs"))
}

/// Outcome of a minimum-SNR search along an ascending dB grid.
#[derive(Debug, Clone)]
pub struct SnrSearch {
    pub eps_target: f64,
    /// Every grid point evaluated, in ascending SNR order, with its
    /// optimized estimate. The search stops at the first qualifying point.
    pub evaluated: Vec<(f64, FblEstimate)>,
    /// Index into `evaluated` of the first SNR whose
    /// `eps_mean + 2 std_err <= eps_target`, if any.
    pub achieved: Option<usize>,
}

impl SnrSearch {
    /// The qualifying (rho_db, estimate) pair, if the target was achieved.
    pub fn best(&self) -> Option<&(f64, FblEstimate)> {
        self.achieved.map(|i| &self.evaluated[i])
    }
}

/// Finds the smallest SNR on an ascending dB grid whose optimized bound
/// satisfies `eps_mean + 2 std_err <= eps_target`.
///
/// Alpha is always optimized (coarse grid plus refinement); `np_search`
/// additionally optimizes the pilot count. Common random numbers across the
/// grid make the underlying curve monotone up to Monte Carlo noise.
pub fn min_snr_for_target(
    template: &ChannelConfig,
    code: &CodeConfig,
    par: &FblParams,
    eps_target: f64,
    rho_grid_db: &[f64],
    np_search: bool,
) -> Result<SnrSearch> {
    if eps_target.is_nan() || eps_target <= 0.0 || eps_target > 1.0 {
        return Err(Error::Config(format!(
            "eps_target in (0, 1] violated (eps_target = {eps_target})"
        )));
    }
    if rho_grid_db.is_empty() {
        return Err(Error::Config("SNR grid must be nonempty".into()));
    }
    if rho_grid_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("SNR grid must be strictly ascending".into()));
    }
    let mut out = SnrSearch {
        eps_target,
        evaluated: Vec::new(),
        achieved: None,
    };
    for (i, &db) in rho_grid_db.iter().enumerate() {
        let ch = ChannelConfig {
            rho: snr_db_to_linear(db),
            ..*template
        };
        let est = if np_search {
            let coarse = optimize_np(&ch, code, par, &default_alpha_grid())?;
            let ch_best = ChannelConfig {
                n_p: coarse.n_p,
                ..ch
            };
            refine_alpha(&ch_best, code, par, coarse)?
        } else {
            optimize_alpha_auto(&ch, code, par)?
        };
        let qualified = est.eps_mean + 2.0 * est.std_err <= eps_target;
        out.evaluated.push((db, est));
        if qualified {
            out.achieved = Some(i);
            break;
        }
    }
    Ok(out)
}
