//! MIMO Rayleigh block-fading channel with pilot-assisted QPSK transmission.
//!
//! A coded packet spans `ell` independent coherence blocks of `n_c` channel
//! uses each. Within a block the fading matrix is constant; `n_p` channel
//! uses carry known pilots from which the receiver forms a maximum-likelihood
//! channel estimate, and the remaining `n_c - n_p` uses carry data symbols
//! drawn uniformly from a scaled QPSK constellation. The decoder treats the
//! estimate as if it were the true channel (scaled nearest-neighbor metric).

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Candidate enumeration in the bound evaluator costs 4^m_t per data symbol,
/// so transmit arrays are capped at four antennas.
pub const MAX_TX_ANTENNAS: usize = 4;

/// How the channel estimate is produced when sampling a block.
///
/// The two modes yield identically distributed `(H, H_hat)` pairs because
/// the pilot rows are orthogonal with `X_p X_p^H = (rho n_p / m_t) I`, which
/// reduces the estimator to `H_hat = H + (m_t / (rho n_p)) W_p X_p^H` with
/// white Gaussian estimation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PilotMode {
    /// Materialize the pilot matrix, the received pilots, and the estimator.
    Explicit,
    /// Sample `H_hat = H + E` directly, `E` white with per-entry variance
    /// `m_t / (rho n_p)`. Default; used by the Monte Carlo hot path.
    Equivalent,
}

/// Antenna counts, coherence structure, pilot overhead, and SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Transmit antennas.
    pub m_t: usize,
    /// Receive antennas.
    pub m_r: usize,
    /// Coherence blocks spanned by one coded packet.
    pub ell: usize,
    /// Coherence-block length in channel uses.
    pub n_c: usize,
    /// Pilot symbols per coherence block.
    pub n_p: usize,
    /// SNR as a linear power ratio.
    pub rho: f64,
    pub pilot_mode: PilotMode,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_t < 1 {
            return Err(Error::Config("m_t >= 1 violated (m_t = 0)".into()));
        }
        if self.m_t > MAX_TX_ANTENNAS {
            return Err(Error::Config(format!(
                "m_t <= {MAX_TX_ANTENNAS} violated (m_t = {}); candidate enumeration is 4^m_t",
                self.m_t
            )));
        }
        if self.m_r < 1 {
            return Err(Error::Config("m_r >= 1 violated (m_r = 0)".into()));
        }
        if self.ell < 1 {
            return Err(Error::Config("ell >= 1 violated (ell = 0)".into()));
        }
        if self.n_c < 2 {
            return Err(Error::Config(format!(
                "n_c >= 2 violated (n_c = {})",
                self.n_c
            )));
        }
        if self.n_p < 1 {
            return Err(Error::Config(format!(
                "1 <= n_p violated (n_p = {})",
                self.n_p
            )));
        }
        if self.n_p >= self.n_c {
            return Err(Error::Config(format!(
                "n_p < n_c violated (n_p = {}, n_c = {})",
                self.n_p, self.n_c
            )));
        }
        if self.n_p < self.m_t {
            return Err(Error::Config(format!(
                "n_p >= m_t violated (n_p = {}, m_t = {}); orthogonal pilot rows need n_p >= m_t",
                self.n_p, self.m_t
            )));
        }
        if !self.rho.is_finite() || self.rho <= 0.0 {
            return Err(Error::Config(format!(
                "rho > 0 violated (rho = {})",
                self.rho
            )));
        }
        Ok(())
    }

    /// Coded packet length `n = ell * n_c` in channel uses.
    pub fn packet_len(&self) -> usize {
        self.ell * self.n_c
    }

    /// Data channel uses per coherence block.
    pub fn data_uses(&self) -> usize {
        self.n_c - self.n_p
    }

    /// Per-entry variance of the channel-estimation error, `m_t / (rho n_p)`.
    pub fn estimate_error_variance(&self) -> f64 {
        self.m_t as f64 / (self.rho * self.n_p as f64)
    }
}

/// One sampled coherence block: true fading, channel estimate, transmitted
/// data symbols, received data symbols, and the SNR they were drawn at.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSample {
    /// True fading matrix, `m_r x m_t`, entries iid CN(0, 1).
    pub h: Array2<Complex64>,
    /// ML channel estimate, `m_r x m_t`.
    pub h_hat: Array2<Complex64>,
    /// Transmitted data symbols, `m_t x (n_c - n_p)`, scaled QPSK.
    pub x_d: Array2<Complex64>,
    /// Received data symbols, `m_r x (n_c - n_p)`.
    pub y_d: Array2<Complex64>,
    /// Linear SNR the symbols were scaled to.
    pub rho: f64,
}

/// Scaled QPSK alphabet `{(+-1 +- i)/sqrt(2)} * sqrt(rho/m_t)`, indexed by
/// two bits: bit 0 flips the real part, bit 1 the imaginary part. Every
/// point has squared magnitude exactly `rho/m_t` (constant modulus).
pub fn qpsk_alphabet(rho: f64, m_t: usize) -> [Complex64; 4] {
    let a = (rho / (2.0 * m_t as f64)).sqrt();
    [
        Complex64::new(a, a),
        Complex64::new(-a, a),
        Complex64::new(a, -a),
        Complex64::new(-a, -a),
    ]
}

/// All `4^m_t` candidate data columns as an `m_t x 4^m_t` matrix. Column `c`
/// carries symbol `(c >> 2t) & 3` on antenna `t`, so a column of transmitted
/// symbol indices maps to its candidate index by base-4 digit packing.
pub fn candidate_matrix(m_t: usize, rho: f64) -> Array2<Complex64> {
    let alphabet = qpsk_alphabet(rho, m_t);
    let k = 1usize << (2 * m_t);
    Array2::from_shape_fn((m_t, k), |(t, c)| alphabet[(c >> (2 * t)) & 3])
}

/// Pilot matrix: the first `m_t` rows of the `n_p`-point DFT matrix, scaled
/// so each symbol has power `rho/m_t`. Rows are orthogonal unit-modulus
/// sequences with `X_p X_p^H = (rho n_p / m_t) I`.
pub fn pilot_matrix(m_t: usize, n_p: usize, rho: f64) -> Array2<Complex64> {
    let amp = (rho / m_t as f64).sqrt();
    Array2::from_shape_fn((m_t, n_p), |(r, c)| {
        let phase = -2.0 * PI * (r * c) as f64 / n_p as f64;
        Complex64::from_polar(amp, phase)
    })
}

/// One draw from CN(0, 1): independent real and imaginary parts with
/// variance 1/2 each.
#[inline]
pub(crate) fn draw_cn01<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `rows x cols` matrix of iid CN(0, 1) entries, drawn row-major.
pub(crate) fn draw_cn01_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Array2<Complex64> {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| draw_cn01(rng)).collect();
    Array2::from_shape_vec((rows, cols), data).expect("shape matches data length")
}

/// Draws the symbol-index matrix for the data segment, row-major, one
/// uniform index in 0..4 per antenna per data use.
pub(crate) fn draw_symbol_indices<R: Rng>(rng: &mut R, m_t: usize, n_d: usize) -> Vec<u8> {
    (0..m_t * n_d).map(|_| rng.random_range(0..4u8)).collect()
}

/// Samples one complete coherence block.
///
/// Draw order is fixed (fading, estimation noise, symbol indices, data
/// noise, each row-major), so a given seed yields a bit-identical sequence
/// of blocks.
pub fn sample_block<R: Rng>(cfg: &ChannelConfig, rng: &mut R) -> Result<BlockSample> {
    cfg.validate()?;
    let n_d = cfg.data_uses();
    let h = draw_cn01_matrix(rng, cfg.m_r, cfg.m_t);

    let h_hat = match cfg.pilot_mode {
        PilotMode::Equivalent => {
            let sigma = cfg.estimate_error_variance().sqrt();
            let e = draw_cn01_matrix(rng, cfg.m_r, cfg.m_t);
            &h + &e.mapv(|z| z * sigma)
        }
        PilotMode::Explicit => {
            let x_p = pilot_matrix(cfg.m_t, cfg.n_p, cfg.rho);
            let w_p = draw_cn01_matrix(rng, cfg.m_r, cfg.n_p);
            let y_p = h.dot(&x_p) + &w_p;
            let x_p_h = x_p.t().mapv(|z| z.conj());
            let scale = cfg.m_t as f64 / (cfg.rho * cfg.n_p as f64);
            y_p.dot(&x_p_h).mapv(|z| z * scale)
        }
    };

    let alphabet = qpsk_alphabet(cfg.rho, cfg.m_t);
    let indices = draw_symbol_indices(rng, cfg.m_t, n_d);
    let x_d = Array2::from_shape_fn((cfg.m_t, n_d), |(t, i)| {
        alphabet[indices[t * n_d + i] as usize]
    });
    let w_d = draw_cn01_matrix(rng, cfg.m_r, n_d);
    let y_d = h.dot(&x_d) + &w_d;

    Ok(BlockSample {
        h,
        h_hat,
        x_d,
        y_d,
        rho: cfg.rho,
    })
}

/// Log of the scaled nearest-neighbor decoding metric for a single data
/// channel use: `-||y - H_hat x||^2`. Always finite and <= 0.
pub fn snn_metric_log(h_hat: &Array2<Complex64>, x: &[Complex64], y: &[Complex64]) -> Result<f64> {
    let (m_r, m_t) = h_hat.dim();
    if x.len() != m_t || y.len() != m_r {
        return Err(Error::Dimension(format!(
            "snn_metric_log: H_hat is {m_r}x{m_t} but |x| = {}, |y| = {}",
            x.len(),
            y.len()
        )));
    }
    let mut total = 0.0;
    for r in 0..m_r {
        let mut z = y[r];
        for t in 0..m_t {
            z -= h_hat[(r, t)] * x[t];
        }
        total += z.norm_sqr();
    }
    Ok(-total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(m_t: usize, m_r: usize, n_c: usize, n_p: usize, rho: f64) -> ChannelConfig {
        ChannelConfig {
            m_t,
            m_r,
            ell: 1,
            n_c,
            n_p,
            rho,
            pilot_mode: PilotMode::Equivalent,
        }
    }

    #[test]
    fn config_validation_names_the_violated_invariant() {
        let mut c = cfg(2, 2, 50, 50, 1.0);
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("n_p < n_c"), "{msg}");
        c.n_p = 1;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("n_p >= m_t"), "{msg}");
        c.n_p = 14;
        c.rho = 0.0;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("rho > 0"), "{msg}");
        c.rho = 1.0;
        c.m_t = 5;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("m_t <= 4"), "{msg}");
    }

    #[test]
    fn pilot_rows_are_orthogonal_for_every_supported_shape() {
        let rho = 0.73;
        for m_t in 1..=MAX_TX_ANTENNAS {
            for n_p in m_t..=32 {
                let x_p = pilot_matrix(m_t, n_p, rho);
                let gram = x_p.dot(&x_p.t().mapv(|z| z.conj()));
                let diag = rho * n_p as f64 / m_t as f64;
                for r in 0..m_t {
                    for c in 0..m_t {
                        let expect = if r == c { diag } else { 0.0 };
                        let err = (gram[(r, c)] - Complex64::new(expect, 0.0)).norm();
                        assert!(err <= 1e-10 * diag, "m_t={m_t} n_p={n_p} ({r},{c}): {err}");
                    }
                }
                for &z in x_p.iter() {
                    assert!((z.norm_sqr() - rho / m_t as f64).abs() <= 1e-12 * rho);
                }
            }
        }
    }

    #[test]
    fn data_symbols_have_constant_modulus() {
        let c = cfg(2, 2, 50, 14, 10f64.powf(-0.3));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bs = sample_block(&c, &mut rng).unwrap();
        let expect = c.rho / c.m_t as f64;
        let first = bs.x_d[(0, 0)].norm_sqr();
        for &z in bs.x_d.iter() {
            // Constant modulus is exact: all entries share the same table.
            assert_eq!(z.norm_sqr(), first);
        }
        assert!((first - expect).abs() <= 1e-14 * expect);
    }

    #[test]
    fn received_data_reconstructs_white_noise() {
        let c = cfg(2, 2, 6, 2, 1.7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n_blocks = 20_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for _ in 0..n_blocks {
            let bs = sample_block(&c, &mut rng).unwrap();
            let w = &bs.y_d - &bs.h.dot(&bs.x_d);
            for &z in w.iter() {
                sum += z;
                sum_sq += z.norm_sqr();
                count += 1;
            }
        }
        let mean = sum / count as f64;
        let var = sum_sq / count as f64;
        assert!(mean.norm() < 4.0 / (count as f64).sqrt());
        assert!((var - 1.0).abs() < 0.03, "noise variance {var}");
    }

    #[test]
    fn estimate_error_statistics_match_the_model() {
        // Reference operating point: 2x2, n_c = 50, n_p = 14, rho = -3 dB.
        let c = cfg(2, 2, 50, 14, 10f64.powf(-0.3));
        let expect_var = c.estimate_error_variance();
        assert!((expect_var - 0.285).abs() < 5e-4);
        let n: usize = 100_000;
        for mode in [PilotMode::Equivalent, PilotMode::Explicit] {
            let c = ChannelConfig {
                pilot_mode: mode,
                ..c
            };
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let entries = c.m_r * c.m_t;
            let mut sum = vec![Complex64::new(0.0, 0.0); entries];
            let mut sum_sq = vec![0.0; entries];
            for _ in 0..n {
                let bs = sample_block(&c, &mut rng).unwrap();
                let e = &bs.h_hat - &bs.h;
                for (j, &z) in e.iter().enumerate() {
                    sum[j] += z;
                    sum_sq[j] += z.norm_sqr();
                }
            }
            for j in 0..entries {
                let mean = sum[j] / n as f64;
                let var = sum_sq[j] / n as f64;
                assert!(
                    mean.norm() <= 4.0 / (n as f64).sqrt() * expect_var.sqrt().max(1.0),
                    "{mode:?} entry {j}: mean {mean}"
                );
                assert!(
                    (var - expect_var).abs() <= 0.05 * expect_var,
                    "{mode:?} entry {j}: var {var} vs {expect_var}"
                );
            }
        }
    }

    #[test]
    fn estimate_converges_to_truth_at_high_snr() {
        let c = cfg(2, 2, 4, 2, 1e8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mut mse = 0.0;
        let mut count = 0usize;
        for _ in 0..n {
            let bs = sample_block(&c, &mut rng).unwrap();
            for (&hh, &h) in bs.h_hat.iter().zip(bs.h.iter()) {
                mse += (hh - h).norm_sqr();
                count += 1;
            }
        }
        mse /= count as f64;
        let expect = c.estimate_error_variance();
        assert!((expect - 1e-8).abs() < 1e-20);
        assert!((mse - expect).abs() <= 0.05 * expect, "mse {mse}");
    }

    #[test]
    fn explicit_and_equivalent_modes_agree_in_distribution() {
        // Two-sample comparison of per-entry estimation-error means and
        // variances; the algebraic identity makes the laws identical.
        let base = cfg(2, 3, 20, 15, 0.8);
        let n = 100_000;
        let collect = |mode: PilotMode, seed: u64| {
            let c = ChannelConfig {
                pilot_mode: mode,
                ..base
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let entries = c.m_r * c.m_t;
            let mut sum = vec![Complex64::new(0.0, 0.0); entries];
            let mut sum_sq = vec![0.0; entries];
            for _ in 0..n {
                let bs = sample_block(&c, &mut rng).unwrap();
                for (j, (&hh, &h)) in bs.h_hat.iter().zip(bs.h.iter()).enumerate() {
                    sum[j] += hh - h;
                    sum_sq[j] += (hh - h).norm_sqr();
                }
            }
            (sum, sum_sq)
        };
        let (sum_a, sq_a) = collect(PilotMode::Explicit, 1001);
        let (sum_b, sq_b) = collect(PilotMode::Equivalent, 2002);
        let var0 = base.estimate_error_variance();
        let se_mean = (var0 / n as f64).sqrt();
        let se_var = var0 * (2.0 / n as f64).sqrt();
        for j in 0..sum_a.len() {
            let dm = (sum_a[j] - sum_b[j]) / n as f64;
            assert!(dm.norm() <= 5.0 * se_mean, "entry {j}: mean gap {dm}");
            let dv = (sq_a[j] - sq_b[j]) / n as f64;
            assert!(dv.abs() <= 5.0 * se_var, "entry {j}: var gap {dv}");
        }
    }

    #[test]
    fn identical_seed_gives_identical_blocks() {
        let c = cfg(2, 2, 10, 3, 0.9);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5)
                .map(|_| sample_block(&c, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(77), draw(77));
        assert_ne!(draw(77), draw(78));
    }

    #[test]
    fn snn_metric_trivial_values() {
        // Zero estimate, zero observation.
        let h0 = Array2::from_elem((2, 2), Complex64::new(0.0, 0.0));
        let x = [Complex64::new(0.3, -0.4), Complex64::new(1.0, 2.0)];
        let y = [Complex64::new(0.0, 0.0); 2];
        assert_eq!(snn_metric_log(&h0, &x, &y).unwrap(), 0.0);

        // Identity estimate, exact match.
        let eye = Array2::from_shape_fn((2, 2), |(r, c)| {
            Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
        });
        let y = x;
        assert_eq!(snn_metric_log(&eye, &x, &y).unwrap(), 0.0);

        // Unit residual on a scalar channel.
        let one = Array2::from_elem((1, 1), Complex64::new(1.0, 0.0));
        let s = qpsk_alphabet(2.0, 1)[0];
        let metric = snn_metric_log(&one, &[s], &[s + 1.0]).unwrap();
        assert!((metric + 1.0).abs() < 1e-15);
    }

    #[test]
    fn snn_metric_rejects_mismatched_dimensions() {
        let h = Array2::from_elem((2, 2), Complex64::new(1.0, 0.0));
        let x = [Complex64::new(1.0, 0.0)];
        let y = [Complex64::new(1.0, 0.0); 2];
        assert!(matches!(
            snn_metric_log(&h, &x, &y),
            Err(Error::Dimension(_))
        ));
    }
}
