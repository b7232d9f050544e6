//! End-to-end minimum-SNR searches against the reference design points:
//! the smallest grid SNR meeting each packet-error target, with pilots and
//! alpha optimized per point, must land within half a grid-and-rounding
//! step (0.5 dB) of the reference value. Runs a few minutes.

use paoi::channel::{ChannelConfig, PilotMode};
use paoi::fbl::{min_snr_for_target, CodeConfig, FblParams};

fn template(m_t: usize, m_r: usize, ell: usize, n_c: usize) -> ChannelConfig {
    ChannelConfig {
        m_t,
        m_r,
        ell,
        n_c,
        n_p: m_t,
        rho: 1.0,
        pilot_mode: PilotMode::Equivalent,
    }
}

fn grid() -> Vec<f64> {
    (0..37).map(|i| -6.0 + 0.25 * i as f64).collect()
}

fn params() -> FblParams {
    FblParams {
        alpha: 0.0,
        n_samples: 10_000,
        seed: 1,
        workers: std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

#[test]
fn min_snr_for_moderate_reliability_two_by_two_low_diversity() {
    // 2x2 with two diversity branches, target eps = 0.146: reference
    // operating SNR is -3 dB.
    let code = CodeConfig { k: 30, n: 100 };
    let search = min_snr_for_target(&template(2, 2, 2, 50), &code, &params(), 0.146, &grid(), true)
        .unwrap();
    let (db, est) = search.best().expect("target reachable on grid");
    assert!(
        (db - (-3.0)).abs() <= 0.5,
        "found {db} dB (eps {:.3e}), reference -3 dB",
        est.eps_mean
    );
}

#[test]
fn min_snr_for_high_reliability_two_by_two_moderate_diversity() {
    // 2x2 with five diversity branches, target eps = 3.2e-3: reference
    // operating SNR is 0 dB.
    let code = CodeConfig { k: 30, n: 100 };
    let search =
        min_snr_for_target(&template(2, 2, 5, 20), &code, &params(), 3.2e-3, &grid(), true)
            .unwrap();
    let (db, est) = search.best().expect("target reachable on grid");
    assert!(
        db.abs() <= 0.5,
        "found {db} dB (eps {:.3e}), reference 0 dB",
        est.eps_mean
    );
}
