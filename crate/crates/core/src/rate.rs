use serde::{Deserialize, Serialize};

use crate::channel::noise_power_w;
use crate::config::SystemConfig;

/// Per-PRB Shannon rate with an optional SNR gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateModel {
    /// Bandwidth of one PRB (`B/N`), Hz.
    pub prb_bandwidth_hz: f64,
    /// Noise power over one PRB (`σ²`), W.
    pub noise_w: f64,
    /// Linear SNR gap `Γ >= 1`.
    pub snr_gap: f64,
}

impl RateModel {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        RateModel {
            prb_bandwidth_hz: cfg.prb_bandwidth_hz(),
            noise_w: noise_power_w(&cfg.noise),
            snr_gap: cfg.snr_gap,
        }
    }

    /// Effective SNR per watt for a link of gain `h`.
    #[inline]
    pub fn snr_per_watt(&self, h: f64) -> f64 {
        h / (self.noise_w * self.snr_gap)
    }

    /// Rate of one whole PRB at power `p` over gain `h`, with interference
    /// power `interference_w` treated as noise.
    #[inline]
    pub fn prb_rate_with_interference(&self, p: f64, h: f64, interference_w: f64) -> f64 {
        let sinr = p * h / ((self.noise_w + interference_w) * self.snr_gap);
        self.prb_bandwidth_hz * sinr.ln_1p() / std::f64::consts::LN_2
    }

    #[inline]
    pub fn prb_rate(&self, p: f64, h: f64) -> f64 {
        self.prb_rate_with_interference(p, h, 0.0)
    }
}
