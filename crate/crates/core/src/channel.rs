//! Indoor/outdoor propagation, Rayleigh fading and receiver noise.
//!
//! Path loss between a FAP and a user is
//!
//! ```text
//! PL = 38.46 + 20 log10(d_in) + 37.6 log10(d) + L + L_s      [dB]
//! ```
//!
//! where `d_in` is the indoor distance to the wall or window, `L` the
//! penetration loss (wall or window, equally likely) and `L_s` a log-normal
//! shadowing term. These large-scale quantities are drawn once per link
//! ([`LinkShadowState`]) and kept for the lifetime of a topology; small-scale
//! fading is an independent unit-mean exponential factor per PRB, redrawn
//! for every channel realization.
//!
//! Gains are linear everywhere except at the API edges that take dB.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationParams {
    /// Indoor distance to the external wall/window is uniform on this range.
    pub d_in_range_m: [f64; 2],
    pub wall_loss_db: f64,
    pub window_loss_db: f64,
    pub shadow_sigma_db: f64,
    /// Link distances are clamped up to this value.
    pub min_distance_m: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        PropagationParams {
            d_in_range_m: [1.0, 5.0],
            wall_loss_db: 10.0,
            window_loss_db: 3.0,
            shadow_sigma_db: 10.0,
            min_distance_m: 1.0,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.d_in_range_m;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::config(
                "propagation.d_in_range_m",
                format!("need 0 < lower <= upper, got [{lo}, {hi}]"),
            ));
        }
        for (key, v) in [
            ("propagation.wall_loss_db", self.wall_loss_db),
            ("propagation.window_loss_db", self.window_loss_db),
            ("propagation.shadow_sigma_db", self.shadow_sigma_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(key, format!("must be >= 0, got {v}")));
            }
        }
        if !(self.min_distance_m.is_finite() && self.min_distance_m > 0.0) {
            return Err(Error::config(
                "propagation.min_distance_m",
                format!("must be positive, got {}", self.min_distance_m),
            ));
        }
        Ok(())
    }

    /// Draws the large-scale state of one FAP-user link.
    pub fn draw_link<R: Rng + ?Sized>(&self, rng: &mut R) -> LinkShadowState {
        let [lo, hi] = self.d_in_range_m;
        let d_in = if hi > lo {
            rng.random_range(lo..hi)
        } else {
            lo
        };
        let penetration_db = if rng.random_bool(0.5) {
            self.wall_loss_db
        } else {
            self.window_loss_db
        };
        let shadow_db = if self.shadow_sigma_db > 0.0 {
            Normal::new(0.0, self.shadow_sigma_db)
                .expect("validated sigma")
                .sample(rng)
        } else {
            0.0
        };
        LinkShadowState {
            d_in,
            penetration_db,
            shadow_db,
        }
    }
}

/// Large-scale state of one FAP-user link, fixed across channel draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkShadowState {
    pub d_in: f64,
    pub penetration_db: f64,
    pub shadow_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub psd_dbm_per_hz: f64,
    pub noise_figure_db: f64,
    pub prb_bandwidth_hz: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            psd_dbm_per_hz: -174.0,
            noise_figure_db: 10.0,
            prb_bandwidth_hz: 180e3,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.prb_bandwidth_hz.is_finite() && self.prb_bandwidth_hz > 0.0) {
            return Err(Error::config(
                "noise.prb_bandwidth_hz",
                format!("must be positive, got {}", self.prb_bandwidth_hz),
            ));
        }
        if !self.psd_dbm_per_hz.is_finite() || !self.noise_figure_db.is_finite() {
            return Err(Error::config("noise", "noise levels must be finite"));
        }
        Ok(())
    }
}

/// Path loss in dB. Both distances must be positive; clamping to the
/// minimum distance is the caller's job (see [`average_gain`]).
pub fn path_loss_db(d_in: f64, d: f64, penetration_db: f64, shadow_db: f64) -> Result<f64> {
    if d_in.is_nan() || d_in <= 0.0 {
        return Err(Error::NonPositiveDistance(d_in));
    }
    if d.is_nan() || d <= 0.0 {
        return Err(Error::NonPositiveDistance(d));
    }
    Ok(38.46 + 20.0 * d_in.log10() + 37.6 * d.log10() + penetration_db + shadow_db)
}

/// Long-term average linear gain of a link at distance `d`, fading excluded.
pub fn average_gain(p: &PropagationParams, s: &LinkShadowState, d: f64) -> Result<f64> {
    let d = d.max(p.min_distance_m);
    let pl = path_loss_db(s.d_in, d, s.penetration_db, s.shadow_db)?;
    Ok(db_to_linear(-pl))
}

/// `n_prbs` independent unit-mean exponential fading factors (Rayleigh
/// power), one per PRB.
pub fn draw_fading<R: Rng + ?Sized>(n_prbs: usize, rng: &mut R) -> Vec<f64> {
    (0..n_prbs).map(|_| Exp1.sample(rng)).collect()
}

/// Noise power over one PRB in watts (`σ²`).
pub fn noise_power_w(n: &NoiseParams) -> f64 {
    dbm_to_watts(n.psd_dbm_per_hz + 10.0 * n.prb_bandwidth_hz.log10() + n.noise_figure_db)
}

/// A realization of every gain `h[l][k][n]` the caller asked for.
///
/// Stored sparsely per link since only serving links (and, in SINR mode,
/// co-channel interferers) are ever needed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelRealization {
    /// `(fap, user) -> per-PRB linear gain`, indexed by PRB number.
    pub gains: HashMap<(usize, usize), Vec<f64>>,
}

impl ChannelRealization {
    pub fn gain(&self, fap: usize, user: usize, prb: usize) -> Option<f64> {
        self.gains
            .get(&(fap, user))
            .and_then(|g| g.get(prb))
            .copied()
    }
}
