//! System-wide scalar parameters.
//!
//! Defaults follow the LTE femtocell setup: 20 dBm FAPs, 50 of 100 PRBs
//! reserved for femtocells, 15 m coverage radius, 10 dB UE noise figure.

use serde::{Deserialize, Serialize};

use crate::channel::{dbm_to_watts, NoiseParams, PropagationParams};
use crate::error::{Error, Result};

/// How achieved rates are measured after allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    /// Noise-only rates, exactly what each FAP optimized.
    #[default]
    Ideal,
    /// Diagnostic: re-evaluate with co-channel interference from every
    /// other FAP transmitting on the same PRB.
    Sinr,
}

impl std::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(EvalMode::Ideal),
            "sinr" => Ok(EvalMode::Sinr),
            other => Err(Error::config(
                "eval_mode",
                format!("expected `ideal` or `sinr`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColoringStrategy {
    #[default]
    Dsatur,
    Bfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub cell_radius_m: f64,
    /// Coverage radius `d` of one FAP; FAPs closer than `2d` interfere.
    pub coverage_radius_m: f64,
    pub fap_density_per_m2: f64,
    /// User density as a multiple of the FAP density.
    pub user_density_multiplier: f64,
    pub n_prbs_total: usize,
    /// PRBs available to the femtocell tier (`N`).
    pub n_prbs_femto: usize,
    pub p_max_dbm: f64,
    /// Rate demand of every user, bits/s.
    pub demand_bps: f64,
    /// Linear SNR gap; 1 is exact Shannon capacity.
    pub snr_gap: f64,
    pub n_topologies: usize,
    pub n_channel_draws: usize,
    /// A user is in outage below this fraction of its demand.
    pub outage_fraction: f64,
    pub eval_mode: EvalMode,
    pub coloring_strategy: ColoringStrategy,
    /// Interferers farther than this from the victim are ignored in SINR
    /// mode. `None` includes every FAP.
    pub sinr_cutoff_m: Option<f64>,
    pub master_seed: u64,
    pub noise: NoiseParams,
    pub propagation: PropagationParams,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            cell_radius_m: 100.0,
            coverage_radius_m: 15.0,
            fap_density_per_m2: 0.01,
            user_density_multiplier: 4.0,
            n_prbs_total: 100,
            n_prbs_femto: 50,
            p_max_dbm: 20.0,
            demand_bps: 1.0e6,
            snr_gap: 1.0,
            n_topologies: 100,
            n_channel_draws: 10,
            outage_fraction: 0.8,
            eval_mode: EvalMode::Ideal,
            coloring_strategy: ColoringStrategy::Dsatur,
            sinr_cutoff_m: None,
            master_seed: 1,
            noise: NoiseParams::default(),
            propagation: PropagationParams::default(),
        }
    }
}

impl SystemConfig {
    pub fn p_max_w(&self) -> f64 {
        dbm_to_watts(self.p_max_dbm)
    }

    pub fn prb_bandwidth_hz(&self) -> f64 {
        self.noise.prb_bandwidth_hz
    }

    pub fn user_density_per_m2(&self) -> f64 {
        self.fap_density_per_m2 * self.user_density_multiplier
    }

    /// Checks every invariant, naming the offending key on failure.
    pub fn validate(&self) -> Result<()> {
        fn positive(key: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    key,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        }
        positive("cell_radius_m", self.cell_radius_m)?;
        positive("coverage_radius_m", self.coverage_radius_m)?;
        positive("fap_density_per_m2", self.fap_density_per_m2)?;
        positive("user_density_multiplier", self.user_density_multiplier)?;
        positive("demand_bps", self.demand_bps)?;
        if !self.p_max_dbm.is_finite() {
            return Err(Error::config("p_max_dbm", "must be finite"));
        }
        if !(self.snr_gap.is_finite() && self.snr_gap >= 1.0) {
            return Err(Error::config(
                "snr_gap",
                format!("must be >= 1, got {}", self.snr_gap),
            ));
        }
        if self.n_prbs_femto == 0 {
            return Err(Error::config("n_prbs_femto", "must be at least 1"));
        }
        if self.n_prbs_femto > self.n_prbs_total {
            return Err(Error::config(
                "n_prbs_femto",
                format!(
                    "{} exceeds n_prbs_total = {}",
                    self.n_prbs_femto, self.n_prbs_total
                ),
            ));
        }
        if self.n_topologies == 0 {
            return Err(Error::config("n_topologies", "must be at least 1"));
        }
        if self.n_channel_draws == 0 {
            return Err(Error::config("n_channel_draws", "must be at least 1"));
        }
        if !(self.outage_fraction > 0.0 && self.outage_fraction <= 1.0) {
            return Err(Error::config(
                "outage_fraction",
                format!("must lie in (0, 1], got {}", self.outage_fraction),
            ));
        }
        if let Some(r) = self.sinr_cutoff_m {
            positive("sinr_cutoff_m", r)?;
        }
        self.noise.validate()?;
        self.propagation.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SystemConfig::default().validate().unwrap();
    }

    #[test]
    fn femto_prbs_cannot_exceed_total() {
        let cfg = SystemConfig {
            n_prbs_femto: 200,
            ..SystemConfig::default()
        };
        match cfg.validate() {
            Err(Error::InvalidConfig { key, .. }) => assert_eq!(key, "n_prbs_femto"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn outage_fraction_bounds() {
        for bad in [0.0, 1.5, -0.1] {
            let cfg = SystemConfig {
                outage_fraction: bad,
                ..SystemConfig::default()
            };
            assert!(cfg.validate().is_err());
        }
    }
}
