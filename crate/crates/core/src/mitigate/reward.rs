use serde::{Deserialize, Serialize};

use super::MitigateError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardConfig {
    pub w_load: f64,
    pub w_rlf: f64,
    pub w_pp: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            w_load: 1.0,
            w_rlf: 1.0,
            w_pp: 1.0,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), MitigateError> {
        let ws = [self.w_load, self.w_rlf, self.w_pp];
        if ws.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || ws.iter().all(|w| *w == 0.0) {
            return Err(MitigateError::InvalidWeights);
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            w_load: self.w_load * c,
            w_rlf: self.w_rlf * c,
            w_pp: self.w_pp * c,
        }
    }
}

/// Episode-level figures the reward is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EpisodeAggregate {
    /// Mean over windows of the cross-cell standard deviation of load.
    pub load_std: f64,
    /// RLF events per window.
    pub rlf_rate: f64,
    /// Ping-pong handovers per window.
    pub pingpong_rate: f64,
}

/// Negative weighted sum of relative excess over the baseline; zero when
/// every term sits at its baseline. A zero baseline term is compared in
/// absolute units.
pub fn compute_reward(agg: &EpisodeAggregate, baseline: &EpisodeAggregate, cfg: &RewardConfig) -> f64 {
    let rel = |x: f64, b: f64| if b > 0.0 { (x - b) / b } else { x - b };
    -(cfg.w_load * rel(agg.load_std, baseline.load_std)
        + cfg.w_rlf * rel(agg.rlf_rate, baseline.rlf_rate)
        + cfg.w_pp * rel(agg.pingpong_rate, baseline.pingpong_rate))
}
