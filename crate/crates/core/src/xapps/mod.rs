//! The competing control policies.
//!
//! Each xApp sees one completed KPI window plus a read-only view of the
//! current RAN configuration and proposes parameter writes. xApps share no
//! mutable state; the harness invokes them sequentially, once per window.

mod mlb;
mod mro;
mod stealth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mlb::{Mlb, MlbPolicy};
pub use mro::{Mro, MroPolicy};
pub use stealth::{Stealth, StealthPolicy};

use crate::ric::XAppDescriptor;
use crate::sim::{KpiWindow, ParamError, ParamId, Target};

/// Read-only access to the current parameter values.
pub trait ConfigView {
    fn value(&self, param: ParamId, target: Target) -> Result<f64, ParamError>;
}

impl ConfigView for crate::sim::Simulator {
    fn value(&self, param: ParamId, target: Target) -> Result<f64, ParamError> {
        self.param_value(param, target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposedAction {
    pub target: Target,
    pub param: ParamId,
    pub value: f64,
}

pub trait XApp {
    fn id(&self) -> &str;
    fn descriptor(&self) -> XAppDescriptor;
    fn decide(&mut self, window: &KpiWindow, config: &dyn ConfigView) -> Vec<ProposedAction>;
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid policy constant {name}: {reason}")]
pub struct PolicyError {
    pub name: &'static str,
    pub reason: &'static str,
}

pub(crate) fn positive(name: &'static str, v: f64) -> Result<(), PolicyError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(PolicyError {
            name,
            reason: "must be > 0",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, v: f64) -> Result<(), PolicyError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(PolicyError {
            name,
            reason: "must be >= 0",
        })
    }
}

/// Policy constants of all xApps, as found in the scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicyConfig {
    pub mlb: MlbPolicy,
    pub mro: MroPolicy,
    pub stealth: StealthPolicy,
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        self.mlb.validate()?;
        self.mro.validate()?;
        self.stealth.validate()
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use std::collections::HashMap;

    use super::ConfigView;
    use crate::sim::{KpiSample, KpiWindow, ParamError, ParamId, Target};

    /// Map-backed configuration with fixed defaults.
    pub struct MapConfig {
        pub h: f64,
        pub ttt: f64,
        pub cio: f64,
        pub tx: f64,
        pub overrides: HashMap<(ParamId, Target), f64>,
    }

    impl Default for MapConfig {
        fn default() -> Self {
            Self {
                h: 3.0,
                ttt: 100.0,
                cio: 0.0,
                tx: 30.0,
                overrides: HashMap::new(),
            }
        }
    }

    impl ConfigView for MapConfig {
        fn value(&self, param: ParamId, target: Target) -> Result<f64, ParamError> {
            if let Some(v) = self.overrides.get(&(param, target)) {
                return Ok(*v);
            }
            Ok(match param {
                ParamId::Hysteresis => self.h,
                ParamId::TimeToTrigger => self.ttt,
                ParamId::Cio => self.cio,
                ParamId::TxPower => self.tx,
            })
        }
    }

    pub fn window(loads: &[f64], pingpongs: &[u32], too_late: &[u32]) -> KpiWindow {
        let samples = loads
            .iter()
            .enumerate()
            .map(|(c, &l)| KpiSample {
                window_end_tick: 20,
                cell_id: c as u32,
                mean_load: l,
                call_blocks: 0,
                rlf_count: too_late.get(c).copied().unwrap_or(0),
                ho_count: pingpongs.get(c).copied().unwrap_or(0),
                pingpong_count: pingpongs.get(c).copied().unwrap_or(0),
            })
            .collect();
        let n = loads.len();
        KpiWindow {
            index: 0,
            window_end_tick: 20,
            window_ticks: 20,
            samples,
            too_late: (0..n).map(|c| too_late.get(c).copied().unwrap_or(0)).collect(),
            too_early: vec![0; n],
        }
    }
}
