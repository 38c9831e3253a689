//! Scenario files: every tunable constant of a run, with defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::DetectionConfig;
use crate::mitigate::{BanditConfig, RewardConfig, MAX_XAPPS};
use crate::sim::mobility::BoundingBox;
use crate::sim::params::{validate_value, TTT_VALUES_MS};
use crate::sim::{
    topology, CellId, CellSpec, HandoverParams, MobilityModel, ParamId, Position, RadioConfig, SimConfig, SimTiming,
};
use crate::xapps::PolicyConfig;

pub const MRO_ID: &str = "mro";
pub const MLB_ID: &str = "mlb";
pub const STEALTH_ID: &str = "stealth";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Hex,
    Line,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyConfig {
    pub layout: Layout,
    /// Hex layouts need a centered hexagonal number (1, 7, 19, 37, ...).
    pub cells: usize,
    pub spacing_m: f64,
    /// Padding of the UE bounding box around the outermost sites.
    pub margin_m: f64,
    pub capacity: u32,
    pub tx_power_dbm: f64,
    /// Per-cell overrides of `capacity`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacities: Option<Vec<u32>>,
    /// Per-cell overrides of `tx_power_dbm`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_powers_dbm: Option<Vec<f64>>,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            layout: Layout::Hex,
            cells: 19,
            spacing_m: 500.0,
            margin_m: 300.0,
            capacity: 16,
            tx_power_dbm: 30.0,
            capacities: None,
            tx_powers_dbm: None,
        }
    }
}

fn hex_rings(cells: usize) -> Option<u32> {
    (0..64u32).find(|&k| 1 + 3 * k as usize * (k as usize + 1) == cells)
}

impl TopologyConfig {
    pub fn sites(&self) -> Vec<Position> {
        match self.layout {
            Layout::Hex => topology::hex_layout(hex_rings(self.cells).unwrap_or(0), self.spacing_m),
            Layout::Line => topology::line_layout(self.cells, self.spacing_m),
        }
    }

    pub fn neighbors(&self) -> Vec<Vec<CellId>> {
        topology::neighbors(&self.sites(), self.spacing_m)
    }

    pub fn bbox(&self) -> BoundingBox {
        topology::bounding_box(&self.sites(), self.margin_m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UeConfig {
    pub count: usize,
    pub mobility: MobilityModel,
}

impl Default for UeConfig {
    fn default() -> Self {
        Self {
            count: 150,
            mobility: MobilityModel::RandomWaypoint {
                speed_min_mps: 1.0,
                speed_max_mps: 15.0,
            },
        }
    }
}

/// Handover parameters every cell starts with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialHandover {
    pub h_db: f64,
    pub ttt_ms: u32,
    pub cio_db: f64,
}

impl Default for InitialHandover {
    fn default() -> Self {
        Self {
            h_db: 3.0,
            ttt_ms: 100,
            cio_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct XAppsConfig {
    pub mro: bool,
    pub mlb: bool,
    pub stealth: bool,
    /// Independent MLB instances; more than one writes the same CIOs.
    pub mlb_instances: u32,
    /// Windows the xApps stay silent while detection learns its baseline.
    pub start_window: u64,
}

impl Default for XAppsConfig {
    fn default() -> Self {
        Self {
            mro: true,
            mlb: true,
            stealth: false,
            mlb_instances: 1,
            start_window: 100,
        }
    }
}

impl XAppsConfig {
    /// Enabled xApp ids in registration order.
    pub fn ids(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.mro {
            out.push(MRO_ID.to_string());
        }
        if self.mlb {
            for i in 0..self.mlb_instances {
                out.push(mlb_id(i));
            }
        }
        if self.stealth {
            out.push(STEALTH_ID.to_string());
        }
        out
    }

    pub fn none() -> Self {
        Self {
            mro: false,
            mlb: false,
            stealth: false,
            ..Self::default()
        }
    }
}

pub fn mlb_id(instance: u32) -> String {
    if instance == 0 {
        MLB_ID.to_string()
    } else {
        format!("{MLB_ID}{}", instance + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigationMode {
    Fixed,
    Learn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MitigationConfig {
    pub cm_enabled: bool,
    pub mode: MitigationMode,
    pub cooldown_windows: u64,
    pub tau_hard: f64,
    /// Highest precedence first; registration order when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub priorities: Option<Vec<String>>,
}

impl Default for MitigationConfig {
    fn default() -> Self {
        Self {
            cm_enabled: false,
            mode: MitigationMode::Fixed,
            cooldown_windows: 10,
            tau_hard: 0.8,
            priorities: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub horizon_ticks: u64,
    pub kpi_window_ticks: u64,
    pub topology: TopologyConfig,
    pub ues: UeConfig,
    pub timing: SimTiming,
    pub radio: RadioConfig,
    pub handover: InitialHandover,
    pub xapps: XAppsConfig,
    pub policy: PolicyConfig,
    pub detection: DetectionConfig,
    pub mitigation: MitigationConfig,
    pub reward: RewardConfig,
    pub learning: BanditConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            seed: 42,
            horizon_ticks: 10_000,
            kpi_window_ticks: 20,
            topology: TopologyConfig::default(),
            ues: UeConfig::default(),
            timing: SimTiming::default(),
            radio: RadioConfig::default(),
            handover: InitialHandover::default(),
            xapps: XAppsConfig::default(),
            policy: PolicyConfig::default(),
            detection: DetectionConfig::default(),
            mitigation: MitigationConfig::default(),
            reward: RewardConfig::default(),
            learning: BanditConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// Parses and validates.
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn n_windows(&self) -> u64 {
        self.horizon_ticks / self.kpi_window_ticks.max(1)
    }

    /// Same run with every xApp disabled and mitigation off.
    pub fn baseline(&self) -> Self {
        let mut b = self.clone();
        b.xapps = XAppsConfig {
            start_window: self.xapps.start_window,
            ..XAppsConfig::none()
        };
        b.mitigation.cm_enabled = false;
        b
    }

    pub fn sim_config(&self) -> SimConfig {
        let sites = self.topology.sites();
        let n = sites.len();
        let cells = sites
            .iter()
            .enumerate()
            .map(|(i, &position)| CellSpec {
                position,
                tx_power_dbm: self
                    .topology
                    .tx_powers_dbm
                    .as_ref()
                    .map_or(self.topology.tx_power_dbm, |v| v[i]),
                capacity: self
                    .topology
                    .capacities
                    .as_ref()
                    .map_or(self.topology.capacity, |v| v[i]),
            })
            .collect();
        SimConfig {
            cells,
            bbox: self.topology.bbox(),
            ue_count: self.ues.count,
            mobility: self.ues.mobility.clone(),
            radio: self.radio.clone(),
            timing: self.timing,
            initial_params: HandoverParams::uniform(n, self.handover.h_db, self.handover.ttt_ms, self.handover.cio_db),
            seed: self.seed,
        }
    }

    /// Collects every problem rather than stopping at the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errs: Vec<String> = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                errs.push(msg);
            }
        };
        let t = &self.topology;
        check(self.horizon_ticks > 0, "horizon_ticks must be > 0".into());
        check(self.kpi_window_ticks > 0, "kpi_window_ticks must be > 0".into());
        if self.kpi_window_ticks > 0 {
            check(
                self.horizon_ticks.is_multiple_of(self.kpi_window_ticks),
                format!(
                    "horizon_ticks ({}) must be a multiple of kpi_window_ticks ({})",
                    self.horizon_ticks, self.kpi_window_ticks
                ),
            );
        }
        if self.detection.enabled {
            let need = 2 * self.detection.baseline_window as u64 * self.kpi_window_ticks;
            check(
                self.horizon_ticks >= need,
                format!(
                    "horizon_ticks ({}) must be >= 2 * detection.baseline_window * kpi_window_ticks ({need})",
                    self.horizon_ticks
                ),
            );
            check(self.detection.baseline_window >= 2, "detection.baseline_window must be >= 2".into());
            check(self.detection.k > 0.0, "detection.k must be > 0".into());
            check(
                (-1.0..=1.0).contains(&self.detection.tau),
                "detection.tau must be in [-1, 1]".into(),
            );
        }
        check(t.cells > 0, "topology.cells must be > 0".into());
        if t.layout == Layout::Hex {
            check(
                hex_rings(t.cells).is_some(),
                format!("topology.cells = {} is not a hexagonal count (1, 7, 19, 37, ...)", t.cells),
            );
        }
        check(t.spacing_m > 0.0, "topology.spacing_m must be > 0".into());
        check(t.margin_m > -t.spacing_m, "topology.margin_m must be > -spacing_m".into());
        check(t.capacity > 0, "topology.capacity must be > 0".into());
        check(
            validate_value(ParamId::TxPower, t.tx_power_dbm).is_ok(),
            "topology.tx_power_dbm out of range [0, 46]".into(),
        );
        if let Some(v) = &t.capacities {
            check(v.len() == t.cells, "topology.capacities needs one entry per cell".into());
            check(v.iter().all(|&c| c > 0), "topology.capacities must be > 0".into());
        }
        if let Some(v) = &t.tx_powers_dbm {
            check(v.len() == t.cells, "topology.tx_powers_dbm needs one entry per cell".into());
            check(
                v.iter().all(|&p| validate_value(ParamId::TxPower, p).is_ok()),
                "topology.tx_powers_dbm out of range [0, 46]".into(),
            );
        }
        match &self.ues.mobility {
            MobilityModel::RandomWaypoint {
                speed_min_mps,
                speed_max_mps,
            } => check(
                *speed_min_mps > 0.0 && speed_max_mps >= speed_min_mps,
                "ues.mobility speeds need 0 < speed_min_mps <= speed_max_mps".into(),
            ),
            MobilityModel::Scripted { paths } => check(
                paths.len() == self.ues.count,
                format!("ues.mobility has {} paths for {} UEs", paths.len(), self.ues.count),
            ),
        }
        check(self.timing.tick_ms > 0, "timing.tick_ms must be > 0".into());
        check(self.radio.d0_m > 0.0 && self.radio.d_min_m > 0.0, "radio distances must be > 0".into());
        check(self.radio.shadowing_sigma_db >= 0.0, "radio.shadowing_sigma_db must be >= 0".into());
        check(
            (0.0..=1.0).contains(&self.radio.shadowing_rho),
            "radio.shadowing_rho must be in [0, 1]".into(),
        );
        check(
            validate_value(ParamId::Hysteresis, self.handover.h_db).is_ok(),
            "handover.h_db out of range [0, 10]".into(),
        );
        check(
            TTT_VALUES_MS.contains(&self.handover.ttt_ms),
            format!("handover.ttt_ms = {} is not an allowed TTT value", self.handover.ttt_ms),
        );
        check(
            validate_value(ParamId::Cio, self.handover.cio_db).is_ok(),
            "handover.cio_db out of range [-6, 6]".into(),
        );
        check(self.xapps.mlb_instances >= 1, "xapps.mlb_instances must be >= 1".into());
        if let Err(e) = self.policy.validate() {
            errs.push(e.to_string());
        }
        if self.xapps.stealth {
            let v = self.policy.stealth.victim_cell as usize;
            errs.extend((v >= t.cells).then(|| format!("policy.stealth.victim_cell {v} does not exist")));
        }
        let ids = self.xapps.ids();
        if let Some(p) = &self.mitigation.priorities {
            let mut a = p.clone();
            let mut b = ids.clone();
            a.sort();
            b.sort();
            if a != b {
                errs.push(format!(
                    "mitigation.priorities {p:?} must be an ordering of the enabled xApps {ids:?}"
                ));
            }
        }
        if self.mitigation.cooldown_windows == 0 {
            errs.push("mitigation.cooldown_windows must be > 0".into());
        }
        if self.mitigation.mode == MitigationMode::Learn {
            if ids.is_empty() {
                errs.push("learning needs at least one enabled xApp".into());
            }
            if ids.len() > MAX_XAPPS {
                errs.push(format!("too_many_xapps: {} enabled, at most {MAX_XAPPS}", ids.len()));
            }
            if let Err(e) = self.learning.validate() {
                errs.push(e.to_string());
            }
        }
        if let Err(e) = self.reward.validate() {
            errs.push(e.to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errs))
        }
    }
}
