//! Anomaly detection and conflict classification.
//!
//! [`ConflictDetector`] runs once per KPI window: anomaly flags first, then
//! direct detection on the ledger, then the anomaly-triggered indirect and
//! implicit passes.

pub mod anomaly;
pub mod direct;
pub mod implicit;
pub mod indirect;
pub mod report;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use anomaly::{AnomalyDetector, AnomalyFlag, Direction, Polarity, PolarityTable, RollingBaseline};
pub use direct::detect_direct;
pub use implicit::{detect_implicit, DetectError, EvidenceScorer, ImplicitParams, LaggedCorrelation, WindowMark};
pub use indirect::detect_indirect;
pub use report::{AnomalyRef, ConflictReport, ConflictType, ParamKey};

use crate::ric::{ParameterRegistry, XAppRegistry, Xnib};
use crate::sim::{CellId, KpiId, KpiWindow, Tick};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionConfig {
    pub enabled: bool,
    /// Unflagged windows per (cell, KPI) stream the baseline holds.
    pub baseline_window: usize,
    pub k: f64,
    pub lag_max: usize,
    pub tau: f64,
    /// Windows of history the implicit scorer looks at.
    pub history_windows: usize,
    pub polarity: PolarityTable,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            baseline_window: 100,
            k: 3.0,
            lag_max: 10,
            tau: 0.6,
            history_windows: 40,
            polarity: PolarityTable::default(),
        }
    }
}

impl DetectionConfig {
    pub fn implicit_params(&self) -> ImplicitParams {
        ImplicitParams {
            lag_max: self.lag_max,
            tau: self.tau,
            history_windows: self.history_windows,
        }
    }
}

/// Everything detection produced for one window.
#[derive(Debug, Clone, Default)]
pub struct WindowDetection {
    pub flags: Vec<AnomalyFlag>,
    /// Degradation flags that opened a new episode.
    pub onsets: Vec<AnomalyFlag>,
    pub reports: Vec<ConflictReport>,
}

pub struct ConflictDetector {
    cfg: DetectionConfig,
    anomaly: AnomalyDetector,
    scorer: Box<dyn EvidenceScorer + Send>,
    history: Vec<WindowMark>,
    /// Window index of the latest degradation flag per stream.
    last_flag: HashMap<(CellId, KpiId), usize>,
    windows_seen: usize,
}

impl ConflictDetector {
    pub fn new(cfg: DetectionConfig) -> Self {
        Self::with_scorer(cfg, Box::new(LaggedCorrelation))
    }

    pub fn with_scorer(cfg: DetectionConfig, scorer: Box<dyn EvidenceScorer + Send>) -> Self {
        Self {
            anomaly: AnomalyDetector::new(cfg.baseline_window, cfg.k, cfg.polarity.clone()),
            cfg,
            scorer,
            history: Vec::new(),
            last_flag: HashMap::new(),
            windows_seen: 0,
        }
    }

    pub fn config(&self) -> &DetectionConfig {
        &self.cfg
    }

    /// Analyses one completed window. Ledger records with ticks in
    /// `[start_tick, window.window_end_tick)` belong to it.
    pub fn process_window(
        &mut self,
        window: &KpiWindow,
        start_tick: Tick,
        ledger: &Xnib,
        xapps: &XAppRegistry,
        params: &ParameterRegistry,
    ) -> WindowDetection {
        let idx = self.windows_seen;
        self.windows_seen += 1;
        let end_tick = window.window_end_tick;
        let flags = self.anomaly.process(&window.samples);

        // An episode stays open while flags recur within lag_max windows.
        let mut onsets = Vec::new();
        for f in flags.iter().filter(|f| f.direction == Direction::Degradation) {
            let key = (f.cell_id, f.kpi_id);
            let fresh = self
                .last_flag
                .get(&key)
                .is_none_or(|&last| idx - last > self.cfg.lag_max);
            if fresh {
                onsets.push(f.clone());
            }
            self.last_flag.insert(key, idx);
        }
        self.history.push(WindowMark {
            start_tick,
            end_tick,
            onsets: onsets.iter().map(|f| (f.cell_id, f.kpi_id)).collect(),
        });
        let keep = self.cfg.history_windows.max(self.cfg.lag_max + 1);
        if self.history.len() > keep {
            let drop = self.history.len() - keep;
            self.history.drain(..drop);
        }

        let records = if end_tick > start_tick {
            ledger.window(start_tick, end_tick - 1)
        } else {
            &[]
        };
        let mut reports = detect_direct(records, params, end_tick);
        let indirect = detect_indirect(&flags, records, xapps, end_tick);
        let covered: BTreeSet<KpiId> = indirect
            .iter()
            .flat_map(|r| r.impacted_kpis.iter().copied())
            .collect();
        reports.extend(indirect);
        let pending: Vec<AnomalyFlag> = onsets
            .iter()
            .filter(|f| !covered.contains(&f.kpi_id))
            .cloned()
            .collect();
        let lookback_start = self.history.first().map_or(start_tick, |w| w.start_tick);
        let span = ledger.window(lookback_start, end_tick.saturating_sub(1));
        if let Ok(implicit) = detect_implicit(
            &pending,
            span,
            &self.history,
            xapps,
            self.cfg.implicit_params(),
            self.scorer.as_ref(),
        ) {
            reports.extend(implicit);
        }
        report::sort_reports(&mut reports);
        WindowDetection {
            flags,
            onsets,
            reports,
        }
    }
}
