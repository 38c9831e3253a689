use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::anomaly::{AnomalyFlag, Direction};
use super::indirect::applied_keys;
use super::report::{AnomalyRef, ConflictReport, ConflictType, ParamKey};
use crate::ric::{ActionRecord, Outcome, XAppRegistry};
use crate::sim::{CellId, KpiId, Tick};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error("need {needed} windows of history, have {have}")]
    InsufficientHistory { needed: usize, have: usize },
}

/// One KPI window as seen by implicit detection.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WindowMark {
    /// Ledger ticks `[start_tick, end_tick)` belong to this window.
    pub start_tick: Tick,
    pub end_tick: Tick,
    /// (cell, KPI) streams whose degradation episode began in this window.
    pub onsets: BTreeSet<(CellId, KpiId)>,
}

/// Scores how well an xApp's action series explains a degradation series.
pub trait EvidenceScorer {
    /// `None` when the score is undefined (e.g. a constant series).
    fn score(&self, actions: &[bool], degradation: &[bool], lag_max: usize) -> Option<f64>;
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Max over lags 0..=lag_max of corr(a[t - lag], d[t]).
#[derive(Debug, Clone, Copy, Default)]
pub struct LaggedCorrelation;

impl EvidenceScorer for LaggedCorrelation {
    fn score(&self, actions: &[bool], degradation: &[bool], lag_max: usize) -> Option<f64> {
        let a: Vec<f64> = actions.iter().map(|&b| f64::from(u8::from(b))).collect();
        let d: Vec<f64> = degradation.iter().map(|&b| f64::from(u8::from(b))).collect();
        let n = a.len().min(d.len());
        (0..=lag_max.min(n.saturating_sub(2)))
            .filter_map(|lag| pearson(&a[..n - lag], &d[lag..n]))
            .reduce(f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitParams {
    pub lag_max: usize,
    pub tau: f64,
    /// Number of windows (ending at the anomaly) the series span.
    pub history_windows: usize,
}

/// Undeclared-impact conflicts for the anomalies of the last window in
/// `history`.
///
/// `anomalies` should already exclude KPIs explained by indirect
/// detection. Candidates are xApps with an applied action in the last
/// `lag_max + 1` windows; each is scored against the onset series of the
/// degraded KPI. A report is emitted only if some implicated xApp does not
/// declare the KPI.
pub fn detect_implicit(
    anomalies: &[AnomalyFlag],
    ledger: &[ActionRecord],
    history: &[WindowMark],
    registry: &XAppRegistry,
    params: ImplicitParams,
    scorer: &dyn EvidenceScorer,
) -> Result<Vec<ConflictReport>, DetectError> {
    let degraded: Vec<&AnomalyFlag> = anomalies
        .iter()
        .filter(|f| f.direction == Direction::Degradation)
        .collect();
    if degraded.is_empty() {
        return Ok(Vec::new());
    }
    let needed = params.lag_max + 1;
    if history.len() < needed {
        return Err(DetectError::InsufficientHistory {
            needed,
            have: history.len(),
        });
    }
    let span = &history[history.len() - params.history_windows.max(needed).min(history.len())..];
    let n = span.len();
    let current = &span[n - 1];

    let in_range = |a: Tick, b: Tick| {
        let lo = ledger.partition_point(|r| r.tick < a);
        let hi = ledger.partition_point(|r| r.tick < b);
        &ledger[lo..hi.max(lo)]
    };
    let lookback = in_range(span[n - needed].start_tick, current.end_tick);
    let keys = applied_keys(lookback);

    let mut series: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
    for x in keys.keys() {
        series.insert(x, vec![false; n]);
    }
    for (t, w) in span.iter().enumerate() {
        for r in in_range(w.start_tick, w.end_tick) {
            if r.outcome == Outcome::Applied {
                if let Some(s) = series.get_mut(r.xapp_id.as_str()) {
                    s[t] = true;
                }
            }
        }
    }

    let mut by_kpi: BTreeMap<KpiId, Vec<&AnomalyFlag>> = BTreeMap::new();
    for f in degraded {
        by_kpi.entry(f.kpi_id).or_default().push(f);
    }
    let mut out = Vec::new();
    for (kpi, flags) in by_kpi {
        let cells: BTreeSet<CellId> = flags.iter().map(|f| f.cell_id).collect();
        let d: Vec<bool> = span
            .iter()
            .map(|w| cells.iter().any(|&c| w.onsets.contains(&(c, kpi))))
            .collect();
        let mut scored: Vec<(f64, &str)> = series
            .iter()
            .filter_map(|(x, a)| scorer.score(a, &d, params.lag_max).map(|s| (s, *x)))
            .filter(|(s, _)| *s > params.tau)
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
        // Higher scores claim their keys first; overlapping writers are
        // direct-conflict territory and are dropped here.
        let mut taken: BTreeSet<ParamKey> = BTreeSet::new();
        let mut evidence = BTreeMap::new();
        let mut parameters = BTreeMap::new();
        for (s, x) in scored {
            let k = &keys[x];
            if !taken.is_disjoint(k) {
                continue;
            }
            taken.extend(k.iter().copied());
            evidence.insert(x.to_string(), s);
            parameters.insert(x.to_string(), k.clone());
        }
        let undeclared = evidence
            .keys()
            .any(|x| registry.by_id(x).is_none_or(|d| !d.declared_impacts.contains(&kpi)));
        if !undeclared {
            continue;
        }
        out.push(ConflictReport {
            detected_at_tick: current.end_tick,
            conflict_type: ConflictType::Implicit,
            xapps: evidence.keys().cloned().collect(),
            parameters,
            impacted_kpis: [kpi].into(),
            evidence,
            anomalies: flags
                .iter()
                .map(|f| AnomalyRef {
                    window_end_tick: f.window_end_tick,
                    cell_id: f.cell_id,
                    kpi_id: kpi,
                })
                .collect(),
        });
    }
    super::report::sort_reports(&mut out);
    Ok(out)
}
