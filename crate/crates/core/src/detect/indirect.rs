use std::collections::{BTreeMap, BTreeSet};

use super::anomaly::{AnomalyFlag, Direction};
use super::report::{AnomalyRef, ConflictReport, ConflictType, ParamKey};
use crate::ric::{ActionRecord, Outcome, XAppRegistry};
use crate::sim::{KpiId, Tick};

/// (target, param) keys each xApp actually changed in `records`.
pub(crate) fn applied_keys(records: &[ActionRecord]) -> BTreeMap<String, BTreeSet<ParamKey>> {
    let mut out: BTreeMap<String, BTreeSet<ParamKey>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.outcome == Outcome::Applied) {
        out.entry(r.xapp_id.clone())
            .or_default()
            .insert(ParamKey::new(r.target, r.param_id));
    }
    out
}

/// Drops every xApp whose key set overlaps another candidate's. What is left
/// is pairwise disjoint.
pub(crate) fn disjoint_subset(
    candidates: &BTreeSet<String>,
    keys: &BTreeMap<String, BTreeSet<ParamKey>>,
) -> BTreeSet<String> {
    let empty = BTreeSet::new();
    let keys_of = |x: &String| keys.get(x).unwrap_or(&empty);
    candidates
        .iter()
        .filter(|a| {
            candidates
                .iter()
                .all(|b| a == &b || keys_of(a).is_disjoint(keys_of(b)))
        })
        .cloned()
        .collect()
}

/// Shared-impact conflicts for one window.
///
/// For every degraded KPI, the xApps that changed something in `records` and
/// declare that KPI are collected; overlapping writers are left to direct
/// detection. Two or more remaining actors yield a report, and KPIs with
/// the same actor set share one report.
pub fn detect_indirect(
    anomalies: &[AnomalyFlag],
    records: &[ActionRecord],
    registry: &XAppRegistry,
    detected_at_tick: Tick,
) -> Vec<ConflictReport> {
    let keys = applied_keys(records);
    let mut degraded: BTreeMap<KpiId, Vec<AnomalyRef>> = BTreeMap::new();
    for f in anomalies.iter().filter(|f| f.direction == Direction::Degradation) {
        degraded.entry(f.kpi_id).or_default().push(AnomalyRef {
            window_end_tick: f.window_end_tick,
            cell_id: f.cell_id,
            kpi_id: f.kpi_id,
        });
    }
    let mut by_actors: BTreeMap<BTreeSet<String>, (BTreeSet<KpiId>, Vec<AnomalyRef>)> = BTreeMap::new();
    for (kpi, refs) in degraded {
        let declaring: BTreeSet<String> = keys
            .keys()
            .filter(|x| registry.by_id(x).is_some_and(|d| d.declared_impacts.contains(&kpi)))
            .cloned()
            .collect();
        let actors = disjoint_subset(&declaring, &keys);
        if actors.len() < 2 {
            continue;
        }
        let e = by_actors.entry(actors).or_default();
        e.0.insert(kpi);
        e.1.extend(refs);
    }
    let mut out: Vec<ConflictReport> = by_actors
        .into_iter()
        .map(|(xapps, (kpis, refs))| ConflictReport {
            detected_at_tick,
            conflict_type: ConflictType::Indirect,
            parameters: xapps.iter().map(|x| (x.clone(), keys[x].clone())).collect(),
            xapps,
            impacted_kpis: kpis,
            evidence: BTreeMap::new(),
            anomalies: refs,
        })
        .collect();
    super::report::sort_reports(&mut out);
    out
}
