use std::collections::{BTreeMap, BTreeSet};

use super::report::{ConflictReport, ConflictType, ParamKey};
use crate::ric::{ActionRecord, Outcome, ParameterRegistry};
use crate::sim::Tick;

/// Same-parameter contention found in a ledger window.
///
/// Applied and blocked records are grouped by (target, param); every group
/// written by two or more xApps yields one report.
pub fn detect_direct(
    records: &[ActionRecord],
    params: &ParameterRegistry,
    detected_at_tick: Tick,
) -> Vec<ConflictReport> {
    let mut groups: BTreeMap<ParamKey, BTreeSet<&str>> = BTreeMap::new();
    for r in records {
        if r.outcome == Outcome::Rejected {
            continue;
        }
        groups
            .entry(ParamKey::new(r.target, r.param_id))
            .or_default()
            .insert(&r.xapp_id);
    }
    let mut out: Vec<ConflictReport> = groups
        .into_iter()
        .filter(|(_, xs)| xs.len() >= 2)
        .map(|(key, xs)| ConflictReport {
            detected_at_tick,
            conflict_type: ConflictType::Direct,
            xapps: xs.iter().map(|x| x.to_string()).collect(),
            parameters: xs.iter().map(|x| (x.to_string(), BTreeSet::from([key]))).collect(),
            impacted_kpis: params
                .get(key.param_id)
                .map(|s| s.default_impacts.clone())
                .unwrap_or_default(),
            evidence: BTreeMap::new(),
            anomalies: Vec::new(),
        })
        .collect();
    super::report::sort_reports(&mut out);
    out
}
