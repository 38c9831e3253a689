use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::ric::XAppRegistry;
use crate::sim::{CellId, KpiId, ParamId, Target, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConflictType {
    Direct,
    Indirect,
    Implicit,
}

impl ConflictType {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictType::Direct => "Direct",
            ConflictType::Indirect => "Indirect",
            ConflictType::Implicit => "Implicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamKey {
    pub target: Target,
    pub param_id: ParamId,
}

impl ParamKey {
    pub fn new(target: Target, param_id: ParamId) -> Self {
        Self { target, param_id }
    }
}

/// Anomaly that triggered a report. Kept in memory only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AnomalyRef {
    pub window_end_tick: Tick,
    pub cell_id: CellId,
    pub kpi_id: KpiId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub detected_at_tick: Tick,
    pub conflict_type: ConflictType,
    pub xapps: BTreeSet<String>,
    pub parameters: BTreeMap<String, BTreeSet<ParamKey>>,
    pub impacted_kpis: BTreeSet<KpiId>,
    pub evidence: BTreeMap<String, f64>,
    #[serde(skip)]
    pub anomalies: Vec<AnomalyRef>,
}

impl ConflictReport {
    /// Emission order: tick, then type, then the xApp set.
    pub fn sort_key(&self) -> (Tick, ConflictType, Vec<&str>) {
        (
            self.detected_at_tick,
            self.conflict_type,
            self.xapps.iter().map(String::as_str).collect(),
        )
    }

    fn params_intersect(&self) -> bool {
        let sets: Vec<_> = self.parameters.values().collect();
        sets.iter().enumerate().any(|(i, a)| {
            sets[i + 1..]
                .iter()
                .any(|b| a.intersection(b).next().is_some())
        })
    }

    fn all_declare_all(&self, registry: &XAppRegistry) -> bool {
        self.xapps.iter().all(|x| {
            registry
                .by_id(x)
                .is_some_and(|d| self.impacted_kpis.is_subset(&d.declared_impacts))
        })
    }

    /// Whether the report satisfies the structural definition of `ty`.
    pub fn satisfies(&self, ty: ConflictType, registry: &XAppRegistry) -> bool {
        match ty {
            ConflictType::Direct => self.params_intersect(),
            ConflictType::Indirect => !self.params_intersect() && self.all_declare_all(registry),
            ConflictType::Implicit => !self.params_intersect() && !self.all_declare_all(registry),
        }
    }
}

pub fn sort_reports(reports: &mut [ConflictReport]) {
    reports.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn write_jsonl<W: Write>(reports: &[ConflictReport], mut w: W) -> io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
