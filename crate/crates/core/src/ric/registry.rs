use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::RicError;
use crate::sim::params::{self, ParamId, TTT_VALUES_MS};
use crate::sim::KpiId;

/// Self-reported contract of an xApp: what it writes and which KPIs it
/// expects those writes to move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XAppDescriptor {
    pub xapp_id: String,
    pub declared_params: BTreeSet<ParamId>,
    pub declared_impacts: BTreeSet<KpiId>,
    /// Lower is higher precedence. `None` takes the registration order.
    pub priority: Option<u32>,
}

impl XAppDescriptor {
    pub fn new(
        xapp_id: impl Into<String>,
        params: impl IntoIterator<Item = ParamId>,
        impacts: impl IntoIterator<Item = KpiId>,
    ) -> Self {
        Self {
            xapp_id: xapp_id.into(),
            declared_params: params.into_iter().collect(),
            declared_impacts: impacts.into_iter().collect(),
            priority: None,
        }
    }

    pub fn with_priority(mut self, priority: u32) -> Self {
        self.priority = Some(priority);
        self
    }
}

/// Opaque reference to a registered xApp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XAppHandle(pub(crate) usize);

#[derive(Debug, Clone, Default)]
pub struct XAppRegistry {
    entries: Vec<XAppDescriptor>,
}

impl XAppRegistry {
    pub fn register(&mut self, mut desc: XAppDescriptor) -> Result<XAppHandle, RicError> {
        if desc.declared_params.is_empty() {
            return Err(RicError::NoDeclaredParams(desc.xapp_id));
        }
        if self.entries.iter().any(|d| d.xapp_id == desc.xapp_id) {
            return Err(RicError::DuplicateId(desc.xapp_id));
        }
        desc.priority.get_or_insert(self.entries.len() as u32);
        self.entries.push(desc);
        Ok(XAppHandle(self.entries.len() - 1))
    }

    pub fn get(&self, handle: XAppHandle) -> Option<&XAppDescriptor> {
        self.entries.get(handle.0)
    }

    pub fn by_id(&self, xapp_id: &str) -> Option<&XAppDescriptor> {
        self.entries.iter().find(|d| d.xapp_id == xapp_id)
    }

    pub fn handle_of(&self, xapp_id: &str) -> Option<XAppHandle> {
        self.entries
            .iter()
            .position(|d| d.xapp_id == xapp_id)
            .map(XAppHandle)
    }

    pub fn iter(&self) -> impl Iterator<Item = &XAppDescriptor> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Registered ids sorted by priority (highest precedence first), ties by
    /// registration order.
    pub fn priority_order(&self) -> Vec<String> {
        let mut v: Vec<(u32, usize, &str)> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, d)| (d.priority.unwrap_or(i as u32), i, d.xapp_id.as_str()))
            .collect();
        v.sort();
        v.into_iter().map(|(_, _, id)| id.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamDomain {
    Range { min: f64, max: f64 },
    Discrete(Vec<f64>),
}

impl ParamDomain {
    pub fn contains(&self, v: f64) -> bool {
        match self {
            ParamDomain::Range { min, max } => v >= *min && v <= *max,
            ParamDomain::Discrete(set) => set.contains(&v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub domain: ParamDomain,
    /// KPIs a write to this parameter is known to move.
    pub default_impacts: BTreeSet<KpiId>,
}

/// Catalogue of writable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRegistry {
    specs: BTreeMap<ParamId, ParamSpec>,
}

impl ParameterRegistry {
    pub fn empty() -> Self {
        Self {
            specs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, param: ParamId, spec: ParamSpec) {
        self.specs.insert(param, spec);
    }

    pub fn get(&self, param: ParamId) -> Option<&ParamSpec> {
        self.specs.get(&param)
    }

    pub fn contains(&self, param: ParamId) -> bool {
        self.specs.contains_key(&param)
    }
}

impl Default for ParameterRegistry {
    /// The handover and power parameters with their known impacts.
    fn default() -> Self {
        use KpiId::*;
        let range = |(min, max): (f64, f64)| ParamDomain::Range { min, max };
        let mut r = Self::empty();
        let robustness: BTreeSet<KpiId> = [RlfCount, HoCount, PingpongCount].into();
        r.insert(
            ParamId::Hysteresis,
            ParamSpec {
                domain: range(params::HYSTERESIS_RANGE_DB),
                default_impacts: robustness.clone(),
            },
        );
        r.insert(
            ParamId::TimeToTrigger,
            ParamSpec {
                domain: ParamDomain::Discrete(TTT_VALUES_MS.iter().map(|&t| f64::from(t)).collect()),
                default_impacts: robustness,
            },
        );
        r.insert(
            ParamId::Cio,
            ParamSpec {
                domain: range(params::CIO_RANGE_DB),
                default_impacts: [MeanLoad, HoCount, PingpongCount].into(),
            },
        );
        r.insert(
            ParamId::TxPower,
            ParamSpec {
                domain: range(params::TX_POWER_RANGE_DBM),
                default_impacts: [MeanLoad, RlfCount].into(),
            },
        );
        r
    }
}
