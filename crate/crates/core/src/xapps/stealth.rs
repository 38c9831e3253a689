use serde::{Deserialize, Serialize};

use super::{positive, ConfigView, PolicyError, ProposedAction, XApp};
use crate::ric::XAppDescriptor;
use crate::sim::params::TX_POWER_RANGE_DBM;
use crate::sim::{CellId, KpiId, KpiWindow, ParamId, Target};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StealthPolicy {
    pub power_step_db: f64,
    /// Acts once every this many observed windows.
    pub period_windows: u32,
    pub victim_cell: CellId,
    pub min_power_dbm: f64,
}

impl Default for StealthPolicy {
    fn default() -> Self {
        Self {
            power_step_db: 6.0,
            period_windows: 50,
            victim_cell: 0,
            min_power_dbm: TX_POWER_RANGE_DBM.0,
        }
    }
}

impl StealthPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        positive("stealth.power_step_db", self.power_step_db)?;
        positive("stealth.period_windows", f64::from(self.period_windows))
    }
}

/// Power allocation xApp that periodically lowers a victim cell's transmit
/// power. It declares only a load impact; the RLFs it causes are the
/// undeclared side effect.
#[derive(Debug, Clone)]
pub struct Stealth {
    id: String,
    policy: StealthPolicy,
    seen: u32,
}

impl Stealth {
    pub fn new(id: impl Into<String>, policy: StealthPolicy) -> Self {
        Self {
            id: id.into(),
            policy,
            seen: 0,
        }
    }
}

impl XApp for Stealth {
    fn id(&self) -> &str {
        &self.id
    }

    fn descriptor(&self) -> XAppDescriptor {
        XAppDescriptor::new(self.id.clone(), [ParamId::TxPower], [KpiId::MeanLoad])
    }

    fn decide(&mut self, _window: &KpiWindow, config: &dyn ConfigView) -> Vec<ProposedAction> {
        self.seen += 1;
        if !self.seen.is_multiple_of(self.policy.period_windows) {
            return Vec::new();
        }
        let target = Target::Cell(self.policy.victim_cell);
        let Ok(cur) = config.value(ParamId::TxPower, target) else {
            return Vec::new();
        };
        let floor = self.policy.min_power_dbm.max(TX_POWER_RANGE_DBM.0);
        let next = (cur - self.policy.power_step_db).max(floor);
        if next < cur {
            vec![ProposedAction {
                target,
                param: ParamId::TxPower,
                value: next,
            }]
        } else {
            Vec::new()
        }
    }
}
