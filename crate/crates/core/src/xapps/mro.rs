use serde::{Deserialize, Serialize};

use super::{non_negative, positive, ConfigView, PolicyError, ProposedAction, XApp};
use crate::ric::XAppDescriptor;
use crate::sim::params::{ttt_index, HYSTERESIS_RANGE_DB, TTT_VALUES_MS};
use crate::sim::{CellId, KpiId, KpiWindow, ParamId, Target};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MroPolicy {
    /// Ping-pong handovers per cell per window above which H is raised.
    pub pingpong_rate_threshold: f64,
    /// Too-late RLFs per cell per window above which H is lowered.
    pub rlf_threshold: f64,
    pub h_step_db: f64,
    /// Steps through the TTT value set once H saturates.
    pub ttt_step: u32,
}

impl Default for MroPolicy {
    fn default() -> Self {
        Self {
            pingpong_rate_threshold: 1.0,
            rlf_threshold: 0.0,
            h_step_db: 1.0,
            ttt_step: 1,
        }
    }
}

impl MroPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        non_negative("mro.pingpong_rate_threshold", self.pingpong_rate_threshold)?;
        non_negative("mro.rlf_threshold", self.rlf_threshold)?;
        positive("mro.h_step_db", self.h_step_db)?;
        positive("mro.ttt_step", f64::from(self.ttt_step))
    }
}

/// Mobility robustness optimisation: raises H (then TTT) against
/// ping-pongs, lowers H (then TTT) against too-late RLFs. When both fire in
/// the same window the ping-pong correction wins.
#[derive(Debug, Clone)]
pub struct Mro {
    id: String,
    policy: MroPolicy,
}

impl Mro {
    pub fn new(id: impl Into<String>, policy: MroPolicy) -> Self {
        Self {
            id: id.into(),
            policy,
        }
    }

    fn adjust(&self, cell: CellId, up: bool, config: &dyn ConfigView) -> Option<ProposedAction> {
        let target = Target::Cell(cell);
        let h = config.value(ParamId::Hysteresis, target).ok()?;
        let (lo, hi) = HYSTERESIS_RANGE_DB;
        let step = self.policy.h_step_db;
        if (up && h < hi) || (!up && h > lo) {
            let value = if up { (h + step).min(hi) } else { (h - step).max(lo) };
            return Some(ProposedAction {
                target,
                param: ParamId::Hysteresis,
                value,
            });
        }
        let ttt = config.value(ParamId::TimeToTrigger, target).ok()?;
        let idx = ttt_index(ttt as u32)?;
        let step = self.policy.ttt_step as usize;
        let next = if up {
            (idx + step).min(TTT_VALUES_MS.len() - 1)
        } else {
            idx.saturating_sub(step)
        };
        (next != idx).then(|| ProposedAction {
            target,
            param: ParamId::TimeToTrigger,
            value: f64::from(TTT_VALUES_MS[next]),
        })
    }
}

impl XApp for Mro {
    fn id(&self) -> &str {
        &self.id
    }

    fn descriptor(&self) -> XAppDescriptor {
        XAppDescriptor::new(
            self.id.clone(),
            [ParamId::Hysteresis, ParamId::TimeToTrigger],
            [KpiId::RlfCount, KpiId::HoCount, KpiId::PingpongCount],
        )
    }

    fn decide(&mut self, window: &KpiWindow, config: &dyn ConfigView) -> Vec<ProposedAction> {
        let mut out = Vec::new();
        for s in &window.samples {
            let c = s.cell_id;
            let pingpong = f64::from(s.pingpong_count) > self.policy.pingpong_rate_threshold;
            let too_late =
                f64::from(window.too_late[c as usize]) > self.policy.rlf_threshold;
            let act = if pingpong {
                self.adjust(c, true, config)
            } else if too_late {
                self.adjust(c, false, config)
            } else {
                None
            };
            out.extend(act);
        }
        out
    }
}
