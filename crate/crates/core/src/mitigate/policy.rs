use serde::{Deserialize, Serialize};

use crate::detect::{ConflictReport, ConflictType};
use crate::ric::ActionGate;
use crate::sim::{ParamId, Target, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetPattern {
    Any,
    Exact(Target),
}

impl TargetPattern {
    pub fn matches(&self, target: Target) -> bool {
        match self {
            TargetPattern::Any => true,
            TargetPattern::Exact(t) => *t == target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRule {
    pub xapp_id: String,
    pub target: TargetPattern,
    pub param_id: ParamId,
    /// Last tick on which the rule is in force.
    pub expires_at_tick: Tick,
}

impl BlockRule {
    pub fn covers(&self, xapp_id: &str, target: Target, param: ParamId, now: Tick) -> bool {
        now <= self.expires_at_tick
            && self.param_id == param
            && self.xapp_id == xapp_id
            && self.target.matches(target)
    }
}

/// Priority ordering (first = highest precedence) plus the active blocks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PriorityPolicy {
    ordering: Vec<String>,
    active_blocks: Vec<BlockRule>,
}

impl PriorityPolicy {
    pub fn new(ordering: Vec<String>) -> Self {
        Self {
            ordering,
            active_blocks: Vec::new(),
        }
    }

    pub fn ordering(&self) -> &[String] {
        &self.ordering
    }

    pub fn set_ordering(&mut self, ordering: Vec<String>) {
        self.ordering = ordering;
    }

    /// Position in the ordering; unknown xApps rank below all known ones.
    pub fn rank(&self, xapp_id: &str) -> usize {
        self.ordering
            .iter()
            .position(|x| x == xapp_id)
            .unwrap_or(self.ordering.len())
    }

    pub fn active_blocks(&self) -> &[BlockRule] {
        &self.active_blocks
    }

    pub fn prune(&mut self, now: Tick) {
        self.active_blocks.retain(|r| r.expires_at_tick >= now);
    }

    /// Adds a rule, or extends the expiry of an identical one.
    pub fn add_block(&mut self, rule: BlockRule) {
        if let Some(r) = self.active_blocks.iter_mut().find(|r| {
            r.xapp_id == rule.xapp_id && r.target == rule.target && r.param_id == rule.param_id
        }) {
            r.expires_at_tick = r.expires_at_tick.max(rule.expires_at_tick);
        } else {
            self.active_blocks.push(rule);
        }
    }

    pub fn covers(&self, xapp_id: &str, target: Target, param: ParamId, now: Tick) -> bool {
        self.active_blocks
            .iter()
            .any(|r| r.covers(xapp_id, target, param, now))
    }
}

impl ActionGate for PriorityPolicy {
    fn is_blocked(&mut self, xapp_id: &str, target: Target, param: ParamId, now: Tick) -> bool {
        self.prune(now);
        self.covers(xapp_id, target, param, now)
    }
}

/// Turns a conflict report into block rules and installs them.
///
/// Every implicated xApp except the highest-priority one is blocked on what
/// it touched: the exact (target, param) for direct conflicts, the whole
/// parameter for the other two types. An implicit report whose top evidence
/// exceeds `tau_hard` blocks that xApp alone, whatever its priority.
/// Returns the rules that were added.
pub fn resolve_conflict(
    report: &ConflictReport,
    policy: &mut PriorityPolicy,
    cooldown_ticks: Tick,
    now: Tick,
    tau_hard: f64,
) -> Vec<BlockRule> {
    let expires_at_tick = now + cooldown_ticks;
    let hard = match report.conflict_type {
        ConflictType::Implicit => report
            .evidence
            .iter()
            .filter(|(_, s)| **s > tau_hard)
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0))),
        _ => None,
    };
    let losers: Vec<&String> = if let Some((top, _)) = hard {
        vec![top]
    } else {
        let winner = report
            .xapps
            .iter()
            .min_by_key(|x| (policy.rank(x), x.as_str()));
        report.xapps.iter().filter(|x| Some(*x) != winner).collect()
    };
    let mut added = Vec::new();
    for x in losers {
        let Some(keys) = report.parameters.get(x) else {
            continue;
        };
        for k in keys {
            let target = match report.conflict_type {
                ConflictType::Direct => TargetPattern::Exact(k.target),
                _ => TargetPattern::Any,
            };
            let rule = BlockRule {
                xapp_id: x.clone(),
                target,
                param_id: k.param_id,
                expires_at_tick,
            };
            if !added.contains(&rule) {
                added.push(rule);
            }
        }
    }
    for r in &added {
        policy.add_block(r.clone());
    }
    added
}
