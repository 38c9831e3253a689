use serde::{Deserialize, Serialize};

use super::{non_negative, positive, ConfigView, PolicyError, ProposedAction, XApp};
use crate::ric::XAppDescriptor;
use crate::sim::params::CIO_RANGE_DB;
use crate::sim::{CellId, KpiId, KpiWindow, ParamId, Target};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlbPolicy {
    /// Load difference (fraction of capacity) that triggers a CIO move.
    pub load_imbalance_threshold: f64,
    pub cio_step_db: f64,
}

impl Default for MlbPolicy {
    fn default() -> Self {
        Self {
            load_imbalance_threshold: 0.2,
            cio_step_db: 1.0,
        }
    }
}

impl MlbPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        non_negative("mlb.load_imbalance_threshold", self.load_imbalance_threshold)?;
        positive("mlb.cio_step_db", self.cio_step_db)
    }
}

/// Mobility load balancing: pushes the boundary of the most loaded cell
/// toward its least loaded neighbor.
#[derive(Debug, Clone)]
pub struct Mlb {
    id: String,
    policy: MlbPolicy,
    neighbors: Vec<Vec<CellId>>,
}

impl Mlb {
    pub fn new(id: impl Into<String>, policy: MlbPolicy, neighbors: Vec<Vec<CellId>>) -> Self {
        Self {
            id: id.into(),
            policy,
            neighbors,
        }
    }
}

fn argmax_by(items: impl Iterator<Item = (CellId, f64)>, better: impl Fn(f64, f64) -> bool) -> Option<CellId> {
    let mut best: Option<(CellId, f64)> = None;
    for (c, v) in items {
        match best {
            Some((_, b)) if !better(v, b) => {}
            _ => best = Some((c, v)),
        }
    }
    best.map(|(c, _)| c)
}

impl XApp for Mlb {
    fn id(&self) -> &str {
        &self.id
    }

    fn descriptor(&self) -> XAppDescriptor {
        XAppDescriptor::new(
            self.id.clone(),
            [ParamId::Cio],
            [KpiId::MeanLoad, KpiId::HoCount, KpiId::PingpongCount],
        )
    }

    fn decide(&mut self, window: &KpiWindow, config: &dyn ConfigView) -> Vec<ProposedAction> {
        let loads = window.loads();
        // Ties resolve to the lowest cell id.
        let Some(c) = argmax_by(loads.iter().enumerate().map(|(i, &l)| (i as CellId, l)), |a, b| a > b) else {
            return Vec::new();
        };
        let Some(n) = argmax_by(
            self.neighbors[c as usize].iter().map(|&n| (n, loads[n as usize])),
            |a, b| a < b,
        ) else {
            return Vec::new();
        };
        if loads[c as usize] - loads[n as usize] <= self.policy.load_imbalance_threshold {
            return Vec::new();
        }
        let (lo, hi) = CIO_RANGE_DB;
        let step = self.policy.cio_step_db;
        let mut out = Vec::new();
        for (target, delta) in [(Target::Pair(c, n), step), (Target::Pair(n, c), -step)] {
            let Ok(cur) = config.value(ParamId::Cio, target) else {
                continue;
            };
            let next = (cur + delta).clamp(lo, hi);
            if next != cur {
                out.push(ProposedAction {
                    target,
                    param: ParamId::Cio,
                    value: next,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xapps::testing::{window, MapConfig};

    fn mlb() -> Mlb {
        Mlb::new(
            "mlb",
            MlbPolicy {
                load_imbalance_threshold: 0.2,
                cio_step_db: 2.0,
            },
            vec![vec![1, 2], vec![0, 2], vec![0, 1]],
        )
    }

    #[test]
    fn moves_boundary_toward_light_neighbor() {
        let acts = mlb().decide(&window(&[0.9, 0.3, 0.5], &[], &[]), &MapConfig::default());
        assert_eq!(
            acts,
            vec![
                ProposedAction {
                    target: Target::Pair(0, 1),
                    param: ParamId::Cio,
                    value: 2.0
                },
                ProposedAction {
                    target: Target::Pair(1, 0),
                    param: ParamId::Cio,
                    value: -2.0
                },
            ]
        );
    }

    #[test]
    fn balanced_loads_do_nothing() {
        let acts = mlb().decide(&window(&[0.5, 0.5, 0.5], &[], &[]), &MapConfig::default());
        assert!(acts.is_empty());
    }

    #[test]
    fn saturated_cio_is_suppressed() {
        let mut cfg = MapConfig::default();
        cfg.overrides.insert((ParamId::Cio, Target::Pair(0, 1)), 6.0);
        cfg.overrides.insert((ParamId::Cio, Target::Pair(1, 0)), -6.0);
        let acts = mlb().decide(&window(&[0.9, 0.3, 0.5], &[], &[]), &cfg);
        assert!(acts.is_empty());
        // Partially saturated: only the side with room moves, and it clamps.
        cfg.overrides.insert((ParamId::Cio, Target::Pair(0, 1)), 5.0);
        let acts = mlb().decide(&window(&[0.9, 0.3, 0.5], &[], &[]), &cfg);
        assert_eq!(acts.len(), 1);
        assert_eq!(acts[0].value, 6.0);
    }
}
