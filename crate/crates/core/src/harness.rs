//! One experiment run: simulator, RIC, xApps, detection and mitigation wired
//! together on the KPI window clock.
//!
//! Per window: the simulator advances `kpi_window_ticks` ticks, the window's
//! KPIs are published, detection analyses the window (ledger records stamped
//! inside it), mitigation installs blocks for the new reports, and finally
//! the xApps decide on the window and submit through the gate. Their writes
//! are stamped with the window end tick and take effect from the next tick.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::detect::{AnomalyFlag, ConflictDetector, ConflictReport, ConflictType};
use crate::mitigate::{compute_reward, resolve_conflict, EpisodeAggregate, EpisodeRunner, PriorityPolicy};
use crate::ric::{ActionGate, OpenGate, ParameterRegistry, Ric, XAppHandle, Xnib};
use crate::scenario::{mlb_id, ScenarioConfig, MRO_ID, STEALTH_ID};
use crate::sim::{EventKind, KpiSample, KpiWindow, SimEvent, Simulator, Tick};
use crate::xapps::{Mlb, Mro, Stealth, XApp};

#[derive(Debug, Clone)]
pub struct RunResult {
    pub events: Vec<SimEvent>,
    pub kpis: Vec<KpiSample>,
    pub n_cells: usize,
    pub ledger: Xnib,
    pub reports: Vec<ConflictReport>,
    pub flags: Vec<AnomalyFlag>,
    pub onsets: Vec<AnomalyFlag>,
    pub policy: PriorityPolicy,
}

fn std_pop(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

impl RunResult {
    pub fn n_windows(&self) -> usize {
        self.kpis.len() / self.n_cells.max(1)
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn pingpongs(&self) -> usize {
        self.count(EventKind::PingPongHandover)
    }

    pub fn rlfs(&self) -> usize {
        self.count(EventKind::Rlf)
    }

    /// Cross-cell standard deviation of window load, one value per window.
    pub fn load_std_series(&self) -> Vec<f64> {
        self.kpis
            .chunks(self.n_cells.max(1))
            .map(|w| std_pop(&w.iter().map(|s| s.mean_load).collect::<Vec<_>>()))
            .collect()
    }

    /// Mean cross-cell load standard deviation over the last quarter of the run.
    pub fn late_load_std(&self) -> f64 {
        let s = self.load_std_series();
        let tail = &s[s.len() - s.len() / 4..];
        tail.iter().sum::<f64>() / tail.len().max(1) as f64
    }

    pub fn aggregate(&self) -> EpisodeAggregate {
        let s = self.load_std_series();
        let w = s.len().max(1) as f64;
        EpisodeAggregate {
            load_std: s.iter().sum::<f64>() / w,
            rlf_rate: self.rlfs() as f64 / w,
            pingpong_rate: self.pingpongs() as f64 / w,
        }
    }

    pub fn conflict_counts(&self) -> BTreeMap<ConflictType, usize> {
        let mut m = BTreeMap::new();
        for r in &self.reports {
            *m.entry(r.conflict_type).or_insert(0) += 1;
        }
        m
    }
}

struct Slot {
    app: Box<dyn XApp>,
    handle: XAppHandle,
}

fn build_xapps(cfg: &ScenarioConfig, ric: &mut Ric) -> Vec<Slot> {
    let mut apps: Vec<Box<dyn XApp>> = Vec::new();
    if cfg.xapps.mro {
        apps.push(Box::new(Mro::new(MRO_ID, cfg.policy.mro.clone())));
    }
    if cfg.xapps.mlb {
        for i in 0..cfg.xapps.mlb_instances {
            apps.push(Box::new(Mlb::new(mlb_id(i), cfg.policy.mlb.clone(), cfg.topology.neighbors())));
        }
    }
    if cfg.xapps.stealth {
        apps.push(Box::new(Stealth::new(STEALTH_ID, cfg.policy.stealth.clone())));
    }
    apps.into_iter()
        .map(|app| {
            let handle = ric
                .register_xapp(app.descriptor())
                .expect("xApp ids are unique by construction");
            Slot { app, handle }
        })
        .collect()
}

/// Runs with the configured priorities (registration order if unset).
pub fn run(cfg: &ScenarioConfig) -> RunResult {
    run_with_ordering(cfg, cfg.mitigation.priorities.clone())
}

/// Runs with an explicit priority ordering (highest first).
pub fn run_with_ordering(cfg: &ScenarioConfig, ordering: Option<Vec<String>>) -> RunResult {
    let mut sim = Simulator::new(cfg.sim_config());
    let mut ric = Ric::new(ParameterRegistry::default());
    let mut xapps = build_xapps(cfg, &mut ric);
    let mut policy = PriorityPolicy::new(ordering.unwrap_or_else(|| ric.xapps.priority_order()));
    let mut detector = cfg
        .detection
        .enabled
        .then(|| ConflictDetector::new(cfg.detection.clone()));
    let kpimon = ric.bus.subscribe();

    let w_ticks = cfg.kpi_window_ticks;
    let cooldown: Tick = cfg.mitigation.cooldown_windows * w_ticks;
    let n_cells = sim.n_cells();
    let mut events = Vec::new();
    let mut kpis = Vec::new();
    let mut reports = Vec::new();
    let mut flags = Vec::new();
    let mut onsets = Vec::new();

    for w in 0..cfg.n_windows() {
        let start = sim.tick();
        let first_event = events.len();
        let mut loads = Vec::with_capacity(w_ticks as usize);
        for _ in 0..w_ticks {
            events.extend(sim.step());
            loads.push(sim.loads());
        }
        let window = KpiWindow::build(w, w_ticks, &events[first_event..], &loads, &sim.loads(), sim.tick());
        ric.bus.publish(&window.samples);
        let delivered: Vec<KpiSample> = ric
            .bus
            .receive(kpimon)
            .into_iter()
            .map(|d| d.sample)
            .collect();
        kpis.extend(window.samples.iter().cloned());

        if let Some(det) = detector.as_mut() {
            let observed = KpiWindow {
                samples: delivered,
                ..window.clone()
            };
            let out = det.process_window(&observed, start, ric.xnib(), &ric.xapps, &ric.params);
            if cfg.mitigation.cm_enabled {
                for r in &out.reports {
                    resolve_conflict(r, &mut policy, cooldown, sim.tick(), cfg.mitigation.tau_hard);
                }
            }
            flags.extend(out.flags);
            onsets.extend(out.onsets);
            reports.extend(out.reports);
        }

        if w + 1 < cfg.xapps.start_window {
            continue;
        }
        let gate: &mut dyn ActionGate = if cfg.mitigation.cm_enabled {
            &mut policy
        } else {
            &mut OpenGate
        };
        for slot in &mut xapps {
            let actions = slot.app.decide(&window, &sim);
            for a in actions {
                ric.submit_action(slot.handle, a.target, a.param, a.value, &mut sim, gate)
                    .expect("xApps only write declared, registered parameters");
            }
        }
    }

    RunResult {
        events,
        kpis,
        n_cells,
        ledger: ric.xnib().clone(),
        reports,
        flags,
        onsets,
        policy,
    }
}

/// Seed-matched reward of a run against its no-xApp baseline.
pub fn reward_against(run: &RunResult, baseline: &RunResult, cfg: &ScenarioConfig) -> f64 {
    compute_reward(&run.aggregate(), &baseline.aggregate(), &cfg.reward)
}

/// Learning episodes on a scenario: mitigation on, the arm's ordering,
/// reward against the seed-matched baseline (cached per seed).
pub struct ScenarioEpisodes {
    cfg: ScenarioConfig,
    baselines: BTreeMap<u64, EpisodeAggregate>,
}

impl ScenarioEpisodes {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let mut cfg = cfg.clone();
        cfg.mitigation.cm_enabled = true;
        Self {
            cfg,
            baselines: BTreeMap::new(),
        }
    }

    fn seeded(&self, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            seed,
            ..self.cfg.clone()
        }
    }
}

impl EpisodeRunner for ScenarioEpisodes {
    fn run(&mut self, ordering: &[String], seed: u64) -> f64 {
        let cfg = self.seeded(seed);
        let base = *self
            .baselines
            .entry(seed)
            .or_insert_with(|| run(&cfg.baseline()).aggregate());
        let agg = run_with_ordering(&cfg, Some(ordering.to_vec())).aggregate();
        compute_reward(&agg, &base, &cfg.reward)
    }
}

/// Per-KPI totals used in summaries and comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiTotals {
    pub windows: usize,
    pub mean_load: f64,
    pub call_blocks: u64,
    pub rlf_count: u64,
    pub ho_count: u64,
    pub pingpong_count: u64,
    pub late_load_std: f64,
}

impl KpiTotals {
    pub fn from_run(run: &RunResult) -> Self {
        let sum = |f: fn(&KpiSample) -> u32| run.kpis.iter().map(|s| u64::from(f(s))).sum();
        Self {
            windows: run.n_windows(),
            mean_load: run.kpis.iter().map(|s| s.mean_load).sum::<f64>() / run.kpis.len().max(1) as f64,
            call_blocks: sum(|s| s.call_blocks),
            rlf_count: sum(|s| s.rlf_count),
            ho_count: sum(|s| s.ho_count),
            pingpong_count: sum(|s| s.pingpong_count),
            late_load_std: run.late_load_std(),
        }
    }
}
