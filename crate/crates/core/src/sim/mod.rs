//! Deterministic discrete-time RAN simulator.
//!
//! Each [`Simulator::step`] advances one tick in a fixed order: pending
//! parameter writes take effect, UEs move, RSRP is recomputed, radio link
//! failures are checked (after UEs still in outage re-attach), A3 handovers
//! execute, and cell loads are updated. For a fixed configuration and seed
//! the event stream is bit-identical across runs.

pub mod a3;
pub mod events;
pub mod kpi;
pub mod mobility;
pub mod params;
pub mod radio;
pub mod topology;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use events::{EventKind, SimEvent};
pub use kpi::{KpiId, KpiSample, KpiWindow};
pub use mobility::{BoundingBox, MobilityModel, ScriptedPath};
pub use params::{HandoverParams, ParamError, ParamId, Target};
pub use radio::RadioConfig;

use mobility::UeMobility;
use radio::ShadowingLink;

pub type CellId = u32;
pub type UeId = u32;
pub type Tick = u64;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub position: Position,
    pub tx_power_dbm: f64,
    pub capacity: u32,
}

/// Timing and failure constants of the radio plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimTiming {
    pub tick_ms: u32,
    pub t_pp_ms: u32,
    pub t_early_ms: u32,
    pub t_rlf_ms: u32,
    pub rlf_floor_dbm: f64,
}

impl Default for SimTiming {
    fn default() -> Self {
        Self {
            tick_ms: 100,
            t_pp_ms: 2000,
            t_early_ms: 500,
            t_rlf_ms: 300,
            rlf_floor_dbm: -100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub cells: Vec<CellSpec>,
    pub bbox: BoundingBox,
    pub ue_count: usize,
    pub mobility: MobilityModel,
    pub radio: RadioConfig,
    pub timing: SimTiming,
    pub initial_params: HandoverParams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub cell_id: CellId,
    pub position: Position,
    pub tx_power: f64,
    pub capacity: u32,
    pub connected_ues: BTreeSet<UeId>,
}

impl CellState {
    pub fn load(&self) -> f64 {
        self.connected_ues.len() as f64 / f64::from(self.capacity.max(1))
    }

    pub fn is_full(&self) -> bool {
        self.connected_ues.len() >= self.capacity as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeState {
    pub ue_id: UeId,
    pub position: Position,
    pub velocity: (f64, f64),
    /// `None` while in outage.
    pub serving_cell: Option<CellId>,
    /// RSRP per cell, indexed by cell id.
    pub rsrp: Vec<f64>,
    /// Milliseconds accumulated toward TTT, per candidate cell.
    pub a3_timer: Vec<u32>,
    /// Cell left at the last handover and the tick of that handover.
    pub last_serving: Option<(CellId, Tick)>,
    /// Milliseconds spent below the RLF floor.
    pub rlf_timer: u32,
}

/// A parameter value that took effect in the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppliedChange {
    pub tick: Tick,
    pub target: Target,
    pub param: ParamId,
    pub value: f64,
}

/// Immutable copy of the simulator state at a tick boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSnapshot {
    pub tick: Tick,
    pub cells: Vec<CellState>,
    pub ues: Vec<UeState>,
    pub outage: BTreeSet<UeId>,
    pub params: HandoverParams,
}

impl SimSnapshot {
    /// UEs connected to a cell plus UEs in outage.
    pub fn accounted_ues(&self) -> usize {
        self.outage.len()
            + self
                .cells
                .iter()
                .map(|c| c.connected_ues.len())
                .sum::<usize>()
    }
}

#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: SimConfig,
    tick: Tick,
    cells: Vec<CellState>,
    ues: Vec<UeState>,
    mobility: Vec<UeMobility>,
    /// Indexed `ue * n_cells + cell`.
    shadowing: Vec<ShadowingLink>,
    outage: BTreeSet<UeId>,
    params: HandoverParams,
    pending: Vec<(Target, ParamId, f64)>,
    applied: Vec<AppliedChange>,
}

impl Simulator {
    /// Builds the initial state: UEs placed by the mobility model and
    /// attached to their strongest cell with free capacity.
    pub fn new(cfg: SimConfig) -> Self {
        let n_cells = cfg.cells.len();
        assert_eq!(cfg.initial_params.n_cells(), n_cells, "params/cell count mismatch");
        if let MobilityModel::Scripted { paths } = &cfg.mobility {
            assert_eq!(paths.len(), cfg.ue_count, "one scripted path per UE");
        }
        let cells: Vec<CellState> = cfg
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| CellState {
                cell_id: i as CellId,
                position: c.position,
                tx_power: c.tx_power_dbm,
                capacity: c.capacity,
                connected_ues: BTreeSet::new(),
            })
            .collect();
        let mut ues = Vec::with_capacity(cfg.ue_count);
        let mut mobility = Vec::with_capacity(cfg.ue_count);
        let mut shadowing = Vec::with_capacity(cfg.ue_count * n_cells);
        for u in 0..cfg.ue_count as UeId {
            let (m, position, velocity) = UeMobility::init(&cfg.mobility, &cfg.bbox, cfg.seed, u);
            mobility.push(m);
            for c in 0..n_cells as CellId {
                shadowing.push(ShadowingLink::new(
                    cfg.seed,
                    u,
                    c,
                    cfg.radio.shadowing_sigma_db,
                ));
            }
            ues.push(UeState {
                ue_id: u,
                position,
                velocity,
                serving_cell: None,
                rsrp: vec![0.0; n_cells],
                a3_timer: vec![0; n_cells],
                last_serving: None,
                rlf_timer: 0,
            });
        }
        let params = cfg.initial_params.clone();
        let mut sim = Self {
            cfg,
            tick: 0,
            cells,
            ues,
            mobility,
            shadowing,
            outage: BTreeSet::new(),
            params,
            pending: Vec::new(),
            applied: Vec::new(),
        };
        sim.recompute_rsrp();
        for u in 0..sim.ues.len() {
            let mut order: Vec<CellId> = (0..n_cells as CellId).collect();
            let rsrp = &sim.ues[u].rsrp;
            order.sort_by(|a, b| rsrp[*b as usize].total_cmp(&rsrp[*a as usize]).then(a.cmp(b)));
            let floor = sim.cfg.timing.rlf_floor_dbm;
            let target = order
                .into_iter()
                .find(|&c| rsrp[c as usize] >= floor && !sim.cells[c as usize].is_full());
            match target {
                Some(c) => sim.attach(u, c),
                None => {
                    sim.outage.insert(u as UeId);
                }
            }
        }
        sim
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Next tick to be simulated; equals the number of completed ticks.
    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn ues(&self) -> &[UeState] {
        &self.ues
    }

    pub fn outage(&self) -> &BTreeSet<UeId> {
        &self.outage
    }

    pub fn params(&self) -> &HandoverParams {
        &self.params
    }

    pub fn loads(&self) -> Vec<f64> {
        self.cells.iter().map(CellState::load).collect()
    }

    /// Every parameter write that has taken effect, in order.
    pub fn applied_changes(&self) -> &[AppliedChange] {
        &self.applied
    }

    pub fn snapshot(&self) -> SimSnapshot {
        SimSnapshot {
            tick: self.tick,
            cells: self.cells.clone(),
            ues: self.ues.clone(),
            outage: self.outage.clone(),
            params: self.params.clone(),
        }
    }

    /// Current value of a parameter, including writes scheduled for the
    /// next tick boundary.
    pub fn param_value(&self, param: ParamId, target: Target) -> Result<f64, ParamError> {
        if let Some(&(_, _, v)) = self
            .pending
            .iter()
            .rev()
            .find(|(t, p, _)| *t == target && *p == param)
        {
            return Ok(v);
        }
        match (param, target) {
            (ParamId::TxPower, Target::Cell(c)) => self
                .cells
                .get(c as usize)
                .map(|cell| cell.tx_power)
                .ok_or(ParamError::UnknownTarget { param, target }),
            (ParamId::TxPower, _) => Err(ParamError::UnknownTarget { param, target }),
            _ => self.params.get(param, target),
        }
    }

    /// Validates and schedules a parameter write for the next tick boundary.
    /// A rejected write leaves the state untouched.
    pub fn apply_param_change(
        &mut self,
        target: Target,
        param: ParamId,
        value: f64,
    ) -> Result<(), ParamError> {
        match (param, target) {
            (ParamId::TxPower, Target::Cell(c)) if (c as usize) < self.cells.len() => {}
            (ParamId::TxPower, _) => return Err(ParamError::UnknownTarget { param, target }),
            _ => {
                self.params.index_of(param, target)?;
            }
        }
        params::validate_value(param, value)?;
        self.pending.push((target, param, value));
        Ok(())
    }

    fn commit_pending(&mut self) {
        for (target, param, value) in std::mem::take(&mut self.pending) {
            match (param, target) {
                (ParamId::TxPower, Target::Cell(c)) => self.cells[c as usize].tx_power = value,
                _ => self
                    .params
                    .set(param, target, value)
                    .expect("validated on submission"),
            }
            self.applied.push(AppliedChange {
                tick: self.tick,
                target,
                param,
                value,
            });
        }
    }

    fn attach(&mut self, u: usize, cell: CellId) {
        let ue = &mut self.ues[u];
        ue.serving_cell = Some(cell);
        ue.a3_timer.iter_mut().for_each(|t| *t = 0);
        ue.rlf_timer = 0;
        self.cells[cell as usize].connected_ues.insert(ue.ue_id);
    }

    fn recompute_rsrp(&mut self) {
        let n = self.cells.len();
        let radio = &self.cfg.radio;
        for (u, ue) in self.ues.iter_mut().enumerate() {
            for (c, cell) in self.cells.iter().enumerate() {
                ue.rsrp[c] = radio::compute_rsrp(
                    cell.tx_power,
                    cell.position,
                    ue.position,
                    radio,
                    self.shadowing[u * n + c].value_db(),
                );
            }
        }
    }

    fn strongest_cell(rsrp: &[f64]) -> CellId {
        let mut best = 0;
        for c in 1..rsrp.len() {
            if rsrp[c] > rsrp[best] {
                best = c;
            }
        }
        best as CellId
    }

    /// Advances one tick and returns the events it produced.
    pub fn step(&mut self) -> Vec<SimEvent> {
        let now = self.tick;
        let timing = self.cfg.timing;
        let dt_s = f64::from(timing.tick_ms) / 1000.0;
        let mut events = Vec::new();

        self.commit_pending();

        // (1) mobility
        for (u, ue) in self.ues.iter_mut().enumerate() {
            self.mobility[u].advance(
                &self.cfg.mobility,
                &self.cfg.bbox,
                &mut ue.position,
                &mut ue.velocity,
                dt_s,
            );
        }

        // (2) radio
        let (sigma, rho) = (
            self.cfg.radio.shadowing_sigma_db,
            self.cfg.radio.shadowing_rho,
        );
        for link in &mut self.shadowing {
            link.advance(sigma, rho);
        }
        self.recompute_rsrp();

        // (3) re-attach UEs that failed on an earlier tick, then check links
        let waiting: Vec<UeId> = self.outage.iter().copied().collect();
        for u in waiting {
            let best = Self::strongest_cell(&self.ues[u as usize].rsrp);
            if self.ues[u as usize].rsrp[best as usize] < timing.rlf_floor_dbm {
                continue;
            }
            if self.cells[best as usize].is_full() {
                events.push(SimEvent {
                    tick: now,
                    kind: EventKind::CallBlock,
                    ue_id: u,
                    from_cell: None,
                    to_cell: Some(best),
                });
                continue;
            }
            self.outage.remove(&u);
            self.attach(u as usize, best);
        }
        for u in 0..self.ues.len() {
            let ue = &mut self.ues[u];
            let Some(serving) = ue.serving_cell else {
                continue;
            };
            if ue.rsrp[serving as usize] >= timing.rlf_floor_dbm {
                ue.rlf_timer = 0;
                continue;
            }
            ue.rlf_timer += timing.tick_ms;
            if ue.rlf_timer < timing.t_rlf_ms {
                continue;
            }
            let ue_id = ue.ue_id;
            events.push(SimEvent {
                tick: now,
                kind: EventKind::Rlf,
                ue_id,
                from_cell: Some(serving),
                to_cell: None,
            });
            let early = ue.last_serving.filter(|&(_, at)| {
                (now - at) * u64::from(timing.tick_ms) < u64::from(timing.t_early_ms)
            });
            events.extend(match early {
                Some((prev, _)) => Some(SimEvent {
                    tick: now,
                    kind: EventKind::TooEarlyHo,
                    ue_id,
                    from_cell: Some(prev),
                    to_cell: Some(serving),
                }),
                None => {
                    // Late only if a stronger neighbor could have served the
                    // UE; otherwise it simply left coverage.
                    let mut masked = ue.rsrp.clone();
                    masked[serving as usize] = f64::NEG_INFINITY;
                    let best = Self::strongest_cell(&masked);
                    let alt = masked[best as usize];
                    (alt > ue.rsrp[serving as usize] && alt >= timing.rlf_floor_dbm).then_some(SimEvent {
                        tick: now,
                        kind: EventKind::TooLateHo,
                        ue_id,
                        from_cell: Some(serving),
                        to_cell: Some(best),
                    })
                }
            });
            ue.serving_cell = None;
            ue.last_serving = None;
            ue.rlf_timer = 0;
            ue.a3_timer.iter_mut().for_each(|t| *t = 0);
            self.cells[serving as usize].connected_ues.remove(&ue_id);
            self.outage.insert(ue_id);
        }

        // (4) A3 evaluation and handover execution, in UE id order
        for u in 0..self.ues.len() {
            let Some(serving) = self.ues[u].serving_cell else {
                continue;
            };
            let ue = &mut self.ues[u];
            let Some(target) =
                a3::evaluate_a3(serving, &ue.rsrp, &mut ue.a3_timer, &self.params, timing.tick_ms)
            else {
                continue;
            };
            let ue_id = ue.ue_id;
            if self.cells[target as usize].is_full() {
                ue.a3_timer[target as usize] = 0;
                events.push(SimEvent {
                    tick: now,
                    kind: EventKind::CallBlock,
                    ue_id,
                    from_cell: Some(serving),
                    to_cell: Some(target),
                });
                continue;
            }
            let pp =
                events::is_ping_pong(ue.last_serving, target, now, timing.tick_ms, timing.t_pp_ms);
            events.push(SimEvent {
                tick: now,
                kind: if pp {
                    EventKind::PingPongHandover
                } else {
                    EventKind::Handover
                },
                ue_id,
                from_cell: Some(serving),
                to_cell: Some(target),
            });
            self.cells[serving as usize].connected_ues.remove(&ue_id);
            self.attach(u, target);
            self.ues[u].last_serving = Some((serving, now));
        }

        // (5) loads are derived from the connected sets and read via `loads()`.
        self.tick += 1;
        events
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_cell_config(ue_positions: &[Position], sigma: f64, h: f64) -> SimConfig {
        let sites = topology::line_layout(2, 400.0);
        SimConfig {
            cells: sites
                .iter()
                .map(|&p| CellSpec {
                    position: p,
                    tx_power_dbm: 30.0,
                    capacity: 50,
                })
                .collect(),
            bbox: topology::bounding_box(&sites, 200.0),
            ue_count: ue_positions.len(),
            mobility: MobilityModel::Scripted {
                paths: ue_positions
                    .iter()
                    .map(|&start| ScriptedPath {
                        start,
                        velocity: (0.0, 0.0),
                    })
                    .collect(),
            },
            radio: RadioConfig {
                shadowing_sigma_db: sigma,
                ..RadioConfig::default()
            },
            timing: SimTiming::default(),
            initial_params: HandoverParams::uniform(2, h, 100, 0.0),
            seed: 1,
        }
    }

    #[test]
    fn zero_ues_produce_no_events() {
        let mut sim = Simulator::new(two_cell_config(&[], 4.0, 3.0));
        let before = sim.snapshot();
        for _ in 0..50 {
            assert!(sim.step().is_empty());
        }
        let after = sim.snapshot();
        assert_eq!(after.tick, 50);
        assert_eq!(before.cells, after.cells);
        assert_eq!(before.params, after.params);
    }

    #[test]
    fn stationary_ue_between_equal_cells_never_hands_over() {
        let mut sim = Simulator::new(two_cell_config(&[Position::new(200.0, 0.0)], 0.0, 3.0));
        for _ in 0..2000 {
            assert!(sim.step().is_empty());
        }
        assert_eq!(sim.ues()[0].serving_cell, Some(0));
    }

    #[test]
    fn param_change_visible_next_tick() {
        let mut sim = Simulator::new(two_cell_config(&[Position::new(10.0, 0.0)], 0.0, 3.0));
        sim.apply_param_change(Target::Cell(1), ParamId::Hysteresis, 4.0)
            .unwrap();
        assert_eq!(sim.params().hysteresis(1), 3.0);
        assert_eq!(sim.param_value(ParamId::Hysteresis, Target::Cell(1)).unwrap(), 4.0);
        sim.step();
        assert_eq!(sim.params().hysteresis(1), 4.0);
        assert_eq!(sim.applied_changes().len(), 1);
        assert_eq!(sim.applied_changes()[0].tick, 0);
    }

    #[test]
    fn rejected_changes_leave_state_untouched() {
        let mut sim = Simulator::new(two_cell_config(&[Position::new(10.0, 0.0)], 0.0, 3.0));
        let before = sim.snapshot();
        assert!(matches!(
            sim.apply_param_change(Target::Pair(0, 1), ParamId::Cio, 9.0),
            Err(ParamError::OutOfRange { .. })
        ));
        assert!(matches!(
            sim.apply_param_change(Target::Cell(1), ParamId::TimeToTrigger, 70.0),
            Err(ParamError::OutOfRange { .. })
        ));
        assert!(matches!(
            sim.apply_param_change(Target::Cell(7), ParamId::Hysteresis, 1.0),
            Err(ParamError::UnknownTarget { .. })
        ));
        sim.step();
        assert!(sim.applied_changes().is_empty());
        assert_eq!(before.params, sim.params().clone());
    }

    #[test]
    fn moving_ue_hands_over_and_pings_back() {
        // UE walks from cell 0 toward cell 1; it must hand over exactly once
        // without shadowing.
        let mut cfg = two_cell_config(&[Position::new(50.0, 0.0)], 0.0, 3.0);
        cfg.mobility = MobilityModel::Scripted {
            paths: vec![ScriptedPath {
                start: Position::new(50.0, 0.0),
                velocity: (20.0, 0.0),
            }],
        };
        let mut sim = Simulator::new(cfg);
        let mut hos = Vec::new();
        for _ in 0..150 {
            hos.extend(sim.step().into_iter().filter(|e| e.kind.is_handover()));
        }
        assert_eq!(hos.len(), 1);
        assert_eq!((hos[0].from_cell, hos[0].to_cell), (Some(0), Some(1)));
    }

    #[test]
    fn weak_coverage_triggers_rlf_then_reattach() {
        // 2 km away from both sites: about -115 dBm, below the floor.
        let mut cfg = two_cell_config(&[Position::new(100.0, 0.0)], 0.0, 3.0);
        cfg.bbox = BoundingBox {
            min: Position::new(-3000.0, -3000.0),
            max: Position::new(3000.0, 3000.0),
        };
        cfg.mobility = MobilityModel::Scripted {
            paths: vec![ScriptedPath {
                start: Position::new(100.0, 0.0),
                velocity: (0.0, 500.0),
            }],
        };
        let mut sim = Simulator::new(cfg);
        let mut all = Vec::new();
        for _ in 0..40 {
            all.extend(sim.step());
            let s = sim.snapshot();
            assert_eq!(s.accounted_ues(), 1);
        }
        assert!(all.iter().any(|e| e.kind == EventKind::Rlf));
        // Both cells fade together: a coverage loss, not a late handover.
        assert!(!all.iter().any(|e| e.kind == EventKind::TooLateHo));
    }

    #[test]
    fn sluggish_handover_is_too_late() {
        // A3 holds from x = 264 m but TTT needs 51 ticks; the link to cell 0
        // fails near x = 750 m first.
        let mut cfg = two_cell_config(&[Position::new(50.0, 0.0)], 0.0, 10.0);
        cfg.initial_params = HandoverParams::uniform(2, 10.0, 5120, 0.0);
        cfg.bbox = BoundingBox {
            min: Position::new(-3000.0, -3000.0),
            max: Position::new(3000.0, 3000.0),
        };
        cfg.mobility = MobilityModel::Scripted {
            paths: vec![ScriptedPath {
                start: Position::new(50.0, 0.0),
                velocity: (150.0, 0.0),
            }],
        };
        let mut sim = Simulator::new(cfg);
        let mut all = Vec::new();
        for _ in 0..60 {
            all.extend(sim.step());
        }
        let late: Vec<_> = all.iter().filter(|e| e.kind == EventKind::TooLateHo).collect();
        assert_eq!(late.len(), 1);
        assert_eq!((late[0].from_cell, late[0].to_cell), (Some(0), Some(1)));
        // The UE re-establishes on the stronger cell.
        assert_eq!(sim.ues()[0].serving_cell, Some(1));
    }
}
