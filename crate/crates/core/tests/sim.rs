use std::collections::BTreeMap;

use ricsim_core::harness::run;
use ricsim_core::scenario::{Layout, ScenarioConfig};
use ricsim_core::sim::{EventKind, MobilityModel, Position, ScriptedPath, Simulator};

fn small(seed: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig {
        seed,
        ..Default::default()
    };
    c.topology.cells = 7;
    c.ues.count = 40;
    c.horizon_ticks = 2000;
    c
}

#[test]
fn same_seed_same_event_log_and_kpis() {
    let a = run(&small(5));
    let b = run(&small(5));
    assert_eq!(a.events, b.events);
    assert_eq!(a.kpis, b.kpis);
    assert_ne!(a.events, run(&small(6)).events);
}

#[test]
fn every_ue_is_served_or_in_outage_each_tick() {
    let mut cfg = small(11);
    cfg.topology.capacity = 6;
    cfg.topology.tx_power_dbm = 12.0;
    let mut sim = Simulator::new(cfg.sim_config());
    for _ in 0..1500 {
        sim.step();
        let snap = sim.snapshot();
        assert_eq!(snap.accounted_ues(), 40);
        for ue in &snap.ues {
            match ue.serving_cell {
                Some(c) => assert!(snap.cells[c as usize].connected_ues.contains(&ue.ue_id)),
                None => assert!(snap.outage.contains(&ue.ue_id)),
            }
        }
    }
}

/// Re-derives every handover from the reported RSRPs with an independent
/// TTT bookkeeping and checks the simulator agrees tick by tick.
#[test]
fn handovers_match_an_a3_oracle() {
    let mut cfg = small(3);
    cfg.topology.tx_power_dbm = 46.0;
    cfg.topology.capacity = 1000;
    cfg.handover.h_db = 2.0;
    cfg.handover.ttt_ms = 320;
    let sim_cfg = cfg.sim_config();
    let tick_ms = sim_cfg.timing.tick_ms;
    let mut sim = Simulator::new(sim_cfg);
    let n = sim.n_cells();
    let mut timers: Vec<Vec<u32>> = vec![vec![0; n]; sim.ues().len()];
    let mut handovers = 0;
    for _ in 0..3000 {
        let before: Vec<Option<u32>> = sim.ues().iter().map(|u| u.serving_cell).collect();
        let params = sim.params().clone();
        let events = sim.step();
        assert!(events.iter().all(|e| e.kind.is_handover()), "{events:?}");
        for (u, ue) in sim.ues().iter().enumerate() {
            let s = before[u].expect("no outage at full power");
            let (h, ttt) = (params.hysteresis(s), params.ttt(s));
            let mut expected = None;
            for c in 0..n as u32 {
                let t = &mut timers[u][c as usize];
                if c != s && ue.rsrp[c as usize] + params.cio(s, c) > ue.rsrp[s as usize] + h {
                    *t += tick_ms;
                } else {
                    *t = 0;
                }
                if *t >= ttt && expected.is_none_or(|e: u32| ue.rsrp[c as usize] > ue.rsrp[e as usize]) {
                    expected = Some(c);
                }
            }
            let got = ue.serving_cell.filter(|&c| c != s);
            assert_eq!(got, expected, "ue {u} at tick {}", sim.tick() - 1);
            if got.is_some() {
                timers[u].iter_mut().for_each(|t| *t = 0);
                handovers += 1;
            }
        }
    }
    assert!(handovers > 50, "too few handovers to be meaningful: {handovers}");
}

/// Tick of the first handover of one UE walking from cell 0 towards cell 1.
fn first_handover_tick(h_db: f64, ttt_ms: u32) -> u64 {
    let mut c = ScenarioConfig::default();
    c.topology.layout = Layout::Line;
    c.topology.cells = 2;
    c.topology.spacing_m = 500.0;
    c.topology.margin_m = 100.0;
    c.ues.count = 1;
    c.ues.mobility = MobilityModel::Scripted {
        paths: vec![ScriptedPath {
            start: Position::new(50.0, 0.0),
            velocity: (10.0, 0.0),
        }],
    };
    c.radio.shadowing_sigma_db = 0.0;
    c.handover.h_db = h_db;
    c.handover.ttt_ms = ttt_ms;
    let mut sim = Simulator::new(c.sim_config());
    for _ in 0..600 {
        if let Some(e) = sim.step().into_iter().find(|e| e.kind.is_handover()) {
            return e.tick;
        }
    }
    panic!("no handover with h={h_db} ttt={ttt_ms}");
}

#[test]
fn larger_hysteresis_or_ttt_delays_the_handover() {
    let by_h: Vec<u64> = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0].iter().map(|&h| first_handover_tick(h, 100)).collect();
    assert!(by_h.windows(2).all(|w| w[0] < w[1]), "{by_h:?}");
    let by_ttt: Vec<u64> = [0, 160, 480, 1280].iter().map(|&t| first_handover_tick(3.0, t)).collect();
    assert!(by_ttt.windows(2).all(|w| w[0] <= w[1]) && by_ttt[0] < by_ttt[3], "{by_ttt:?}");
}

#[test]
fn kpi_rows_reaggregate_from_the_event_log() {
    let r = run(&small(9));
    let w = small(9).kpi_window_ticks;
    // (window index, cell) -> [blocks, rlf, ho, pp]
    let mut oracle: BTreeMap<(u64, u32), [u32; 4]> = BTreeMap::new();
    for e in &r.events {
        let (cell, slot) = match e.kind {
            EventKind::CallBlock => (e.to_cell, 0),
            EventKind::Rlf => (e.from_cell, 1),
            EventKind::Handover => (e.from_cell, 2),
            EventKind::PingPongHandover => {
                oracle.entry((e.tick / w, e.from_cell.unwrap())).or_default()[3] += 1;
                (e.from_cell, 2)
            }
            _ => continue,
        };
        oracle.entry((e.tick / w, cell.unwrap())).or_default()[slot] += 1;
    }
    assert_eq!(r.kpis.len(), r.n_windows() * 7);
    for s in &r.kpis {
        assert_eq!(s.window_end_tick % w, 0);
        let got = [s.call_blocks, s.rlf_count, s.ho_count, s.pingpong_count];
        let want = oracle.get(&(s.window_end_tick / w - 1, s.cell_id)).copied().unwrap_or_default();
        assert_eq!(got, want, "window ending {} cell {}", s.window_end_tick, s.cell_id);
        assert!((0.0..=1.0).contains(&s.mean_load));
    }
}
