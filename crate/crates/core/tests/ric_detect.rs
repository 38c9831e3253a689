use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ricsim_core::detect::{detect_indirect, AnomalyFlag, ConflictType, Direction, ParamKey};
use ricsim_core::harness::run;
use ricsim_core::mitigate::{BlockRule, PriorityPolicy, TargetPattern};
use ricsim_core::ric::{
    ActionRecord, OpenGate, Outcome, ParameterRegistry, QueryFilter, Ric, RicError, XAppDescriptor, XAppRegistry, Xnib,
};
use ricsim_core::scenario::ScenarioConfig;
use ricsim_core::sim::{KpiId, ParamId, Simulator, Target};

fn record(rng: &mut ChaCha8Rng, tick: u64) -> ActionRecord {
    let param_id = [ParamId::Cio, ParamId::Hysteresis, ParamId::TimeToTrigger][rng.random_range(0..3)];
    let target = if param_id == ParamId::Cio {
        Target::Pair(rng.random_range(0..3), rng.random_range(0..3))
    } else {
        Target::Cell(rng.random_range(0..3))
    };
    ActionRecord {
        tick,
        xapp_id: format!("x{}", rng.random_range(0..4)),
        target,
        param_id,
        old_value: 0.0,
        new_value: 1.0,
        outcome: [Outcome::Applied, Outcome::Rejected, Outcome::BlockedByPriority][rng.random_range(0..3)],
    }
}

#[test]
fn xnib_queries_match_a_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut xnib = Xnib::new();
    let mut tick = 0;
    for _ in 0..500 {
        tick += rng.random_range(0..4);
        xnib.append(record(&mut rng, tick)).unwrap();
    }
    for _ in 0..300 {
        let a = rng.random_range(0..tick + 5);
        let b = a + rng.random_range(0..200);
        let filter = QueryFilter {
            xapp_id: rng.random_bool(0.5).then(|| format!("x{}", rng.random_range(0..4))),
            param_id: rng.random_bool(0.5).then_some(ParamId::Hysteresis),
            target: rng.random_bool(0.3).then_some(Target::Cell(1)),
        };
        let got = xnib.query(a, b, &filter).unwrap();
        let want: Vec<&ActionRecord> = xnib
            .records()
            .iter()
            .filter(|r| a <= r.tick && r.tick <= b)
            .filter(|r| filter.xapp_id.as_ref().is_none_or(|x| *x == r.xapp_id))
            .filter(|r| filter.param_id.is_none_or(|p| p == r.param_id))
            .filter(|r| filter.target.is_none_or(|t| t == r.target))
            .collect();
        assert_eq!(got, want);
    }
    assert!(matches!(xnib.query(5, 4, &QueryFilter::default()), Err(RicError::InvalidWindow { .. })));
}

fn sim() -> Simulator {
    let mut c = ScenarioConfig::default();
    c.topology.cells = 7;
    c.ues.count = 10;
    Simulator::new(c.sim_config())
}

#[test]
fn gate_blocks_covered_writes_and_rejects_undeclared_ones() {
    let mut ran = sim();
    let mut ric = Ric::new(ParameterRegistry::default());
    let a = ric.register_xapp(XAppDescriptor::new("a", [ParamId::Cio], [KpiId::MeanLoad])).unwrap();
    let b = ric.register_xapp(XAppDescriptor::new("b", [ParamId::Cio], [KpiId::MeanLoad])).unwrap();
    let mut policy = PriorityPolicy::new(vec!["a".into(), "b".into()]);
    policy.add_block(BlockRule {
        xapp_id: "b".into(),
        target: TargetPattern::Exact(Target::Pair(0, 1)),
        param_id: ParamId::Cio,
        expires_at_tick: 10,
    });
    let pair = Target::Pair(0, 1);
    assert_eq!(ric.submit_action(b, pair, ParamId::Cio, 2.0, &mut ran, &mut policy).unwrap(), Outcome::BlockedByPriority);
    assert_eq!(ran.param_value(ParamId::Cio, pair).unwrap(), 0.0);
    // Same xApp, other pair: not covered.
    assert_eq!(
        ric.submit_action(b, Target::Pair(1, 0), ParamId::Cio, 2.0, &mut ran, &mut policy).unwrap(),
        Outcome::Applied
    );
    assert_eq!(ric.submit_action(a, pair, ParamId::Cio, 3.0, &mut ran, &mut policy).unwrap(), Outcome::Applied);
    // Out of range and undeclared writes never reach the RAN.
    assert_eq!(ric.submit_action(a, pair, ParamId::Cio, 9.0, &mut ran, &mut OpenGate).unwrap(), Outcome::Rejected);
    assert!(ric.submit_action(a, Target::Cell(0), ParamId::Hysteresis, 1.0, &mut ran, &mut OpenGate).is_err());
    assert_eq!(ran.param_value(ParamId::Cio, pair).unwrap(), 3.0);
    let outcomes: Vec<Outcome> = ric.xnib().records().iter().map(|r| r.outcome).collect();
    assert_eq!(outcomes, [Outcome::BlockedByPriority, Outcome::Applied, Outcome::Applied, Outcome::Rejected]);
}

fn flag(cell: u32, kpi: KpiId, direction: Direction) -> AnomalyFlag {
    AnomalyFlag {
        window_end_tick: 100,
        cell_id: cell,
        kpi_id: kpi,
        value: 5.0,
        baseline_mean: 1.0,
        baseline_std: 0.5,
        z_score: 8.0,
        direction,
    }
}

/// Brute force over every degraded KPI: declaring, applying actors with
/// key sets disjoint from all other such actors.
fn indirect_oracle(
    flags: &[AnomalyFlag],
    records: &[ActionRecord],
    registry: &XAppRegistry,
) -> BTreeMap<BTreeSet<String>, BTreeSet<KpiId>> {
    let mut keys: BTreeMap<&str, BTreeSet<ParamKey>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.outcome == Outcome::Applied) {
        keys.entry(&r.xapp_id).or_default().insert(ParamKey::new(r.target, r.param_id));
    }
    let mut out: BTreeMap<BTreeSet<String>, BTreeSet<KpiId>> = BTreeMap::new();
    for f in flags.iter().filter(|f| f.direction == Direction::Degradation) {
        let declaring: Vec<&str> = keys
            .keys()
            .copied()
            .filter(|x| registry.by_id(x).unwrap().declared_impacts.contains(&f.kpi_id))
            .collect();
        let actors: BTreeSet<String> = declaring
            .iter()
            .filter(|a| declaring.iter().all(|b| a == &b || keys[*a].is_disjoint(&keys[*b])))
            .map(|a| a.to_string())
            .collect();
        if actors.len() >= 2 {
            out.entry(actors).or_default().insert(f.kpi_id);
        }
    }
    out
}

#[test]
fn indirect_reports_match_a_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut registry = XAppRegistry::default();
    for i in 0..4 {
        let impacts: Vec<KpiId> = KpiId::ALL.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        registry
            .register(XAppDescriptor::new(format!("x{i}"), [ParamId::Cio, ParamId::Hysteresis, ParamId::TimeToTrigger], impacts))
            .unwrap();
    }
    let mut nonempty = 0;
    for _ in 0..300 {
        let records: Vec<ActionRecord> = (0..rng.random_range(0..8)).map(|_| record(&mut rng, 50)).collect();
        let flags: Vec<AnomalyFlag> = (0..rng.random_range(0..4))
            .map(|_| {
                let kpi = KpiId::ALL[rng.random_range(0..KpiId::ALL.len())];
                let dir = if rng.random_bool(0.8) { Direction::Degradation } else { Direction::Improvement };
                flag(rng.random_range(0..3), kpi, dir)
            })
            .collect();
        let got: BTreeMap<BTreeSet<String>, BTreeSet<KpiId>> = detect_indirect(&flags, &records, &registry, 100)
            .into_iter()
            .map(|r| {
                assert_eq!(r.conflict_type, ConflictType::Indirect);
                assert!(r.satisfies(ConflictType::Indirect, &registry));
                (r.xapps, r.impacted_kpis)
            })
            .collect();
        nonempty += usize::from(!got.is_empty());
        assert_eq!(got, indirect_oracle(&flags, &records, &registry), "{records:?} {flags:?}");
    }
    assert!(nonempty > 20, "oracle barely exercised: {nonempty}");
}

#[test]
fn direct_injection_scenario_raises_direct_reports_and_blocks_the_loser() {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/direct-injection.toml");
    let mut cfg = ScenarioConfig::load(&p).unwrap();
    // Without hard overrides only the priority ordering decides who is blocked.
    cfg.mitigation.tau_hard = 1.0;
    let r = run(&cfg);
    let direct: Vec<_> = r.reports.iter().filter(|x| x.conflict_type == ConflictType::Direct).collect();
    assert!(!direct.is_empty());
    for rep in &direct {
        assert_eq!(rep.xapps, BTreeSet::from(["mlb".to_string(), "mlb2".to_string()]));
    }
    // Inside the cooldown, mlb2 never lands a write on a key it fought over.
    let cooldown = cfg.mitigation.cooldown_windows * cfg.kpi_window_ticks;
    for rep in &direct {
        let key = rep.parameters["mlb2"].iter().next().unwrap();
        let mut later = r.ledger.records().iter().filter(|x| {
            x.xapp_id == "mlb2"
                && ParamKey::new(x.target, x.param_id) == *key
                && x.tick > rep.detected_at_tick
                && x.tick <= rep.detected_at_tick + cooldown
        });
        assert!(later.all(|x| x.outcome == Outcome::BlockedByPriority));
    }
    assert!(!r.ledger.records().iter().any(|x| x.xapp_id == "mlb" && x.outcome == Outcome::BlockedByPriority));
}
