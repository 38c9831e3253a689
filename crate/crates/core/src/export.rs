//! Run artifacts: event and KPI CSVs, JSON-lines ledgers and the summary.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::report::write_jsonl as write_reports_jsonl;
use crate::harness::{reward_against, KpiTotals, RunResult};
use crate::mitigate::EpisodeRecord;
use crate::scenario::ScenarioConfig;
use crate::sim::{EventKind, KpiSample, SimEvent};

pub const EVENTS_CSV: &str = "events.csv";
pub const KPIS_CSV: &str = "kpis.csv";
pub const XNIB_JSONL: &str = "xnib.jsonl";
pub const CONFLICTS_JSONL: &str = "conflicts.jsonl";
pub const SUMMARY_JSON: &str = "summary.json";
pub const POLICY_JSON: &str = "policy.json";
pub const REWARDS_CSV: &str = "rewards.csv";

pub const EVENTS_HEADER: &str = "tick,kind,ue_id,from_cell,to_cell";
pub const KPIS_HEADER: &str = "window_end_tick,cell_id,mean_load,call_blocks,rlf_count,ho_count,pingpong_count";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}: malformed JSON: {1}")]
    Json(String, String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExportError + '_ {
    move |source| ExportError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn opt(c: Option<u32>) -> String {
    c.map(|c| c.to_string()).unwrap_or_default()
}

pub fn write_events_csv<W: Write>(events: &[SimEvent], mut w: W) -> io::Result<()> {
    writeln!(w, "{EVENTS_HEADER}")?;
    for e in events {
        writeln!(w, "{},{},{},{},{}", e.tick, e.kind, e.ue_id, opt(e.from_cell), opt(e.to_cell))?;
    }
    Ok(())
}

pub fn write_kpis_csv<W: Write>(kpis: &[KpiSample], mut w: W) -> io::Result<()> {
    writeln!(w, "{KPIS_HEADER}")?;
    for s in kpis {
        writeln!(
            w,
            "{},{},{:.6},{},{},{},{}",
            s.window_end_tick, s.cell_id, s.mean_load, s.call_blocks, s.rlf_count, s.ho_count, s.pingpong_count
        )?;
    }
    Ok(())
}

pub fn write_rewards_csv<W: Write>(trace: &[EpisodeRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "episode,arm,reward")?;
    for r in trace {
        writeln!(w, "{},{},{}", r.episode, r.arm, r.reward)?;
    }
    Ok(())
}

pub fn read_rewards_csv<R: Read>(r: R) -> Result<Vec<EpisodeRecord>, String> {
    csv::Reader::from_reader(r)
        .deserialize::<EpisodeRecord>()
        .map(|row| row.map_err(|e| e.to_string()))
        .collect()
}

#[derive(Deserialize)]
struct EventRow {
    tick: u64,
    kind: String,
    ue_id: u32,
    from_cell: Option<u32>,
    to_cell: Option<u32>,
}

pub fn read_events_csv<R: Read>(r: R) -> Result<Vec<SimEvent>, String> {
    csv::Reader::from_reader(r)
        .deserialize::<EventRow>()
        .map(|row| {
            let row = row.map_err(|e| e.to_string())?;
            let kind = EventKind::parse(&row.kind).ok_or_else(|| format!("unknown event kind {:?}", row.kind))?;
            Ok(SimEvent {
                tick: row.tick,
                kind,
                ue_id: row.ue_id,
                from_cell: row.from_cell,
                to_cell: row.to_cell,
            })
        })
        .collect()
}

pub fn read_kpis_csv<R: Read>(r: R) -> Result<Vec<KpiSample>, String> {
    csv::Reader::from_reader(r)
        .deserialize::<KpiSample>()
        .map(|row| row.map_err(|e| e.to_string()))
        .collect()
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub seed: u64,
    pub totals: KpiTotals,
    pub event_counts: BTreeMap<String, usize>,
    pub conflict_counts: BTreeMap<String, usize>,
    pub xnib_records: usize,
    /// Reward against the seed-matched run with every xApp disabled.
    pub reward: f64,
    pub baseline_totals: KpiTotals,
    /// Fully resolved configuration, defaults included.
    pub config: ScenarioConfig,
}

impl Summary {
    pub fn new(cfg: &ScenarioConfig, run: &RunResult, baseline: &RunResult) -> Self {
        let mut event_counts: BTreeMap<String, usize> = BTreeMap::new();
        for e in &run.events {
            *event_counts.entry(e.kind.to_string()).or_default() += 1;
        }
        Self {
            scenario: cfg.name.clone(),
            seed: cfg.seed,
            totals: KpiTotals::from_run(run),
            event_counts,
            conflict_counts: run
                .conflict_counts()
                .into_iter()
                .map(|(t, n)| (t.as_str().to_string(), n))
                .collect(),
            xnib_records: run.ledger.len(),
            reward: reward_against(run, baseline, cfg),
            baseline_totals: KpiTotals::from_run(baseline),
            config: cfg.clone(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ExportError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| ExportError::Json(path.display().to_string(), e.to_string()))
    }
}

/// Runs the scenario and its seed-matched no-xApp baseline.
pub fn run_with_summary(cfg: &ScenarioConfig) -> (RunResult, Summary) {
    let run = crate::harness::run(cfg);
    let baseline = crate::harness::run(&cfg.baseline());
    let summary = Summary::new(cfg, &run, &baseline);
    (run, summary)
}

pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), ExportError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Writes the five run artifacts into `dir`, creating it if needed.
pub fn write_bundle(dir: &Path, summary: &Summary, run: &RunResult) -> Result<(), ExportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_file(&dir.join(EVENTS_CSV), |w| write_events_csv(&run.events, w))?;
    write_file(&dir.join(KPIS_CSV), |w| write_kpis_csv(&run.kpis, w))?;
    write_file(&dir.join(XNIB_JSONL), |w| run.ledger.write_jsonl(w))?;
    write_file(&dir.join(CONFLICTS_JSONL), |w| write_reports_jsonl(&run.reports, w))?;
    write_file(&dir.join(SUMMARY_JSON), |w| {
        serde_json::to_writer_pretty(&mut *w, summary)?;
        w.write_all(b"\n")
    })
}
