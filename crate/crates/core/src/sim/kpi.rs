//! Per-cell KPI aggregation over a window of ticks.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::events::{EventKind, SimEvent};
use super::{CellId, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KpiId {
    MeanLoad,
    CallBlocks,
    RlfCount,
    HoCount,
    PingpongCount,
}

impl KpiId {
    pub const ALL: [KpiId; 5] = [
        KpiId::MeanLoad,
        KpiId::CallBlocks,
        KpiId::RlfCount,
        KpiId::HoCount,
        KpiId::PingpongCount,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            KpiId::MeanLoad => "mean_load",
            KpiId::CallBlocks => "call_blocks",
            KpiId::RlfCount => "rlf_count",
            KpiId::HoCount => "ho_count",
            KpiId::PingpongCount => "pingpong_count",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for KpiId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiSample {
    /// Exclusive end of the window, in ticks.
    pub window_end_tick: Tick,
    pub cell_id: CellId,
    pub mean_load: f64,
    pub call_blocks: u32,
    pub rlf_count: u32,
    pub ho_count: u32,
    pub pingpong_count: u32,
}

impl KpiSample {
    pub fn value(&self, kpi: KpiId) -> f64 {
        match kpi {
            KpiId::MeanLoad => self.mean_load,
            KpiId::CallBlocks => f64::from(self.call_blocks),
            KpiId::RlfCount => f64::from(self.rlf_count),
            KpiId::HoCount => f64::from(self.ho_count),
            KpiId::PingpongCount => f64::from(self.pingpong_count),
        }
    }
}

/// Aggregates one window.
///
/// `load_samples` holds one per-cell load vector per simulated tick of the
/// window; when it is empty the mean load falls back to `current_loads`.
/// Handovers, ping-pongs and RLFs are tallied on the source (serving) cell;
/// call blocks on the cell that refused admission.
pub fn collect_kpis(
    events: &[SimEvent],
    load_samples: &[Vec<f64>],
    current_loads: &[f64],
    window_end_tick: Tick,
) -> Vec<KpiSample> {
    let n = current_loads.len();
    let mut out: Vec<KpiSample> = (0..n)
        .map(|c| KpiSample {
            window_end_tick,
            cell_id: c as CellId,
            mean_load: if load_samples.is_empty() {
                current_loads[c]
            } else {
                load_samples.iter().map(|l| l[c]).sum::<f64>() / load_samples.len() as f64
            },
            call_blocks: 0,
            rlf_count: 0,
            ho_count: 0,
            pingpong_count: 0,
        })
        .collect();
    for e in events {
        let cell = match e.kind {
            EventKind::CallBlock => e.to_cell,
            _ => e.from_cell,
        };
        let Some(s) = cell.and_then(|c| out.get_mut(c as usize)) else {
            continue;
        };
        match e.kind {
            EventKind::Handover => s.ho_count += 1,
            EventKind::PingPongHandover => {
                s.ho_count += 1;
                s.pingpong_count += 1;
            }
            EventKind::Rlf => s.rlf_count += 1,
            EventKind::CallBlock => s.call_blocks += 1,
            EventKind::TooLateHo | EventKind::TooEarlyHo => {}
        }
    }
    out
}

/// KPIs of one completed window together with the RLF cause breakdown that
/// robustness optimisation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiWindow {
    pub index: u64,
    pub window_end_tick: Tick,
    pub window_ticks: u64,
    pub samples: Vec<KpiSample>,
    /// Per-cell count of RLFs attributed to late handover.
    pub too_late: Vec<u32>,
    /// Per-cell count of RLFs shortly after a handover into the cell.
    pub too_early: Vec<u32>,
}

impl KpiWindow {
    pub fn build(
        index: u64,
        window_ticks: u64,
        events: &[SimEvent],
        load_samples: &[Vec<f64>],
        current_loads: &[f64],
        window_end_tick: Tick,
    ) -> Self {
        let samples = collect_kpis(events, load_samples, current_loads, window_end_tick);
        let n = current_loads.len();
        let mut too_late = vec![0; n];
        let mut too_early = vec![0; n];
        for e in events {
            match e.kind {
                EventKind::TooLateHo => {
                    if let Some(c) = e.from_cell {
                        too_late[c as usize] += 1;
                    }
                }
                EventKind::TooEarlyHo => {
                    if let Some(c) = e.to_cell {
                        too_early[c as usize] += 1;
                    }
                }
                _ => {}
            }
        }
        Self {
            index,
            window_end_tick,
            window_ticks,
            samples,
            too_late,
            too_early,
        }
    }

    pub fn loads(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.mean_load).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(kind: EventKind, from: Option<CellId>, to: Option<CellId>) -> SimEvent {
        SimEvent {
            tick: 5,
            kind,
            ue_id: 0,
            from_cell: from,
            to_cell: to,
        }
    }

    #[test]
    fn empty_window_uses_current_load() {
        let s = collect_kpis(&[], &[], &[0.25, 0.5], 10);
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].mean_load, 0.5);
        assert_eq!(s[0].ho_count + s[0].rlf_count + s[0].call_blocks, 0);
        assert_eq!(s[0].window_end_tick, 10);
    }

    #[test]
    fn ping_pongs_count_as_handovers() {
        let events = [
            ev(EventKind::Handover, Some(0), Some(1)),
            ev(EventKind::PingPongHandover, Some(0), Some(1)),
            ev(EventKind::PingPongHandover, Some(0), Some(1)),
        ];
        let s = collect_kpis(&events, &[], &[0.0, 0.0], 10);
        assert_eq!(s[0].ho_count, 3);
        assert_eq!(s[0].pingpong_count, 2);
        assert_eq!(s[1].ho_count, 0);
    }

    #[test]
    fn attribution() {
        let events = [
            ev(EventKind::Rlf, Some(1), None),
            ev(EventKind::TooLateHo, Some(1), Some(0)),
            ev(EventKind::CallBlock, Some(0), Some(1)),
        ];
        let w = KpiWindow::build(0, 2, &events, &[vec![0.2, 0.4], vec![0.4, 0.6]], &[0.0, 0.0], 10);
        assert_eq!(w.samples[1].rlf_count, 1);
        assert_eq!(w.samples[1].call_blocks, 1);
        assert_eq!(w.samples[0].call_blocks, 0);
        assert_eq!(w.too_late, vec![0, 1]);
        assert!((w.samples[0].mean_load - 0.3).abs() < 1e-12);
        assert!((w.samples[1].mean_load - 0.5).abs() < 1e-12);
    }
}
