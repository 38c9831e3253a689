//! Rolling mean/sigma anomaly detection over per-cell KPI streams.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::sim::{CellId, KpiId, KpiSample, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Degradation,
    Improvement,
}

/// Which way a KPI gets worse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    HigherIsWorse,
    LowerIsWorse,
    /// Distance from the cross-cell mean is what gets tracked.
    Imbalance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolarityTable {
    pub mean_load: Polarity,
    pub call_blocks: Polarity,
    pub rlf_count: Polarity,
    pub ho_count: Polarity,
    pub pingpong_count: Polarity,
}

impl Default for PolarityTable {
    fn default() -> Self {
        Self {
            mean_load: Polarity::Imbalance,
            call_blocks: Polarity::HigherIsWorse,
            rlf_count: Polarity::HigherIsWorse,
            ho_count: Polarity::HigherIsWorse,
            pingpong_count: Polarity::HigherIsWorse,
        }
    }
}

impl PolarityTable {
    pub fn get(&self, kpi: KpiId) -> Polarity {
        match kpi {
            KpiId::MeanLoad => self.mean_load,
            KpiId::CallBlocks => self.call_blocks,
            KpiId::RlfCount => self.rlf_count,
            KpiId::HoCount => self.ho_count,
            KpiId::PingpongCount => self.pingpong_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyFlag {
    pub window_end_tick: Tick,
    pub cell_id: CellId,
    pub kpi_id: KpiId,
    /// The tracked value (for imbalance KPIs, the distance from the cross-cell mean).
    pub value: f64,
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub z_score: f64,
    pub direction: Direction,
}

/// |value - mean| / std. Zero spread with a differing value scores `+inf`.
pub fn z_score(value: f64, mean: f64, std: f64) -> f64 {
    let dev = (value - mean).abs();
    if std > 0.0 {
        dev / std
    } else if dev == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Sample mean and standard deviation (n - 1 denominator).
pub fn mean_std(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Outcome of feeding one value to a [`RollingBaseline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub mean: f64,
    pub std: f64,
    pub z: f64,
    pub flagged: bool,
}

/// Rolling baseline of the last `window` unflagged values.
#[derive(Debug, Clone)]
pub struct RollingBaseline {
    window: usize,
    k: f64,
    values: VecDeque<f64>,
}

impl RollingBaseline {
    pub fn new(window: usize, k: f64) -> Self {
        Self {
            window,
            k,
            values: VecDeque::with_capacity(window + 1),
        }
    }

    /// Scores `value` once the baseline is full; flagged values are kept
    /// out of the baseline.
    pub fn observe(&mut self, value: f64) -> Option<Scored> {
        let scored = (self.values.len() >= self.window).then(|| {
            let (mean, std) = mean_std(self.values.iter().copied());
            let z = z_score(value, mean, std);
            Scored {
                mean,
                std,
                z,
                flagged: z > self.k,
            }
        });
        if !scored.is_some_and(|s| s.flagged) {
            self.values.push_back(value);
            if self.values.len() > self.window {
                self.values.pop_front();
            }
        }
        scored
    }
}

/// Per-(cell, KPI) detector fed one KPI window at a time.
#[derive(Debug, Clone)]
pub struct AnomalyDetector {
    baseline_window: usize,
    k: f64,
    polarity: PolarityTable,
    streams: HashMap<(CellId, KpiId), RollingBaseline>,
}

impl AnomalyDetector {
    pub fn new(baseline_window: usize, k: f64, polarity: PolarityTable) -> Self {
        Self {
            baseline_window,
            k,
            polarity,
            streams: HashMap::new(),
        }
    }

    /// Flags for one window's samples, ordered by cell then KPI.
    pub fn process(&mut self, samples: &[KpiSample]) -> Vec<AnomalyFlag> {
        let n = samples.len().max(1) as f64;
        let load_mean = samples.iter().map(|s| s.mean_load).sum::<f64>() / n;
        let mut flags = Vec::new();
        for s in samples {
            for kpi in KpiId::ALL {
                let polarity = self.polarity.get(kpi);
                let value = match polarity {
                    Polarity::Imbalance => (s.value(kpi) - load_mean).abs(),
                    _ => s.value(kpi),
                };
                let stream = self
                    .streams
                    .entry((s.cell_id, kpi))
                    .or_insert_with(|| RollingBaseline::new(self.baseline_window, self.k));
                let Some(sc) = stream.observe(value) else {
                    continue;
                };
                if !sc.flagged {
                    continue;
                }
                let worse = match polarity {
                    Polarity::LowerIsWorse => value < sc.mean,
                    _ => value > sc.mean,
                };
                flags.push(AnomalyFlag {
                    window_end_tick: s.window_end_tick,
                    cell_id: s.cell_id,
                    kpi_id: kpi,
                    value,
                    baseline_mean: sc.mean,
                    baseline_std: sc.std,
                    z_score: sc.z,
                    direction: if worse {
                        Direction::Degradation
                    } else {
                        Direction::Improvement
                    },
                });
            }
        }
        flags
    }
}
