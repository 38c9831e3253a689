use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MitigateError;

pub const MAX_XAPPS: usize = 5;

/// Runs one full episode under a priority ordering and returns its reward.
pub trait EpisodeRunner {
    fn run(&mut self, ordering: &[String], seed: u64) -> f64;
}

impl<F: FnMut(&[String], u64) -> f64> EpisodeRunner for F {
    fn run(&mut self, ordering: &[String], seed: u64) -> f64 {
        self(ordering, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BanditConfig {
    pub episodes: usize,
    pub epsilon: f64,
    /// Episode `e` runs with `seed_schedule[e % len]`.
    pub seed_schedule: Vec<u64>,
    /// Seeds the exploration coin flips.
    pub rng_seed: u64,
}

impl Default for BanditConfig {
    fn default() -> Self {
        Self {
            episodes: 200,
            epsilon: 0.1,
            seed_schedule: (1..=10).collect(),
            rng_seed: 0,
        }
    }
}

impl BanditConfig {
    pub fn validate(&self) -> Result<(), MitigateError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(MitigateError::InvalidEpsilon(self.epsilon));
        }
        if self.seed_schedule.is_empty() {
            return Err(MitigateError::EmptySeedSchedule);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub arm: String,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnOutcome {
    pub arms: Vec<Vec<String>>,
    pub best: usize,
    pub values: Vec<f64>,
    pub pulls: Vec<usize>,
    pub trace: Vec<EpisodeRecord>,
}

#[derive(Serialize)]
struct PolicyJson<'a> {
    ordering: &'a [String],
    arm_values: BTreeMap<String, f64>,
    episodes: usize,
}

impl LearnOutcome {
    pub fn best_ordering(&self) -> &[String] {
        &self.arms[self.best]
    }

    pub fn write_policy_json<W: Write>(&self, w: W) -> io::Result<()> {
        let json = PolicyJson {
            ordering: self.best_ordering(),
            arm_values: self
                .arms
                .iter()
                .zip(&self.values)
                .map(|(a, v)| (arm_label(a), *v))
                .collect(),
            episodes: self.trace.len(),
        };
        serde_json::to_writer_pretty(w, &json).map_err(io::Error::from)
    }
}

pub fn arm_label(ordering: &[String]) -> String {
    ordering.join(">")
}

/// All orderings of `items`, lexicographic by position in `items`.
pub fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy search over complete priority orderings.
///
/// Arms that were never pulled go first; afterwards each episode explores
/// a uniformly random arm with probability `epsilon` and otherwise exploits
/// the best running mean (ties to the earlier arm). A single xApp has one
/// arm and returns without running anything.
pub fn learn_priorities(
    xapps: &[String],
    runner: &mut dyn EpisodeRunner,
    cfg: &BanditConfig,
) -> Result<LearnOutcome, MitigateError> {
    if xapps.len() > MAX_XAPPS {
        return Err(MitigateError::TooManyXApps(xapps.len()));
    }
    cfg.validate()?;
    let arms = permutations(xapps);
    let mut values = vec![0.0; arms.len()];
    let mut pulls = vec![0usize; arms.len()];
    let mut trace = Vec::new();
    if arms.len() == 1 {
        return Ok(LearnOutcome {
            arms,
            best: 0,
            values,
            pulls,
            trace,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for episode in 0..cfg.episodes {
        let arm = if let Some(i) = pulls.iter().position(|&p| p == 0) {
            i
        } else if rng.random::<f64>() < cfg.epsilon {
            rng.random_range(0..arms.len())
        } else {
            argmax(&values)
        };
        let seed = cfg.seed_schedule[episode % cfg.seed_schedule.len()];
        let reward = runner.run(&arms[arm], seed);
        pulls[arm] += 1;
        values[arm] += (reward - values[arm]) / pulls[arm] as f64;
        trace.push(EpisodeRecord {
            episode,
            arm: arm_label(&arms[arm]),
            reward,
        });
    }
    Ok(LearnOutcome {
        best: argmax(&values),
        arms,
        values,
        pulls,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(&ids(&["a"])).len(), 1);
        assert_eq!(permutations(&ids(&["a", "b", "c"])).len(), 6);
        assert_eq!(permutations(&ids(&["a", "b", "c", "d", "e"])).len(), 120);
        assert_eq!(permutations(&ids(&["a", "b"]))[1], ids(&["b", "a"]));
    }

    #[test]
    fn single_xapp_runs_nothing() {
        let mut calls = 0;
        let mut runner = |_: &[String], _: u64| {
            calls += 1;
            0.0
        };
        let out = learn_priorities(&ids(&["mlb"]), &mut runner, &BanditConfig::default()).unwrap();
        assert_eq!(out.best_ordering(), ids(&["mlb"]).as_slice());
        assert!(out.trace.is_empty());
        assert_eq!(calls, 0);
    }

    #[test]
    fn too_many_xapps() {
        let xs = ids(&["a", "b", "c", "d", "e", "f"]);
        let r = learn_priorities(&xs, &mut |_: &[String], _: u64| 0.0, &BanditConfig::default());
        assert_eq!(r.unwrap_err(), MitigateError::TooManyXApps(6));
    }

    #[test]
    fn finds_the_better_arm_and_is_deterministic() {
        let mut runner = |o: &[String], seed: u64| {
            let noise = (seed % 7) as f64 * 0.01;
            if o[0] == "mro" { 1.0 + noise } else { 0.5 + noise }
        };
        let cfg = BanditConfig::default();
        let xs = ids(&["mlb", "mro"]);
        let a = learn_priorities(&xs, &mut runner, &cfg).unwrap();
        let b = learn_priorities(&xs, &mut runner, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.best_ordering(), ids(&["mro", "mlb"]).as_slice());
        assert_eq!(a.trace.len(), 200);
    }

    #[test]
    fn policy_json_shape() {
        let out = learn_priorities(
            &ids(&["a", "b"]),
            &mut |o: &[String], _: u64| if o[0] == "b" { 1.0 } else { 0.0 },
            &BanditConfig {
                episodes: 4,
                ..BanditConfig::default()
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        out.write_policy_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["ordering"], serde_json::json!(["b", "a"]));
        assert_eq!(v["episodes"], 4);
        assert_eq!(v["arm_values"]["b>a"], 1.0);
    }
}
