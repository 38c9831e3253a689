//! UE mobility: random waypoint or scripted constant-velocity paths, both
//! confined to a reflecting bounding box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::radio::{derive_seed, MOBILITY_STREAM};
use super::Position;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Position,
    pub max: Position,
}

impl BoundingBox {
    pub fn contains(&self, p: Position) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Position {
        Position::new(
            rng.random_range(self.min.x..=self.max.x),
            rng.random_range(self.min.y..=self.max.y),
        )
    }
}

/// A scripted UE path: start point and constant velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedPath {
    pub start: Position,
    /// m/s along x and y.
    pub velocity: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum MobilityModel {
    RandomWaypoint { speed_min_mps: f64, speed_max_mps: f64 },
    /// One path per UE; UE count must match.
    Scripted { paths: Vec<ScriptedPath> },
}

/// Per-UE mobility state.
#[derive(Debug, Clone)]
pub(crate) struct UeMobility {
    rng: ChaCha8Rng,
    waypoint: Option<Position>,
    speed: f64,
}

impl UeMobility {
    /// Creates the state for one UE and returns its initial position and velocity.
    pub(crate) fn init(
        model: &MobilityModel,
        bbox: &BoundingBox,
        seed: u64,
        ue: u32,
    ) -> (Self, Position, (f64, f64)) {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, MOBILITY_STREAM, u64::from(ue), 0));
        match model {
            MobilityModel::RandomWaypoint {
                speed_min_mps,
                speed_max_mps,
            } => {
                let pos = bbox.sample(&mut rng);
                let mut m = Self {
                    rng,
                    waypoint: None,
                    speed: 0.0,
                };
                m.pick_waypoint(bbox, *speed_min_mps, *speed_max_mps);
                let v = m.velocity_from(pos);
                (m, pos, v)
            }
            MobilityModel::Scripted { paths } => {
                let p = paths[ue as usize];
                (
                    Self {
                        rng,
                        waypoint: None,
                        speed: 0.0,
                    },
                    p.start,
                    p.velocity,
                )
            }
        }
    }

    fn pick_waypoint(&mut self, bbox: &BoundingBox, vmin: f64, vmax: f64) {
        self.waypoint = Some(bbox.sample(&mut self.rng));
        self.speed = if vmax > vmin {
            self.rng.random_range(vmin..=vmax)
        } else {
            vmin
        };
    }

    fn velocity_from(&self, pos: Position) -> (f64, f64) {
        match self.waypoint {
            Some(w) => {
                let d = pos.distance(w);
                if d < 1e-9 {
                    (0.0, 0.0)
                } else {
                    ((w.x - pos.x) / d * self.speed, (w.y - pos.y) / d * self.speed)
                }
            }
            None => (0.0, 0.0),
        }
    }

    /// Advances one tick of `dt_s` seconds.
    pub(crate) fn advance(
        &mut self,
        model: &MobilityModel,
        bbox: &BoundingBox,
        pos: &mut Position,
        vel: &mut (f64, f64),
        dt_s: f64,
    ) {
        match model {
            MobilityModel::RandomWaypoint {
                speed_min_mps,
                speed_max_mps,
            } => {
                let mut budget = self.speed * dt_s;
                // A waypoint may be reached mid-tick; spend the remainder on the next leg.
                for _ in 0..4 {
                    let w = self.waypoint.expect("waypoint initialised");
                    let d = pos.distance(w);
                    if d > budget {
                        let f = budget / d;
                        pos.x += (w.x - pos.x) * f;
                        pos.y += (w.y - pos.y) * f;
                        break;
                    }
                    *pos = w;
                    budget -= d;
                    let spent = if self.speed > 0.0 { budget / self.speed } else { 0.0 };
                    self.pick_waypoint(bbox, *speed_min_mps, *speed_max_mps);
                    budget = spent * self.speed;
                    if budget <= 0.0 {
                        break;
                    }
                }
                *vel = self.velocity_from(*pos);
            }
            MobilityModel::Scripted { .. } => {
                pos.x += vel.0 * dt_s;
                pos.y += vel.1 * dt_s;
                reflect(&mut pos.x, &mut vel.0, bbox.min.x, bbox.max.x);
                reflect(&mut pos.y, &mut vel.1, bbox.min.y, bbox.max.y);
            }
        }
    }
}

fn reflect(x: &mut f64, v: &mut f64, lo: f64, hi: f64) {
    if hi <= lo {
        *x = lo;
        return;
    }
    // Bounded loop: a UE never travels more than a couple of box widths per tick.
    for _ in 0..8 {
        if *x < lo {
            *x = 2.0 * lo - *x;
            *v = -*v;
        } else if *x > hi {
            *x = 2.0 * hi - *x;
            *v = -*v;
        } else {
            return;
        }
    }
    *x = x.clamp(lo, hi);
}
