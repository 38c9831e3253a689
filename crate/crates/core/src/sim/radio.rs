//! Log-distance path loss with AR(1)-smoothed lognormal shadowing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Position;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioConfig {
    /// Path loss at the reference distance.
    pub pl0_db: f64,
    pub d0_m: f64,
    pub exponent: f64,
    /// Distances below this are clamped.
    pub d_min_m: f64,
    pub shadowing_sigma_db: f64,
    /// Per-tick AR(1) correlation of the shadowing process.
    pub shadowing_rho: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            pl0_db: 30.0,
            d0_m: 1.0,
            exponent: 3.5,
            d_min_m: 1.0,
            shadowing_sigma_db: 4.0,
            shadowing_rho: 0.9,
        }
    }
}

impl RadioConfig {
    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(self.d_min_m);
        self.pl0_db + 10.0 * self.exponent * (d / self.d0_m).log10()
    }
}

/// Received power of a cell at a UE position.
pub fn compute_rsrp(
    tx_power_dbm: f64,
    cell_pos: Position,
    ue_pos: Position,
    radio: &RadioConfig,
    shadowing_db: f64,
) -> f64 {
    tx_power_dbm - radio.path_loss_db(cell_pos.distance(ue_pos)) + shadowing_db
}

/// Mixes a run seed with a stream label and two indices into an RNG seed.
///
/// SplitMix64 finalizer; used so every (ue, cell) pair and every UE's
/// mobility draws from its own stream, independent of population size.
pub fn derive_seed(seed: u64, stream: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ a.wrapping_mul(0xBF58_476D_1CE4_E5B9)
        ^ b.wrapping_mul(0x94D0_49BB_1331_11EB);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) const SHADOWING_STREAM: u64 = 1;
pub(crate) const MOBILITY_STREAM: u64 = 2;

/// Shadowing process of a single (ue, cell) link.
#[derive(Debug, Clone)]
pub struct ShadowingLink {
    rng: ChaCha8Rng,
    value_db: f64,
}

impl ShadowingLink {
    /// Starts the link in its stationary distribution N(0, sigma^2).
    pub fn new(seed: u64, ue: u32, cell: u32, sigma_db: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            seed,
            SHADOWING_STREAM,
            u64::from(ue),
            u64::from(cell),
        ));
        let z: f64 = StandardNormal.sample(&mut rng);
        Self {
            rng,
            value_db: sigma_db * z,
        }
    }

    pub fn value_db(&self) -> f64 {
        self.value_db
    }

    /// One AR(1) step; keeps the marginal variance at sigma^2.
    pub fn advance(&mut self, sigma_db: f64, rho: f64) {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.value_db = rho * self.value_db + (1.0 - rho * rho).sqrt() * sigma_db * z;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> Position {
        Position::new(0.0, 0.0)
    }

    #[test]
    fn rsrp_at_100m() {
        let r = RadioConfig::default();
        let v = compute_rsrp(30.0, origin(), Position::new(100.0, 0.0), &r, 0.0);
        assert!((v - (-70.0)).abs() < 1e-9, "{v}");
    }

    #[test]
    fn rsrp_at_reference_distance_is_tx_minus_pl0() {
        let r = RadioConfig::default();
        let v = compute_rsrp(30.0, origin(), Position::new(1.0, 0.0), &r, 0.0);
        assert!(v.abs() < 1e-12);
        // Closer than d_min clamps to the same value.
        let v = compute_rsrp(30.0, origin(), Position::new(0.1, 0.0), &r, 0.0);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn seeded_shadowing_matches_independent_stream() {
        let r = RadioConfig::default();
        let link = ShadowingLink::new(42, 7, 3, r.shadowing_sigma_db);
        // Oracle: redraw the first normal of the same derived stream.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(42, SHADOWING_STREAM, 7, 3));
        let z: f64 = StandardNormal.sample(&mut rng);
        let expected = -35.0 * 250f64.log10() + 4.0 * z;
        let v = compute_rsrp(
            30.0,
            origin(),
            Position::new(250.0, 0.0),
            &r,
            link.value_db(),
        );
        assert_eq!(v, expected);
        // Mean is -83.93 dBm; the draw lies within 3 sigma of it.
        assert!((v - (-83.93)).abs() <= 12.0, "{v}");
    }

    #[test]
    fn ar1_keeps_marginal_variance() {
        let mut link = ShadowingLink::new(1, 0, 0, 4.0);
        let n = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            link.advance(4.0, 0.9);
            s += link.value_db();
            s2 += link.value_db() * link.value_db();
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.2, "{mean}");
        assert!((var.sqrt() - 4.0).abs() < 0.15, "{}", var.sqrt());
    }
}
