//! Cell site layouts.

use super::mobility::BoundingBox;
use super::Position;

/// Hexagonal layout: one center site and `rings` rings around it, spiral
/// numbered from the center (1, 7, 19, 37, ... sites).
pub fn hex_layout(rings: u32, isd_m: f64) -> Vec<Position> {
    // Axial directions, walked in order around each ring.
    const DIRS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
    let to_xy = |q: i32, r: i32| {
        let (q, r) = (f64::from(q), f64::from(r));
        Position::new(isd_m * (q + r / 2.0), isd_m * (3f64.sqrt() / 2.0) * r)
    };
    let mut out = vec![Position::new(0.0, 0.0)];
    for k in 1..=rings as i32 {
        // Start at direction 4 scaled by k, then walk each side.
        let (mut q, mut r) = (DIRS[4].0 * k, DIRS[4].1 * k);
        for dir in DIRS {
            for _ in 0..k {
                out.push(to_xy(q, r));
                q += dir.0;
                r += dir.1;
            }
        }
    }
    out
}

/// Sites on the x axis, `spacing_m` apart, starting at the origin.
pub fn line_layout(n: usize, spacing_m: f64) -> Vec<Position> {
    (0..n).map(|i| Position::new(i as f64 * spacing_m, 0.0)).collect()
}

/// Sites within `1.2 * spacing_m` of each other are neighbors.
pub fn neighbors(sites: &[Position], spacing_m: f64) -> Vec<Vec<u32>> {
    let limit = 1.2 * spacing_m;
    sites
        .iter()
        .enumerate()
        .map(|(i, a)| {
            sites
                .iter()
                .enumerate()
                .filter(|&(j, b)| j != i && a.distance(*b) <= limit)
                .map(|(j, _)| j as u32)
                .collect()
        })
        .collect()
}

/// Axis-aligned box around all sites, padded by `margin_m`.
pub fn bounding_box(sites: &[Position], margin_m: f64) -> BoundingBox {
    let (mut lo, mut hi) = (
        Position::new(f64::INFINITY, f64::INFINITY),
        Position::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for p in sites {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    BoundingBox {
        min: Position::new(lo.x - margin_m, lo.y - margin_m),
        max: Position::new(hi.x + margin_m, hi.y + margin_m),
    }
}
