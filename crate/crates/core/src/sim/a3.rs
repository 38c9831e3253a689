//! A3-style handover trigger: a neighbor offset by the pair CIO must beat the
//! serving cell by its hysteresis for at least the serving cell's TTT.

use super::params::HandoverParams;
use super::CellId;

/// Whether neighbor `n` satisfies the entering condition right now.
#[inline]
pub fn a3_condition(serving: CellId, n: CellId, rsrp: &[f64], params: &HandoverParams) -> bool {
    rsrp[n as usize] + params.cio(serving, n) > rsrp[serving as usize] + params.hysteresis(serving)
}

/// Updates the per-neighbor TTT timers for one tick and returns the handover
/// target, if any.
///
/// `timers[n]` accumulates `tick_ms` while the condition for `n` holds and is
/// reset when it breaks; it is clamped to the current TTT so it never exceeds
/// it. A neighbor qualifies once its timer has reached the TTT. Among the
/// qualifying neighbors the highest RSRP wins, ties going to the lowest id.
pub fn evaluate_a3(
    serving: CellId,
    rsrp: &[f64],
    timers: &mut [u32],
    params: &HandoverParams,
    tick_ms: u32,
) -> Option<CellId> {
    let ttt = params.ttt(serving);
    let mut best: Option<CellId> = None;
    for n in 0..rsrp.len() as CellId {
        let t = &mut timers[n as usize];
        if n == serving || !a3_condition(serving, n, rsrp, params) {
            *t = 0;
            continue;
        }
        *t = (*t).min(ttt).saturating_add(tick_ms).min(ttt);
        if *t >= ttt {
            match best {
                Some(b) if rsrp[n as usize] <= rsrp[b as usize] => {}
                _ => best = Some(n),
            }
        }
    }
    best
}
