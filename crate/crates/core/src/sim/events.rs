use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CellId, Tick, UeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    Handover,
    PingPongHandover,
    TooLateHo,
    TooEarlyHo,
    Rlf,
    CallBlock,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Handover => "Handover",
            EventKind::PingPongHandover => "PingPongHandover",
            EventKind::TooLateHo => "TooLateHo",
            EventKind::TooEarlyHo => "TooEarlyHo",
            EventKind::Rlf => "Rlf",
            EventKind::CallBlock => "CallBlock",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "Handover" => EventKind::Handover,
            "PingPongHandover" => EventKind::PingPongHandover,
            "TooLateHo" => EventKind::TooLateHo,
            "TooEarlyHo" => EventKind::TooEarlyHo,
            "Rlf" => EventKind::Rlf,
            "CallBlock" => EventKind::CallBlock,
            _ => return None,
        })
    }

    /// True for both plain and ping-pong handovers.
    pub fn is_handover(self) -> bool {
        matches!(self, EventKind::Handover | EventKind::PingPongHandover)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One radio-plane event.
///
/// For `Rlf` the `from_cell` is the cell whose link failed. `TooEarlyHo`
/// names the handover that preceded the failure; `TooLateHo` names the
/// serving cell and the strongest neighbor, emitted only when that neighbor
/// was stronger than the serving cell and above the RLF floor. `CallBlock`
/// carries the cell that refused admission in `to_cell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimEvent {
    pub tick: Tick,
    pub kind: EventKind,
    pub ue_id: UeId,
    pub from_cell: Option<CellId>,
    pub to_cell: Option<CellId>,
}

/// Outcome class of an executed handover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandoverClass {
    Normal,
    PingPong,
    TooEarly,
}

/// Timing constants for handover classification, all in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyTiming {
    pub tick_ms: u32,
    pub t_pp_ms: u32,
    pub t_early_ms: u32,
}

/// Ping-pong test applied at the moment a handover executes: the UE returns
/// to the cell it left at its previous handover, within `t_pp_ms`.
pub fn is_ping_pong(
    last_serving: Option<(CellId, Tick)>,
    to_cell: CellId,
    now: Tick,
    tick_ms: u32,
    t_pp_ms: u32,
) -> bool {
    match last_serving {
        Some((cell, at)) => {
            cell == to_cell && (now.saturating_sub(at)) * u64::from(tick_ms) < u64::from(t_pp_ms)
        }
        None => false,
    }
}

/// Classifies the handover at `log[index]` from the full event log.
///
/// A radio link failure of the same UE within `t_early_ms` after the
/// handover makes it `TooEarly`, which takes precedence over `PingPong`.
/// Ping-pong looks back for the UE's previous handover and requires it to
/// be the reverse move within `t_pp_ms`.
pub fn classify_handover(log: &[SimEvent], index: usize, timing: ClassifyTiming) -> HandoverClass {
    let ho = log[index];
    assert!(ho.kind.is_handover(), "event {index} is not a handover");
    let ms = |dt: Tick| dt * u64::from(timing.tick_ms);

    let failed_early = log[index + 1..]
        .iter()
        .filter(|e| e.ue_id == ho.ue_id)
        .take_while(|e| !e.kind.is_handover())
        .any(|e| e.kind == EventKind::Rlf && ms(e.tick - ho.tick) < u64::from(timing.t_early_ms));
    if failed_early {
        return HandoverClass::TooEarly;
    }

    // Only the immediately previous handover matters, and an RLF in between
    // breaks the chain (the UE re-attached rather than handed over).
    let prev = log[..index]
        .iter()
        .rev()
        .filter(|e| e.ue_id == ho.ue_id)
        .find(|e| e.kind.is_handover() || e.kind == EventKind::Rlf);
    match prev {
        Some(p)
            if p.kind.is_handover()
                && p.from_cell == ho.to_cell
                && p.to_cell == ho.from_cell
                && ms(ho.tick - p.tick) < u64::from(timing.t_pp_ms) =>
        {
            HandoverClass::PingPong
        }
        _ => HandoverClass::Normal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TIMING: ClassifyTiming = ClassifyTiming {
        tick_ms: 100,
        t_pp_ms: 2000,
        t_early_ms: 500,
    };

    fn ho(tick: Tick, from: CellId, to: CellId) -> SimEvent {
        SimEvent {
            tick,
            kind: EventKind::Handover,
            ue_id: 1,
            from_cell: Some(from),
            to_cell: Some(to),
        }
    }

    #[test]
    fn return_within_window_is_ping_pong() {
        // A->B at 1000 ms, B->A at 1800 ms.
        let log = [ho(10, 0, 1), ho(18, 1, 0)];
        assert_eq!(classify_handover(&log, 1, TIMING), HandoverClass::PingPong);
        assert!(is_ping_pong(Some((0, 10)), 0, 18, 100, 2000));
    }

    #[test]
    fn return_outside_window_is_normal() {
        let log = [ho(10, 0, 1), ho(40, 1, 0)];
        assert_eq!(classify_handover(&log, 1, TIMING), HandoverClass::Normal);
        assert!(!is_ping_pong(Some((0, 10)), 0, 40, 100, 2000));
        // Exactly at the window edge is not a ping-pong.
        assert!(!is_ping_pong(Some((0, 10)), 0, 30, 100, 2000));
    }

    #[test]
    fn rlf_shortly_after_handover_is_too_early() {
        let rlf = SimEvent {
            tick: 13,
            kind: EventKind::Rlf,
            ue_id: 1,
            from_cell: Some(1),
            to_cell: None,
        };
        let log = [ho(10, 0, 1), rlf];
        assert_eq!(classify_handover(&log, 0, TIMING), HandoverClass::TooEarly);
        let late = SimEvent { tick: 15, ..rlf };
        let log = [ho(10, 0, 1), late];
        assert_eq!(classify_handover(&log, 0, TIMING), HandoverClass::Normal);
    }

    #[test]
    fn other_ues_do_not_interfere() {
        let mut other = ho(12, 1, 0);
        other.ue_id = 2;
        let log = [ho(10, 0, 1), other, ho(15, 1, 2)];
        assert_eq!(classify_handover(&log, 2, TIMING), HandoverClass::Normal);
    }
}
