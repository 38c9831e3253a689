//! The contested control surface: per-cell hysteresis and time-to-trigger,
//! per-pair cell individual offsets, and per-cell transmit power.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::CellId;

/// Allowed time-to-trigger values in milliseconds (3GPP-style discrete set).
pub const TTT_VALUES_MS: [u32; 16] = [
    0, 40, 64, 80, 100, 128, 160, 256, 320, 480, 512, 640, 1024, 1280, 2560, 5120,
];

pub const HYSTERESIS_RANGE_DB: (f64, f64) = (0.0, 10.0);
pub const CIO_RANGE_DB: (f64, f64) = (-6.0, 6.0);
pub const TX_POWER_RANGE_DBM: (f64, f64) = (0.0, 46.0);

/// Identifier of a writable RAN parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ParamId {
    #[serde(rename = "H")]
    Hysteresis,
    #[serde(rename = "TTT")]
    TimeToTrigger,
    #[serde(rename = "CIO")]
    Cio,
    #[serde(rename = "TX_POWER")]
    TxPower,
}

impl ParamId {
    pub const ALL: [ParamId; 4] = [
        ParamId::Hysteresis,
        ParamId::TimeToTrigger,
        ParamId::Cio,
        ParamId::TxPower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamId::Hysteresis => "H",
            ParamId::TimeToTrigger => "TTT",
            ParamId::Cio => "CIO",
            ParamId::TxPower => "TX_POWER",
        }
    }

    /// Whether the parameter is addressed per ordered cell pair rather than per cell.
    pub fn is_pairwise(self) -> bool {
        matches!(self, ParamId::Cio)
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a parameter write is addressed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Cell(CellId),
    /// Ordered (serving, neighbor) pair.
    Pair(CellId, CellId),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Cell(c) => write!(f, "cell {c}"),
            Target::Pair(s, n) => write!(f, "{s}->{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParamError {
    #[error("value {value} out of range for {param}")]
    OutOfRange { param: ParamId, value: f64 },
    #[error("unknown target {target} for {param}")]
    UnknownTarget { param: ParamId, target: Target },
}

/// Checks `value` against the domain of `param`.
pub fn validate_value(param: ParamId, value: f64) -> Result<(), ParamError> {
    let ok = value.is_finite()
        && match param {
            ParamId::Hysteresis => in_range(value, HYSTERESIS_RANGE_DB),
            ParamId::Cio => in_range(value, CIO_RANGE_DB),
            ParamId::TxPower => in_range(value, TX_POWER_RANGE_DBM),
            ParamId::TimeToTrigger => TTT_VALUES_MS.iter().any(|&t| f64::from(t) == value),
        };
    if ok {
        Ok(())
    } else {
        Err(ParamError::OutOfRange { param, value })
    }
}

fn in_range(v: f64, (lo, hi): (f64, f64)) -> bool {
    v >= lo && v <= hi
}

/// Index of `ttt_ms` in [`TTT_VALUES_MS`], if it is a member.
pub fn ttt_index(ttt_ms: u32) -> Option<usize> {
    TTT_VALUES_MS.iter().position(|&t| t == ttt_ms)
}

/// Handover parameters of every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct HandoverParams {
    n_cells: usize,
    hysteresis_db: Vec<f64>,
    ttt_ms: Vec<u32>,
    /// Row-major `n_cells x n_cells`, indexed `[serving * n + neighbor]`.
    cio_db: Vec<f64>,
}

impl HandoverParams {
    /// Uniform parameters. Panics if the defaults violate the parameter domains.
    pub fn uniform(n_cells: usize, hysteresis_db: f64, ttt_ms: u32, cio_db: f64) -> Self {
        validate_value(ParamId::Hysteresis, hysteresis_db).expect("default hysteresis");
        validate_value(ParamId::TimeToTrigger, f64::from(ttt_ms)).expect("default TTT");
        validate_value(ParamId::Cio, cio_db).expect("default CIO");
        let mut cio = vec![cio_db; n_cells * n_cells];
        for c in 0..n_cells {
            cio[c * n_cells + c] = 0.0;
        }
        Self {
            n_cells,
            hysteresis_db: vec![hysteresis_db; n_cells],
            ttt_ms: vec![ttt_ms; n_cells],
            cio_db: cio,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn hysteresis(&self, cell: CellId) -> f64 {
        self.hysteresis_db[cell as usize]
    }

    pub fn ttt(&self, cell: CellId) -> u32 {
        self.ttt_ms[cell as usize]
    }

    pub fn cio(&self, serving: CellId, neighbor: CellId) -> f64 {
        self.cio_db[serving as usize * self.n_cells + neighbor as usize]
    }

    fn check_cell(&self, param: ParamId, target: Target, c: CellId) -> Result<usize, ParamError> {
        if (c as usize) < self.n_cells {
            Ok(c as usize)
        } else {
            Err(ParamError::UnknownTarget { param, target })
        }
    }

    /// Resolves `target` to a storage index for `param`, enforcing the
    /// cell/pair addressing of each parameter.
    pub(crate) fn index_of(&self, param: ParamId, target: Target) -> Result<usize, ParamError> {
        match (param.is_pairwise(), target) {
            (false, Target::Cell(c)) => self.check_cell(param, target, c),
            (true, Target::Pair(s, n)) if s != n => {
                let s = self.check_cell(param, target, s)?;
                let n = self.check_cell(param, target, n)?;
                Ok(s * self.n_cells + n)
            }
            _ => Err(ParamError::UnknownTarget { param, target }),
        }
    }

    /// Reads a handover parameter. `TxPower` is not stored here.
    pub fn get(&self, param: ParamId, target: Target) -> Result<f64, ParamError> {
        let i = self.index_of(param, target)?;
        Ok(match param {
            ParamId::Hysteresis => self.hysteresis_db[i],
            ParamId::TimeToTrigger => f64::from(self.ttt_ms[i]),
            ParamId::Cio => self.cio_db[i],
            ParamId::TxPower => return Err(ParamError::UnknownTarget { param, target }),
        })
    }

    /// Writes a handover parameter after validating target and value.
    pub fn set(&mut self, param: ParamId, target: Target, value: f64) -> Result<(), ParamError> {
        let i = self.index_of(param, target)?;
        validate_value(param, value)?;
        match param {
            ParamId::Hysteresis => self.hysteresis_db[i] = value,
            ParamId::TimeToTrigger => self.ttt_ms[i] = value as u32,
            ParamId::Cio => self.cio_db[i] = value,
            ParamId::TxPower => return Err(ParamError::UnknownTarget { param, target }),
        }
        Ok(())
    }
}
