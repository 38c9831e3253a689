//! xNIB: the append-only ledger of xApp parameter operations.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::RicError;
use crate::sim::{ParamId, Target, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Applied,
    BlockedByPriority,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub tick: Tick,
    pub xapp_id: String,
    pub target: Target,
    pub param_id: ParamId,
    pub old_value: f64,
    pub new_value: f64,
    pub outcome: Outcome,
}

/// Optional record filter; unset fields match everything.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryFilter {
    pub xapp_id: Option<String>,
    pub param_id: Option<ParamId>,
    pub target: Option<Target>,
}

impl QueryFilter {
    pub fn matches(&self, r: &ActionRecord) -> bool {
        self.xapp_id.as_deref().is_none_or(|x| x == r.xapp_id)
            && self.param_id.is_none_or(|p| p == r.param_id)
            && self.target.is_none_or(|t| t == r.target)
    }
}

/// Single-writer ledger. Readers get shared slices of the committed prefix.
#[derive(Debug, Clone, Default)]
pub struct Xnib {
    records: Vec<ActionRecord>,
}

impl Xnib {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record. Ticks must be non-decreasing in ledger order.
    pub fn append(&mut self, record: ActionRecord) -> Result<(), RicError> {
        if let Some(last) = self.records.last() {
            if record.tick < last.tick {
                return Err(RicError::NonMonotonicTick {
                    last: last.tick,
                    got: record.tick,
                });
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[ActionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records with `tick_a <= tick <= tick_b` that pass `filter`, in ledger order.
    pub fn query(
        &self,
        tick_a: Tick,
        tick_b: Tick,
        filter: &QueryFilter,
    ) -> Result<Vec<&ActionRecord>, RicError> {
        if tick_a > tick_b {
            return Err(RicError::InvalidWindow { tick_a, tick_b });
        }
        Ok(self
            .window(tick_a, tick_b)
            .iter()
            .filter(|r| filter.matches(r))
            .collect())
    }

    /// Contiguous slice of records with ticks in `[tick_a, tick_b]`.
    pub fn window(&self, tick_a: Tick, tick_b: Tick) -> &[ActionRecord] {
        // Ticks are sorted, so both bounds are binary searches.
        let lo = self.records.partition_point(|r| r.tick < tick_a);
        let hi = self.records.partition_point(|r| r.tick <= tick_b);
        &self.records[lo..hi.max(lo)]
    }

    /// JSON-lines export, one record per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(tick: Tick, xapp: &str, param: ParamId) -> ActionRecord {
        ActionRecord {
            tick,
            xapp_id: xapp.into(),
            target: Target::Cell(1),
            param_id: param,
            old_value: 3.0,
            new_value: 4.0,
            outcome: Outcome::Applied,
        }
    }

    #[test]
    fn empty_ledger_query_is_empty() {
        let x = Xnib::new();
        assert!(x.query(0, 100, &QueryFilter::default()).unwrap().is_empty());
    }

    #[test]
    fn window_covering_one_change() {
        let mut x = Xnib::new();
        x.append(rec(10, "mlb", ParamId::Cio)).unwrap();
        x.append(rec(20, "mro", ParamId::Hysteresis)).unwrap();
        x.append(rec(30, "mlb", ParamId::Cio)).unwrap();
        let got = x.query(15, 25, &QueryFilter::default()).unwrap();
        assert_eq!(got, vec![&x.records()[1]]);
        let f = QueryFilter {
            xapp_id: Some("mlb".into()),
            ..Default::default()
        };
        assert_eq!(x.query(0, 100, &f).unwrap().len(), 2);
    }

    #[test]
    fn rejects_out_of_order_and_bad_window() {
        let mut x = Xnib::new();
        x.append(rec(10, "a", ParamId::Cio)).unwrap();
        assert!(x.append(rec(9, "a", ParamId::Cio)).is_err());
        assert_eq!(x.len(), 1);
        assert!(x.query(5, 4, &QueryFilter::default()).is_err());
    }

    #[test]
    fn jsonl_field_names() {
        let mut x = Xnib::new();
        x.append(rec(10, "mro", ParamId::Hysteresis)).unwrap();
        let mut buf = Vec::new();
        x.write_jsonl(&mut buf).unwrap();
        let line = String::from_utf8(buf).unwrap();
        assert_eq!(
            line,
            "{\"tick\":10,\"xapp_id\":\"mro\",\"target\":{\"cell\":1},\"param_id\":\"H\",\
             \"old_value\":3.0,\"new_value\":4.0,\"outcome\":\"Applied\"}\n"
        );
    }
}
