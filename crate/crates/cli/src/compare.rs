use std::collections::BTreeMap;
use std::path::Path;

use ricsim_core::export::{ExportError, Summary, SUMMARY_JSON};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Serialize)]
struct Row {
    a: f64,
    b: f64,
    /// b / a; equal values give 1 (zeros included), a zero `a` otherwise none.
    ratio: Option<f64>,
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    if a == b {
        Some(1.0)
    } else if a == 0.0 {
        None
    } else {
        Some(b / a)
    }
}

fn rows(a: &Summary, b: &Summary) -> BTreeMap<&'static str, Row> {
    let pick = |s: &Summary| {
        let t = &s.totals;
        [
            ("mean_load", t.mean_load),
            ("call_blocks", t.call_blocks as f64),
            ("rlf_count", t.rlf_count as f64),
            ("ho_count", t.ho_count as f64),
            ("pingpong_count", t.pingpong_count as f64),
            ("late_load_std", t.late_load_std),
            ("reward", s.reward),
        ]
    };
    pick(a)
        .into_iter()
        .zip(pick(b))
        .map(|((k, x), (_, y))| {
            (
                k,
                Row {
                    a: x,
                    b: y,
                    ratio: ratio(x, y),
                },
            )
        })
        .collect()
}

fn load(dir: &Path) -> Result<Summary, CliError> {
    let path = dir.join(SUMMARY_JSON);
    if !path.is_file() {
        return Err(CliError::MissingArtifact(path.display().to_string()));
    }
    Summary::load(&path).map_err(|e| match e {
        ExportError::Io { .. } => CliError::Io(e.to_string()),
        _ => CliError::MissingArtifact(e.to_string()),
    })
}

pub fn cmd_compare(a: &Path, b: &Path, json: bool) -> Result<(), CliError> {
    let (sa, sb) = (load(a)?, load(b)?);
    let table = rows(&sa, &sb);
    if json {
        let out = serde_json::json!({
            "a": a.display().to_string(),
            "b": b.display().to_string(),
            "kpis": table,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("plain data serializes"));
        return Ok(());
    }
    println!("{:<16} {:>14} {:>14} {:>10}", "kpi", sa.scenario, sb.scenario, "b/a");
    for (k, r) in &table {
        let ratio = r.ratio.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"));
        println!("{k:<16} {:>14.4} {:>14.4} {ratio:>10}", r.a, r.b);
    }
    Ok(())
}
