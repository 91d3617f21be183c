//! JSON run reports. Rationals are written as exact `p/q` strings.

use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::attack::AttackReport;
use crate::model::Solution;
use crate::network::{ArcId, Flow, Network};
use crate::rational::Rational;

#[derive(Debug, Clone, Serialize)]
pub struct FlowEntry {
    pub arc: ArcId,
    pub value: Rational,
}

pub fn flow_entries(flow: &Flow) -> Vec<FlowEntry> {
    flow.iter().map(|(arc, v)| FlowEntry { arc, value: v.clone() }).collect()
}

/// Phase name and elapsed time, in report order.
#[derive(Debug, Clone, Default)]
pub struct Timings(Vec<(&'static str, Duration)>);

impl Timings {
    pub fn push(&mut self, phase: &'static str, d: Duration) {
        self.0.push((phase, d));
    }

    fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .0
            .iter()
            .map(|(k, d)| (k.to_string(), json!(d.as_secs_f64() * 1e3)))
            .collect();
        Value::Object(map)
    }
}

fn approx(r: &Rational) -> Value {
    json!(r.to_f64())
}

pub fn solve_report(
    net: &Network,
    k: usize,
    sol: &Solution,
    timings: &Timings,
    with_float: bool,
) -> Value {
    let mut doc = json!({
        "command": "solve",
        "mode": sol.mode,
        "n": net.vertex_count(),
        "m": net.arc_count(),
        "k": k,
        "scenarios": sol.scenarios,
        "variables": sol.variables,
        "fstar": sol.fstar,
        "theta": sol.theta,
        "loss": sol.loss,
        "flow": flow_entries(&sol.flow),
        "worst_attack": sol.worst_attack,
        "certified": sol.certified,
        "certification_note": sol.certification_note,
        "lp": {
            "phase1_pivots": sol.lp_stats.phase1_pivots,
            "phase2_pivots": sol.lp_stats.phase2_pivots,
            "degenerate_pivots": sol.lp_stats.degenerate_pivots,
            "rows": sol.lp_stats.rows,
            "columns": sol.lp_stats.columns,
        },
        "timings_ms": timings.to_json(),
    });
    if with_float {
        doc["approx"] = json!({
            "fstar": approx(&sol.fstar),
            "theta": approx(&sol.theta),
            "loss": approx(&sol.loss),
            "flow": sol.flow.values().iter().map(approx).collect::<Vec<_>>(),
        });
    }
    doc
}

pub fn attack_report(
    net: &Network,
    k: usize,
    report: &AttackReport,
    timings: &Timings,
    with_float: bool,
) -> Value {
    let mut doc = json!({
        "command": "attack",
        "n": net.vertex_count(),
        "m": net.arc_count(),
        "k": k,
        "attacked_flow_value": report.attacked_flow_value,
        "worst_attack": report.worst_attack,
        "residual": report.residual,
        "loss": report.loss,
        "subsets_evaluated": report.subsets_evaluated,
        "timings_ms": timings.to_json(),
    });
    if with_float {
        doc["approx"] = json!({
            "attacked_flow_value": approx(&report.attacked_flow_value),
            "residual": approx(&report.residual),
            "loss": approx(&report.loss),
        });
    }
    doc
}

/// `lambda` and `theta` are `None` when the maximum flow value is zero.
pub fn oracle_report(
    net: &Network,
    fstar: &Rational,
    lambda: Option<&Rational>,
    tolerance: &Rational,
    timings: &Timings,
    with_float: bool,
) -> Value {
    let theta = lambda.map(|l| fstar - l);
    let mut doc = json!({
        "command": "oracle-k1",
        "n": net.vertex_count(),
        "m": net.arc_count(),
        "fstar": fstar,
        "lambda": lambda,
        "theta": theta,
        "tolerance": tolerance,
        "skipped": lambda.is_none(),
        "timings_ms": timings.to_json(),
    });
    if with_float {
        doc["approx"] = json!({
            "fstar": approx(fstar),
            "lambda": lambda.map(approx),
            "theta": theta.as_ref().map(approx),
        });
    }
    doc
}

pub fn error_report(command: &str, code: i32, message: &str) -> Value {
    json!({ "command": command, "error": message, "exit_code": code })
}
