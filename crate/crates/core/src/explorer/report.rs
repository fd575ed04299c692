//! JSON renderings of exploration results. Everything except the `timing`
//! object is a deterministic function of the program and the limits.


use serde_json::{json, Value as Json};

use super::{replay, trace_to_jsonl, ExplorationReport, Outcome, Trace, Verdict};
use crate::lang::{Expr, Term};

pub fn outcome_json(o: &Outcome) -> Json {
    match o {
        Outcome::Terminated { value, store, trace } => json!({
            "kind": "terminated",
            "value": Expr::Val(value.clone()).to_string(),
            "store": store.to_string(),
            "trace_length": trace.len(),
        }),
        Outcome::Stuck { config, trace } => json!({
            "kind": "stuck",
            "expr": config.expr.to_string(),
            "store": config.store.to_string(),
            "trace_length": trace.len(),
        }),
        Outcome::Truncated { trace } => json!({
            "kind": "truncated",
            "trace_length": trace.len(),
        }),
    }
}

/// Replays a witness to recover printed redexes and store effects.
fn witness_json(program: &Term, role: &str, trace: &Trace) -> Json {
    let steps: Json = match replay(program, trace) {
        Ok(run) => trace_to_jsonl(&run.trace)
            .lines()
            .map(|l| serde_json::from_str::<Json>(l).expect("valid json line"))
            .collect(),
        Err(e) => json!({ "replay_error": e.to_string() }),
    };
    json!({ "role": role, "steps": steps })
}

pub fn verdict_json(v: &Verdict) -> Json {
    match v {
        Verdict::Inconclusive { limit } => json!({ "kind": v.name(), "limit": limit }),
        _ => json!({ "kind": v.name() }),
    }
}

pub fn exploration_json(
    name: &str,
    program: &Term,
    verdict: &Verdict,
    report: &ExplorationReport,
    timing: bool,
) -> Json {
    let witnesses: Vec<Json> = match verdict {
        Verdict::Holds { witness } => vec![witness_json(program, "terminating", witness)],
        Verdict::Fails { terminating, stuck } => vec![
            witness_json(program, "terminating", terminating),
            witness_json(program, "stuck", stuck),
        ],
        Verdict::HoldsVacuously | Verdict::Inconclusive { .. } => vec![],
    };
    let mut out = json!({
        "program": name,
        "verdict": verdict_json(verdict),
        "states_explored": report.states_explored,
        "transitions": report.transitions,
        "dedup_hits": report.dedup_hits,
        "outcomes": report.outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
        "witness_traces": witnesses,
        "limits_hit": report.limits_hit,
    });
    if timing {
        out["timing"] = json!({ "elapsed_ms": report.elapsed.as_secs_f64() * 1000.0 });
    }
    out
}
