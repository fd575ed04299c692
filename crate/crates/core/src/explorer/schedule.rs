//! Running one schedule: fixed policies, seeded random choice, and replay
//! of recorded step labels.


use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lang::{Expr, Term, Value};
use crate::semantics::{enabled_steps, notstuck, AllocPolicy, Config, Step, StepLabel, Store};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchedulePolicy {
    /// Always the first enabled task.
    Leftmost,
    /// Always the last enabled task.
    Rightmost,
    Random { seed: u64 },
    /// Exactly these steps, in order.
    Trace(Vec<StepLabel>),
}

/// One line of a trace file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step_index: usize,
    pub label: StepLabel,
    pub redex_printed: String,
    pub store_delta: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Terminated { value: Value, store: Store },
    Stuck { config: Config },
    /// The step bound was reached, or a replayed trace ended early.
    Truncated { config: Config },
}

impl RunOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            RunOutcome::Terminated { .. } => "terminated",
            RunOutcome::Stuck { .. } => "stuck",
            RunOutcome::Truncated { .. } => "truncated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: RunOutcome,
    pub trace: Vec<TraceEntry>,
}

impl RunResult {
    pub fn labels(&self) -> Vec<StepLabel> {
        self.trace.iter().map(|t| t.label.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("replay failed at step {index}: {label} is not enabled (enabled: {enabled})")]
pub struct ReplayError {
    pub index: usize,
    pub label: StepLabel,
    pub enabled: String,
}

#[derive(Debug, thiserror::Error)]
#[error("trace line {line}: {source}")]
pub struct TraceParseError {
    pub line: usize,
    #[source]
    pub source: serde_json::Error,
}

fn entry(index: usize, step: &Step) -> TraceEntry {
    TraceEntry {
        step_index: index,
        label: step.label.clone(),
        redex_printed: step.redex.to_string(),
        store_delta: step.delta.to_json(),
    }
}

/// Runs `e` from the empty store, choosing one enabled step at a time, until
/// it terminates, gets stuck, or `max_steps` steps have been taken.
pub fn run_schedule(
    e: &Term,
    policy: &SchedulePolicy,
    max_steps: usize,
    alloc: AllocPolicy,
) -> Result<RunResult, ReplayError> {
    let mut rng = match policy {
        SchedulePolicy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut config = Config::initial(e.clone(), alloc);
    let mut trace = Vec::new();
    let bound = match policy {
        SchedulePolicy::Trace(labels) => labels.len().min(max_steps),
        _ => max_steps,
    };
    loop {
        if let Expr::Val(v) = &*config.expr {
            let outcome = RunOutcome::Terminated { value: v.clone(), store: config.store };
            return Ok(RunResult { outcome, trace });
        }
        let replaying = matches!(policy, SchedulePolicy::Trace(_));
        if !replaying && !notstuck(&config.expr, &config.store) {
            return Ok(RunResult { outcome: RunOutcome::Stuck { config }, trace });
        }
        if trace.len() >= bound {
            let outcome = if notstuck(&config.expr, &config.store) {
                RunOutcome::Truncated { config }
            } else {
                RunOutcome::Stuck { config }
            };
            return Ok(RunResult { outcome, trace });
        }
        let mut steps = enabled_steps(&config);
        let index = trace.len();
        let pick = match policy {
            SchedulePolicy::Leftmost => 0,
            SchedulePolicy::Rightmost => steps.len() - 1,
            SchedulePolicy::Random { .. } => {
                rng.as_mut().expect("seeded").gen_range(0..steps.len())
            }
            SchedulePolicy::Trace(labels) => {
                let want = &labels[index];
                steps.iter().position(|s| &s.label == want).ok_or_else(|| ReplayError {
                    index,
                    label: want.clone(),
                    enabled: steps
                        .iter()
                        .map(|s| s.label.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                })?
            }
        };
        let step = steps.swap_remove(pick);
        trace.push(entry(index, &step));
        config = step.next;
    }
}

/// Re-executes a recorded schedule.
pub fn replay(e: &Term, labels: &[StepLabel]) -> Result<RunResult, ReplayError> {
    run_schedule(e, &SchedulePolicy::Trace(labels.to_vec()), usize::MAX, AllocPolicy::Lowest)
}

pub fn trace_to_jsonl(trace: &[TraceEntry]) -> String {
    let mut out = String::new();
    for t in trace {
        out.push_str(&serde_json::to_string(t).expect("trace entries serialize"));
        out.push('\n');
    }
    out
}

/// Reads the labels of a JSON-lines trace. Blank lines are ignored.
pub fn parse_trace_jsonl(text: &str) -> Result<Vec<StepLabel>, TraceParseError> {
    #[derive(Deserialize)]
    struct Line {
        label: StepLabel,
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            serde_json::from_str::<Line>(l)
                .map(|line| line.label)
                .map_err(|source| TraceParseError { line: k + 1, source })
        })
        .collect()
}
