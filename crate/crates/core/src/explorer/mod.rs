//! Exhaustive interleaving exploration: decides safety and
//! schedule-independent safety of small programs, checks that all
//! terminating schedules agree, and runs or replays single schedules.
//!
//! Exploration is breadth-first and level-synchronous. Each level's states
//! are expanded independently (optionally on a thread pool) and merged into
//! the memo table in frontier order, so reports do not depend on the number
//! of workers and witnesses are shortest traces.

pub mod canonical;
mod report;
mod schedule;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lang::{decompose_tasks, Expr, Term, Value};
use crate::semantics::{enabled_steps, notstuck, reducible, AllocPolicy, Config, StepLabel, Store};

pub use canonical::{canonical_result, canonicalize};
pub use report::{exploration_json, outcome_json, verdict_json};
pub use schedule::{
    parse_trace_jsonl, replay, run_schedule, trace_to_jsonl, ReplayError, RunOutcome, RunResult,
    SchedulePolicy, TraceEntry, TraceParseError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Longest schedule explored, in steps.
    pub max_steps: usize,
    /// Distinct configurations kept in the memo table.
    pub max_states: usize,
    /// Distinct terminal outcomes (terminated or stuck).
    pub max_outcomes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 100_000, max_states: 1_000_000, max_outcomes: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    Steps,
    States,
    Outcomes,
}

/// What the explorer remembers to avoid revisiting configurations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MemoMode {
    /// Configurations up to location renaming and garbage.
    #[default]
    Canonical,
    /// Exact configurations, as produced by the transition function.
    Exact,
    /// No memoization: the full schedule tree. Only for small acyclic
    /// programs.
    Off,
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub limits: Limits,
    pub memo: MemoMode,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
    pub alloc: AllocPolicy,
    /// Cross-check reducibility against the transition function at every
    /// expanded configuration.
    pub check_invariants: bool,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            limits: Limits::default(),
            memo: MemoMode::Canonical,
            jobs: 1,
            alloc: AllocPolicy::Lowest,
            check_invariants: false,
        }
    }
}

pub type Trace = Vec<StepLabel>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A value with the canonical store reachable from it.
    Terminated { value: Value, store: Store, trace: Trace },
    /// A configuration that is neither a value nor reducible (canonical).
    Stuck { config: Config, trace: Trace },
    /// The step bound was reached on this schedule.
    Truncated { trace: Trace },
}

impl Outcome {
    pub fn trace(&self) -> &Trace {
        match self {
            Outcome::Terminated { trace, .. }
            | Outcome::Stuck { trace, .. }
            | Outcome::Truncated { trace } => trace,
        }
    }
}

/// Results of the reducibility cross-check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantStats {
    pub checked: usize,
    /// Configurations where `reducible` disagrees with "some step is
    /// enabled".
    pub some_step_mismatches: Vec<String>,
    /// Configurations where `reducible` disagrees with "every task can
    /// step".
    pub every_task_mismatches: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ExplorationReport {
    /// Terminal outcomes in discovery order, deduplicated canonically.
    pub outcomes: Vec<Outcome>,
    pub states_explored: usize,
    pub transitions: usize,
    pub dedup_hits: usize,
    pub limits_hit: Option<LimitKind>,
    pub invariants: InvariantStats,
    pub elapsed: Duration,
}

impl ExplorationReport {
    pub fn terminated(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| matches!(o, Outcome::Terminated { .. }))
    }

    pub fn stuck(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| matches!(o, Outcome::Stuck { .. }))
    }

    pub fn is_exhaustive(&self) -> bool {
        self.limits_hit.is_none()
    }

    /// The canonical results of all terminated outcomes.
    pub fn results(&self) -> Vec<(Value, Store)> {
        self.outcomes
            .iter()
            .filter_map(|o| match o {
                Outcome::Terminated { value, store, .. } => Some((value.clone(), store.clone())),
                _ => None,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds { witness: Trace },
    /// No schedule reaches a value.
    HoldsVacuously,
    Fails { terminating: Trace, stuck: Trace },
    Inconclusive { limit: LimitKind },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds { .. } => "Holds",
            Verdict::HoldsVacuously => "HoldsVacuously",
            Verdict::Fails { .. } => "Fails",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Holds { .. } | Verdict::HoldsVacuously => 0,
            Verdict::Fails { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }

    /// A terminating and a stuck schedule refute the property even when the
    /// exploration was cut short.
    pub fn from_report(r: &ExplorationReport) -> Verdict {
        let term = r.terminated().next();
        let stuck = r.stuck().next();
        match (term, stuck, r.limits_hit) {
            (Some(t), Some(s), _) => Verdict::Fails {
                terminating: t.trace().clone(),
                stuck: s.trace().clone(),
            },
            (_, _, Some(limit)) => Verdict::Inconclusive { limit },
            (Some(t), None, None) => Verdict::Holds { witness: t.trace().clone() },
            (None, _, None) => Verdict::HoldsVacuously,
        }
    }
}

struct Node {
    config: Config,
    parent: Option<(usize, StepLabel)>,
    depth: usize,
}

enum Expansion {
    Value((Value, Store)),
    Stuck(Config),
    Live(Vec<(StepLabel, Config)>),
    /// Live, but at the step bound.
    Cut,
}

struct Expanded {
    expansion: Expansion,
    some_step_mismatch: Option<String>,
    every_task_mismatch: Option<String>,
}

fn key_of(c: Config, memo: MemoMode) -> Config {
    match memo {
        MemoMode::Canonical => canonicalize(&c),
        MemoMode::Exact | MemoMode::Off => c,
    }
}

fn describe(c: &Config) -> String {
    format!("{} / {}", c.expr, c.store)
}

fn expand(c: &Config, at_bound: bool, opts: &ExploreOptions) -> Expanded {
    let mut out = Expanded { expansion: Expansion::Cut, some_step_mismatch: None, every_task_mismatch: None };
    if let Expr::Val(v) = &*c.expr {
        out.expansion = Expansion::Value(canonical_result(v, &c.store));
        return out;
    }
    let live = notstuck(&c.expr, &c.store);
    if opts.check_invariants || live && !at_bound {
        let steps = enabled_steps(c);
        if opts.check_invariants {
            let red = reducible(&c.expr, &c.store);
            if red == steps.is_empty() {
                out.some_step_mismatch = Some(describe(c));
            }
            let every = steps.len() == decompose_tasks(&c.expr).len();
            if red != every {
                out.every_task_mismatch = Some(describe(c));
            }
        }
        if live && !at_bound {
            let succs =
                steps.into_iter().map(|s| (s.label, key_of(s.next, opts.memo))).collect();
            out.expansion = Expansion::Live(succs);
            return out;
        }
    }
    if !live {
        out.expansion = Expansion::Stuck(canonicalize(c));
    }
    out
}

fn trace_to(nodes: &[Node], mut id: usize) -> Trace {
    let mut labels = Vec::new();
    while let Some((parent, label)) = &nodes[id].parent {
        labels.push(label.clone());
        id = *parent;
    }
    labels.reverse();
    labels
}

/// Explores every interleaving of `e` from the empty store.
pub fn explore_all(e: &Term, opts: &ExploreOptions) -> ExplorationReport {
    let started = Instant::now();
    let limits = opts.limits;
    let pool = (opts.jobs > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .expect("thread pool")
    });

    let start = key_of(Config::initial(e.clone(), opts.alloc), opts.memo);
    let mut memo: HashMap<Config, usize> = HashMap::new();
    if opts.memo != MemoMode::Off {
        memo.insert(start.clone(), 0);
    }
    let mut nodes = vec![Node { config: start, parent: None, depth: 0 }];
    let mut frontier = vec![0usize];

    let mut outcomes = Vec::new();
    let mut seen_results: HashSet<(Value, Store)> = HashSet::new();
    let mut seen_stuck: HashSet<Config> = HashSet::new();
    let mut truncated = false;
    let mut limits_hit = None;
    let (mut transitions, mut dedup_hits) = (0, 0);
    let mut invariants = InvariantStats::default();

    'levels: while !frontier.is_empty() {
        let work = |id: &usize| {
            let n = &nodes[*id];
            expand(&n.config, n.depth >= limits.max_steps, opts)
        };
        let expanded: Vec<Expanded> = match &pool {
            Some(pool) => pool.install(|| frontier.par_iter().map(work).collect()),
            None => frontier.iter().map(work).collect(),
        };

        let mut next = Vec::new();
        for (id, ex) in frontier.iter().copied().zip(expanded) {
            if opts.check_invariants {
                invariants.checked += usize::from(!nodes[id].config.is_value());
                invariants.some_step_mismatches.extend(ex.some_step_mismatch);
                invariants.every_task_mismatches.extend(ex.every_task_mismatch);
            }
            match ex.expansion {
                Expansion::Value(result) => {
                    if seen_results.insert(result.clone()) {
                        let (value, store) = result;
                        outcomes.push(Outcome::Terminated { value, store, trace: trace_to(&nodes, id) });
                    }
                }
                Expansion::Stuck(config) => {
                    if seen_stuck.insert(config.clone()) {
                        outcomes.push(Outcome::Stuck { config, trace: trace_to(&nodes, id) });
                    }
                }
                Expansion::Cut => {
                    limits_hit.get_or_insert(LimitKind::Steps);
                    if !truncated {
                        truncated = true;
                        outcomes.push(Outcome::Truncated { trace: trace_to(&nodes, id) });
                    }
                }
                Expansion::Live(succs) => {
                    let depth = nodes[id].depth + 1;
                    for (label, config) in succs {
                        transitions += 1;
                        if opts.memo != MemoMode::Off && memo.contains_key(&config) {
                            dedup_hits += 1;
                            continue;
                        }
                        if nodes.len() >= limits.max_states {
                            limits_hit = Some(LimitKind::States);
                            break 'levels;
                        }
                        let new_id = nodes.len();
                        if opts.memo != MemoMode::Off {
                            memo.insert(config.clone(), new_id);
                        }
                        nodes.push(Node { config, parent: Some((id, label)), depth });
                        next.push(new_id);
                    }
                }
            }
            if seen_results.len() + seen_stuck.len() > limits.max_outcomes {
                limits_hit = Some(LimitKind::Outcomes);
                break 'levels;
            }
        }
        frontier = next;
    }

    ExplorationReport {
        outcomes,
        states_explored: nodes.len(),
        transitions,
        dedup_hits,
        limits_hit,
        invariants,
        elapsed: started.elapsed(),
    }
}

/// Schedule-independent safety: if some schedule reaches a value, no
/// schedule gets stuck.
pub fn check_sisafety(e: &Term, opts: &ExploreOptions) -> (Verdict, ExplorationReport) {
    let report = explore_all(e, opts);
    (Verdict::from_report(&report), report)
}

#[derive(Clone, Debug)]
pub struct Determinism {
    /// All terminating schedules reach the same canonical result.
    pub deterministic: bool,
    /// Two terminating schedules with different results, when not.
    pub counterexample: Option<(Trace, Trace)>,
    pub report: ExplorationReport,
}

pub fn check_outcome_determinism(e: &Term, opts: &ExploreOptions) -> Determinism {
    let report = explore_all(e, opts);
    let terms: Vec<_> = report.terminated().take(2).collect();
    let counterexample = match terms[..] {
        [a, b] => Some((a.trace().clone(), b.trace().clone())),
        _ => None,
    };
    Determinism { deterministic: counterexample.is_none(), counterexample, report }
}
