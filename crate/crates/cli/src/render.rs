//! Human-readable reports and the JSON form of single runs.

use std::fmt::Write;
use std::io::IsTerminal;

use serde_json::{json, Value as Json};

use detpar_core::detlib;
use detpar_core::explorer::{
    replay, Determinism, ExplorationReport, Outcome, RunOutcome, RunResult, Trace, Verdict,
};
use detpar_core::lang::{Expr, Term, Value};
use detpar_core::minidet::ClosedVerdict;
use detpar_core::semantics::Store;

/// ANSI colouring, controlled by `MDL_COLOR` (`always`, `never`, or `auto`,
/// the default, which colours only when stdout is a terminal).
pub struct Style {
    color: bool,
}

impl Style {
    pub fn from_env() -> Style {
        let color = match std::env::var("MDL_COLOR").as_deref() {
            Ok("always" | "1") => true,
            Ok("never" | "0") => false,
            _ => std::io::stdout().is_terminal(),
        };
        Style { color }
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn good(&self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn bad(&self, s: &str) -> String {
        self.paint("31", s)
    }

    pub fn error(&self, msg: &str) -> String {
        format!("{} {msg}", self.paint("1;31", "error:"))
    }
}

fn shorten(s: &str, max: usize) -> String {
    let flat = s.split_whitespace().collect::<Vec<_>>().join(" ");
    match flat.char_indices().nth(max) {
        Some((cut, _)) => format!("{}…", &flat[..cut]),
        None => flat,
    }
}

fn value(v: &Value) -> String {
    shorten(&detlib::library().unlink(&Term::new(Expr::Val(v.clone()))).to_string(), 200)
}

fn term(e: &Term) -> String {
    shorten(&detlib::library().unlink(e).to_string(), 200)
}

fn store(s: &Store) -> String {
    shorten(&s.to_string(), 200)
}

fn outcome(o: &Outcome) -> String {
    match o {
        Outcome::Terminated { value: v, store: s, trace } => {
            format!("terminated: {} with {} after {} steps", value(v), store(s), trace.len())
        }
        Outcome::Stuck { config, trace } => format!(
            "stuck: {} with {} after {} steps",
            term(&config.expr),
            store(&config.store),
            trace.len()
        ),
        Outcome::Truncated { trace } => format!("truncated after {} steps", trace.len()),
    }
}

fn trace_lines(out: &mut String, program: &Term, role: &str, trace: &Trace) {
    let _ = writeln!(out, "  {role} schedule, {} steps:", trace.len());
    match replay(program, trace) {
        Ok(run) => {
            for t in &run.trace {
                let _ = writeln!(
                    out,
                    "    {:>4}  {:<24} {}",
                    t.step_index,
                    t.label.to_string(),
                    shorten(&t.redex_printed, 80)
                );
            }
        }
        Err(e) => {
            let _ = writeln!(out, "    (replay failed: {e})");
        }
    }
}

fn summary(out: &mut String, report: &ExplorationReport) {
    let _ = writeln!(
        out,
        "  {} states, {} transitions, {} memo hits, {:.2?}",
        report.states_explored, report.transitions, report.dedup_hits, report.elapsed
    );
    if let Some(limit) = report.limits_hit {
        let _ = writeln!(out, "  limit reached: {limit:?}");
    }
    for o in &report.outcomes {
        let _ = writeln!(out, "  {}", outcome(o));
    }
}

pub fn sisafety(
    name: &str,
    program: &Term,
    verdict: &Verdict,
    report: &ExplorationReport,
    style: &Style,
) -> String {
    let shown = match verdict {
        Verdict::Holds { .. } | Verdict::HoldsVacuously => style.good(verdict.name()),
        _ => style.bad(verdict.name()),
    };
    let mut out = format!("{name}: {shown}\n");
    summary(&mut out, report);
    match verdict {
        Verdict::Holds { witness } => {
            let _ = writeln!(out, "  terminating witness: {} steps", witness.len());
        }
        Verdict::Fails { terminating, stuck } => {
            trace_lines(&mut out, program, "terminating", terminating);
            trace_lines(&mut out, program, "stuck", stuck);
        }
        _ => {}
    }
    out.trim_end().to_string()
}

pub fn determinism(name: &str, program: &Term, d: &Determinism, code: u8, style: &Style) -> String {
    let shown = match code {
        0 => style.good("deterministic"),
        1 => style.bad("nondeterministic"),
        _ => style.bad("inconclusive"),
    };
    let mut out = format!("{name}: {shown}\n");
    summary(&mut out, &d.report);
    if let Some((a, b)) = &d.counterexample {
        trace_lines(&mut out, program, "first", a);
        trace_lines(&mut out, program, "second", b);
    }
    out.trim_end().to_string()
}

pub fn typecheck(name: &str, verdict: &ClosedVerdict, style: &Style) -> String {
    match verdict {
        ClosedVerdict::WellTyped(t) => format!("{name}: {} : {t}", style.good("well typed")),
        ClosedVerdict::Rejected(err) => {
            format!("{name}: {} {}: {err}", style.bad("rejected"), err.kind.name())
        }
    }
}

pub fn run(name: &str, r: &RunResult) -> String {
    let body = match &r.outcome {
        RunOutcome::Terminated { value: v, store: s } => {
            format!("terminated: {} with {}", value(v), store(s))
        }
        RunOutcome::Stuck { config } => {
            format!("stuck: {} with {}", term(&config.expr), store(&config.store))
        }
        RunOutcome::Truncated { config } => {
            format!("truncated: {} with {}", term(&config.expr), store(&config.store))
        }
    };
    format!("{name}: {body} after {} steps", r.trace.len())
}

pub fn run_json(name: &str, r: &RunResult) -> Json {
    let (value, expr, store) = match &r.outcome {
        RunOutcome::Terminated { value, store } => {
            (Some(Expr::Val(value.clone()).to_string()), None, store.to_string())
        }
        RunOutcome::Stuck { config } | RunOutcome::Truncated { config } => {
            (None, Some(config.expr.to_string()), config.store.to_string())
        }
    };
    json!({
        "program": name,
        "outcome": r.outcome.name(),
        "value": value,
        "expr": expr,
        "store": store,
        "steps": r.trace.len(),
    })
}
