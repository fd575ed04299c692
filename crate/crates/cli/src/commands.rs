use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};

use detpar_core::detlib::{self, DetlibError, TypecheckExpectation};
use detpar_core::explorer::{
    check_outcome_determinism, check_sisafety, exploration_json, parse_trace_jsonl, replay,
    run_schedule, trace_to_jsonl, ExploreOptions, Limits, Outcome, ReplayError, RunResult,
    SchedulePolicy, TraceParseError, Verdict,
};
use detpar_core::lang::{Expr, Term};
use detpar_core::minidet::{check_program, ClosedVerdict};
use detpar_core::semantics::{AllocPolicy, StepLabel};
use detpar_core::surface::{self, SourceProgram};

use crate::args::{Cli, Command, ExploreFlags, Format, Input, Policy};
use crate::render::{self, Style};

pub const INTERNAL_ERROR: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Already rendered with the source line.
    #[error("{0}")]
    Parse(String),
    #[error("{name}: {source}")]
    Link {
        name: String,
        #[source]
        source: DetlibError,
    },
    #[error("{}: {source}", path.display())]
    Trace {
        path: PathBuf,
        #[source]
        source: TraceParseError,
    },
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

pub fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    let style = Style::from_env();
    match &cli.command {
        Command::Run { input, policy, seed, trace, limits_steps, trace_out, format } => {
            let (name, e) = load(input)?;
            let policy = match policy {
                Policy::Leftmost => SchedulePolicy::Leftmost,
                Policy::Rightmost => SchedulePolicy::Rightmost,
                Policy::Random => SchedulePolicy::Random { seed: seed.expect("required by clap") },
                Policy::Trace => {
                    SchedulePolicy::Trace(read_trace(trace.as_ref().expect("required by clap"))?)
                }
            };
            let run = run_schedule(&e, &policy, *limits_steps, AllocPolicy::Lowest)?;
            finish_run(&name, &run, trace_out.as_deref(), *format)
        }
        Command::Replay { input, trace, trace_out, format } => {
            let (name, e) = load(input)?;
            let run = replay(&e, &read_trace(trace)?)?;
            finish_run(&name, &run, trace_out.as_deref(), *format)
        }
        Command::Typecheck { input, format } => {
            let (name, e) = load(input)?;
            let verdict = check_program(&e);
            match format {
                Format::Json => {
                    let mut out = verdict.to_json();
                    out["program"] = json!(name);
                    println!("{out:#}");
                }
                Format::Human => println!("{}", render::typecheck(&name, &verdict, &style)),
            }
            Ok(u8::from(!verdict.is_well_typed()))
        }
        Command::Explore { input, explore } => {
            let (name, e) = load(input)?;
            let d = check_outcome_determinism(&e, &options(explore));
            let verdict = Verdict::from_report(&d.report);
            let code = match (&d.counterexample, d.report.limits_hit) {
                (Some(_), _) => 1,
                (None, Some(_)) => 2,
                (None, None) => 0,
            };
            match explore.format {
                Format::Json => {
                    let mut out = exploration_json(&name, &e, &verdict, &d.report, false);
                    out["deterministic"] = json!(d.counterexample.is_none() && code == 0);
                    out["counterexample"] = match &d.counterexample {
                        Some((a, b)) => json!([labels_json(a), labels_json(b)]),
                        None => Json::Null,
                    };
                    println!("{out:#}");
                }
                Format::Human => {
                    println!("{}", render::determinism(&name, &e, &d, code, &style))
                }
            }
            Ok(code)
        }
        Command::Sisafe { input, explore, trace_out } => {
            let (name, e) = load(input)?;
            let (verdict, report) = check_sisafety(&e, &options(explore));
            if let Some(path) = trace_out {
                match &verdict {
                    Verdict::Holds { witness } => write_trace(path, &e, witness)?,
                    Verdict::Fails { terminating, stuck } => {
                        write_trace(path, &e, stuck)?;
                        let mut other = path.clone().into_os_string();
                        other.push(".terminating");
                        write_trace(Path::new(&other), &e, terminating)?;
                    }
                    _ => {}
                }
            }
            match explore.format {
                Format::Json => {
                    println!("{:#}", exploration_json(&name, &e, &verdict, &report, false))
                }
                Format::Human => println!("{}", render::sisafety(&name, &e, &verdict, &report, &style)),
            }
            Ok(verdict.exit_code() as u8)
        }
        Command::Corpus { explore } => corpus(explore, &style),
    }
}

fn options(f: &ExploreFlags) -> ExploreOptions {
    ExploreOptions {
        limits: Limits {
            max_states: f.limits_states,
            max_steps: f.limits_steps,
            ..Limits::default()
        },
        jobs: f.jobs,
        ..ExploreOptions::default()
    }
}

/// Reads, parses, parameterizes, and links a program.
fn load(input: &Input) -> Result<(String, Term), CliError> {
    let name = input.path.display().to_string();
    let text = match fs::read_to_string(&input.path) {
        Ok(text) => text,
        Err(source) => {
            let embedded = input
                .path
                .to_str()
                .filter(|s| !s.contains('/'))
                .and_then(|s| detlib::source(s).ok());
            match embedded {
                Some(text) => text.to_string(),
                None => return Err(CliError::Io { path: input.path.clone(), source }),
            }
        }
    };
    let src = SourceProgram::new(name.clone(), text);
    let e = surface::parse(&src).map_err(|err| CliError::Parse(err.render(&src)))?;
    let e = detlib::link_closed(&detlib::apply_arg(e, input.arg))
        .map_err(|source| CliError::Link { name: name.clone(), source })?;
    Ok((name, e))
}

fn read_trace(path: &Path) -> Result<Vec<StepLabel>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_trace_jsonl(&text).map_err(|source| CliError::Trace { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes a witness as a full trace file by replaying it.
fn write_trace(path: &Path, e: &Term, labels: &[StepLabel]) -> Result<(), CliError> {
    let run = replay(e, labels)?;
    write_file(path, &trace_to_jsonl(&run.trace))
}

fn labels_json(labels: &[StepLabel]) -> Json {
    json!(labels.iter().map(|l| l.to_string()).collect::<Vec<_>>())
}

fn finish_run(
    name: &str,
    run: &RunResult,
    trace_out: Option<&Path>,
    format: Format,
) -> Result<u8, CliError> {
    if let Some(path) = trace_out {
        write_file(path, &trace_to_jsonl(&run.trace))?;
    }
    match format {
        Format::Json => println!("{:#}", render::run_json(name, run)),
        Format::Human => println!("{}", render::run(name, run)),
    }
    Ok(match run.outcome.name() {
        "terminated" => 0,
        "stuck" => 1,
        _ => 2,
    })
}

/// One manifest entry compared with what the tools compute.
struct Row {
    name: String,
    checks: Vec<(&'static str, String, String)>,
}

impl Row {
    fn ok(&self) -> bool {
        self.checks.iter().all(|(_, want, got)| want == got)
    }
}

fn corpus(flags: &ExploreFlags, style: &Style) -> Result<u8, CliError> {
    let opts = options(flags);
    let mut rows = Vec::new();
    for p in &detlib::manifest().program {
        let e = detlib::load_program(&p.file, p.arg)
            .map_err(|source| CliError::Link { name: p.name.clone(), source })?;
        let mut checks = Vec::new();

        let want = match p.typecheck {
            TypecheckExpectation::WellTyped => {
                format!("WellTyped {}", p.ty.as_deref().unwrap_or("_"))
            }
            TypecheckExpectation::Rejected => {
                format!("Rejected {}", p.error.as_deref().unwrap_or("_"))
            }
        };
        let got = match check_program(&e) {
            ClosedVerdict::WellTyped(t) if p.ty.is_some() => format!("WellTyped {t}"),
            ClosedVerdict::WellTyped(_) => "WellTyped _".to_string(),
            ClosedVerdict::Rejected(err) if p.error.is_some() => {
                format!("Rejected {}", err.kind.name())
            }
            ClosedVerdict::Rejected(_) => "Rejected _".to_string(),
        };
        checks.push(("typecheck", want, got));

        let (verdict, report) = check_sisafety(&e, &opts);
        checks.push(("sisafety", p.sisafety.clone(), verdict.name().to_string()));
        if let Some(result) = &p.result {
            let got: Vec<String> = report
                .outcomes
                .iter()
                .filter_map(|o| match o {
                    Outcome::Terminated { value, .. } => Some(Expr::Val(value.clone()).to_string()),
                    _ => None,
                })
                .collect();
            checks.push(("result", result.clone(), got.join(" | ")));
        }
        rows.push(Row { name: p.name.clone(), checks });
    }

    let all_ok = rows.iter().all(Row::ok);
    match flags.format {
        Format::Json => {
            let entries: Vec<Json> = rows
                .iter()
                .map(|r| {
                    let checks: Vec<Json> = r
                        .checks
                        .iter()
                        .map(|(what, want, got)| {
                            json!({ "check": what, "expected": want, "actual": got, "ok": want == got })
                        })
                        .collect();
                    json!({ "program": r.name, "ok": r.ok(), "checks": checks })
                })
                .collect();
            println!("{:#}", json!({ "ok": all_ok, "programs": entries }));
        }
        Format::Human => {
            for r in &rows {
                let mark = if r.ok() { style.good("ok") } else { style.bad("MISMATCH") };
                println!("{mark} {}", r.name);
                for (what, want, got) in &r.checks {
                    if want == got {
                        println!("    {what}: {got}");
                    } else {
                        println!("    {what}: expected {want}, got {got}");
                    }
                }
            }
        }
    }
    Ok(u8::from(!all_ok))
}
