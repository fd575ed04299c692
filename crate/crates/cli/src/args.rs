use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "detpar", version, about = "Run, explore, and type check parallel programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one schedule.
    ///
    /// Exit status: 0 terminated, 1 stuck, 2 step bound reached.
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Policy::Leftmost)]
        policy: Policy,
        /// Seed for the random policy.
        #[arg(long, required_if_eq("policy", "random"))]
        seed: Option<u64>,
        /// Trace file to follow with `--policy trace`.
        #[arg(long, required_if_eq("policy", "trace"))]
        trace: Option<PathBuf>,
        #[arg(long = "limits-steps", default_value_t = 100_000, value_parser = positive)]
        limits_steps: usize,
        /// Write the executed schedule as JSON lines.
        #[arg(long = "trace-out")]
        trace_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Type check a closed program.
    ///
    /// Exit status: 0 well typed, 1 rejected.
    Typecheck {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Explore every interleaving and check that terminating schedules agree.
    ///
    /// Exit status: 0 one outcome, 1 differing outcomes, 2 inconclusive.
    Explore {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        explore: ExploreFlags,
    },
    /// Decide schedule-independent safety.
    ///
    /// Exit status: 0 holds, 1 fails, 2 inconclusive. With `--trace-out F`,
    /// a Holds witness is written to F; a Fails verdict writes the stuck
    /// schedule to F and the terminating one to F.terminating.
    Sisafe {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        explore: ExploreFlags,
        #[arg(long = "trace-out")]
        trace_out: Option<PathBuf>,
    },
    /// Check every corpus program against its manifest expectations.
    ///
    /// Exit status: 0 iff every expectation matches.
    Corpus {
        #[command(flatten)]
        explore: ExploreFlags,
    },
    /// Re-execute a recorded schedule.
    Replay {
        #[command(flatten)]
        input: Input,
        /// A JSON-lines trace, as written by `--trace-out`.
        trace: PathBuf,
        #[arg(long = "trace-out")]
        trace_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Program file. A bare corpus file name such as `dumas.mdl` is found in
    /// the embedded corpus when no such file exists.
    pub path: PathBuf,
    /// Apply the program to this integer.
    #[arg(long, allow_negative_numbers = true)]
    pub arg: Option<i64>,
}

#[derive(Debug, Args)]
pub struct ExploreFlags {
    #[arg(long = "limits-states", default_value_t = 1_000_000, value_parser = positive)]
    pub limits_states: usize,
    #[arg(long = "limits-steps", default_value_t = 100_000, value_parser = positive)]
    pub limits_steps: usize,
    /// Worker threads for expanding each frontier.
    #[arg(long, default_value_t = 1, value_parser = positive)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Leftmost,
    Rightmost,
    Random,
    Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}
