mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Compile two-tape Turing machine runs into quantified Boolean formulas
/// and check them against simulation.
///
/// Exit status: 0 when every check passes or the formula is true, 1 on a
/// mismatch or a false formula, 2 on usage or I/O errors.
#[derive(Parser, Debug)]
#[command(name = "tmqbf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and normalize machine files.
    Validate {
        #[arg(required = true)]
        machines: Vec<PathBuf>,
    },
    /// Run a machine on one input.
    Simulate {
        machine: PathBuf,
        input: String,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
        /// Print every configuration up to the halting step.
        #[arg(long)]
        trace: bool,
    },
    /// Write the sentence for an input, or the input-free sentence for a
    /// length, plus a JSON sidecar with lengths.
    Compile {
        machine: PathBuf,
        #[arg(long, conflicts_with = "n", required_unless_present = "n")]
        input: Option<String>,
        /// Input length for the input-free sentence.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate a formula file.
    Eval {
        formula: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
        /// Machine the formula was compiled from; sets the variable order.
        #[arg(long)]
        machine: Option<PathBuf>,
        /// Input for the tape probe.
        #[arg(long, requires = "machine")]
        input: Option<String>,
        /// Exponent for the probe widths; read from the sidecar if absent.
        #[arg(long)]
        m: Option<usize>,
        /// Print evaluation statistics as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare sentence truth with simulation over a grid of inputs.
    Check {
        #[arg(required = true)]
        machines: Vec<PathBuf>,
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3])]
        m: Vec<usize>,
        /// Corrupt the final-state condition of every sentence.
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Measure sentence lengths and fit the length bounds.
    Stats {
        #[arg(required = true)]
        machines: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![4, 8, 16])]
        train: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![32, 64])]
        held_out: Vec<usize>,
        /// Exponents per length: integers, `s` (= ceil(log n)), `2s`, or `n`.
        #[arg(long, value_delimiter = ',', default_values_t = vec!["s".to_string(), "2s".to_string(), "n".to_string()])]
        m: Vec<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide membership through the input-free sentence.
    Recognize {
        machine: PathBuf,
        /// Degree of the time bound; read from a `# degree:` line if absent.
        #[arg(long, short)]
        d: Option<usize>,
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        json_report: Option<PathBuf>,
        #[command(flatten)]
        eval: EvalArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Explicit inputs, comma separated.
    #[arg(long, value_delimiter = ',')]
    input: Vec<String>,
    /// Also every binary input with length in `min-len..=max-len`.
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
}

#[derive(Args, Debug, Clone)]
struct EvalArgs {
    #[arg(long, default_value = "guarded")]
    evaluator: String,
    /// Variable cap for the naive evaluator (also `TMQBF_ENUM_CAP`).
    #[arg(long)]
    enum_cap: Option<usize>,
    /// Diagram node budget for the guarded evaluator (also `TMQBF_NODE_CAP`).
    #[arg(long)]
    node_cap: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("tmqbf: {e}");
            ExitCode::from(2)
        }
    }
}
