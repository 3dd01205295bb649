//! Command-line surface for the avoidance-set decision procedures.
//!
//! Exit codes: 0 for a true verdict (or plain success), 1 for a false
//! verdict (or "none within bound"), 2 for usage and parse errors, 3 when a
//! deadline is exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eqrel_core::colored::ColoredFactorGraph;
use eqrel_core::decide::{self, DecideError, DecideOptions, Property};
use eqrel_core::factor_graph::FactorGraph;
use eqrel_core::oracle::{self, SearchBound};
use eqrel_core::{avoidance, Basis, EqRel, OrderKind};

#[derive(Parser)]
#[command(
    name = "eqrel",
    version,
    about = "Decide well quasi-order and atomicity of equivalence-relation avoidance sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Cons,
    Noncons,
}

impl From<OrderArg> for OrderKind {
    fn from(o: OrderArg) -> OrderKind {
        match o {
            OrderArg::Cons => OrderKind::Consecutive,
            OrderArg::Noncons => OrderKind::NonConsecutive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Wqo,
    Atomicity,
}

#[derive(Subcommand)]
enum Command {
    /// Decide wqo or atomicity for the avoidance set of a basis file.
    Decide(DecideCmd),
    /// Write the factor graph (or its coloured variant) in DOT format.
    Graph(GraphCmd),
    /// List the members of a given length, one per line.
    Enumerate(EnumerateCmd),
    /// Test whether one relation embeds into another.
    CheckEmbed(CheckEmbedCmd),
    /// Produce verified witnesses.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Run the brute-force oracles directly.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Args)]
struct DecideCmd {
    #[arg(long, value_enum)]
    order: OrderArg,
    #[arg(long, value_enum)]
    property: PropertyArg,
    #[arg(long)]
    basis: PathBuf,
    /// Number of antichain members attached to a non-wqo verdict.
    #[arg(long, default_value_t = 10)]
    witness: usize,
    /// Emit the decision as JSON instead of a verdict line.
    #[arg(long)]
    json: bool,
    /// Abort witness searches after this many seconds.
    #[arg(long)]
    timeout_secs: Option<u64>,
}

#[derive(Args)]
struct GraphCmd {
    #[arg(long)]
    basis: PathBuf,
    /// Output path for the DOT text.
    #[arg(long)]
    dot: PathBuf,
    /// Write the coloured factor graph instead.
    #[arg(long)]
    colored: bool,
}

#[derive(Args)]
struct EnumerateCmd {
    #[arg(long)]
    basis: PathBuf,
    #[arg(long, value_enum)]
    order: OrderArg,
    #[arg(long)]
    length: usize,
}

#[derive(Args)]
struct CheckEmbedCmd {
    #[arg(long, value_enum)]
    order: OrderArg,
    small: String,
    big: String,
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Pairwise-incomparable members of a non-wqo avoidance set.
    Antichain(AntichainCmd),
}

#[derive(Args)]
struct AntichainCmd {
    #[arg(long)]
    basis: PathBuf,
    #[arg(short = 'k', default_value_t = 10)]
    k: usize,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Search for a joint extension of two relations inside the avoidance set.
    Jep(JepCmd),
}

#[derive(Args)]
struct JepCmd {
    #[arg(long)]
    basis: PathBuf,
    #[arg(long, value_enum)]
    order: OrderArg,
    /// Largest candidate length to try.
    #[arg(long)]
    max_size: usize,
    #[arg(long)]
    timeout_secs: Option<u64>,
    a: String,
    b: String,
}

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEADLINE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[derive(Debug)]
struct CliError {
    message: String,
    deadline: bool,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            deadline: false,
        }
    }

    fn exit_code(&self) -> u8 {
        if self.deadline {
            EXIT_DEADLINE
        } else {
            EXIT_USAGE
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<DecideError> for CliError {
    fn from(err: DecideError) -> CliError {
        CliError {
            deadline: matches!(err, DecideError::Timeout),
            message: err.to_string(),
        }
    }
}

fn load_basis(path: &PathBuf, order: OrderKind) -> Result<Basis, CliError> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{file}: {e}")))?;
    let relations =
        avoidance::parse_basis_text(&file, &text).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(Basis::minimize(relations, order))
}

fn parse_relation(text: &str) -> Result<EqRel, CliError> {
    EqRel::parse(text).map_err(|e| CliError::usage(format!("relation `{text}`: {e}")))
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Decide(cmd) => {
            let basis = load_basis(&cmd.basis, cmd.order.into())?;
            let property = match cmd.property {
                PropertyArg::Wqo => Property::Wqo,
                PropertyArg::Atomicity => Property::Atomicity,
            };
            let opts = DecideOptions {
                antichain_len: cmd.witness,
                deadline: cmd.timeout_secs.map(Duration::from_secs),
                ..DecideOptions::default()
            };
            let decision = decide::decide(&basis, property, &opts)?;
            if cmd.json {
                println!("{}", decision.to_json());
            } else {
                let name = match property {
                    Property::Wqo => "wqo",
                    Property::Atomicity => "atomic",
                };
                println!("{name}: {}", decision.verdict);
                for clause in &decision.reason.clauses {
                    println!(
                        "  {} [{}]",
                        clause.name,
                        if clause.holds { "holds" } else { "fails" }
                    );
                }
            }
            Ok(verdict_code(decision.verdict))
        }
        Command::Graph(cmd) => {
            let basis = load_basis(&cmd.basis, OrderKind::Consecutive)?;
            let graph = FactorGraph::build(&basis).map_err(|e| CliError::usage(e.to_string()))?;
            let dot = if cmd.colored {
                let colored = ColoredFactorGraph::build(&graph)
                    .map_err(|e| CliError::usage(e.to_string()))?;
                colored.to_dot()
            } else {
                graph.to_dot()
            };
            fs::write(&cmd.dot, dot)
                .map_err(|e| CliError::usage(format!("{}: {e}", cmd.dot.display())))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate(cmd) => {
            let basis = load_basis(&cmd.basis, cmd.order.into())?;
            if cmd.length == 0 {
                return Err(CliError::usage("--length must be at least 1"));
            }
            for member in basis.enumerate(cmd.length) {
                println!("{member}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckEmbed(cmd) => {
            let small = parse_relation(&cmd.small)?;
            let big = parse_relation(&cmd.big)?;
            let order: OrderKind = cmd.order.into();
            let verdict = order.embeds(&small, &big);
            println!("embeds: {verdict}");
            Ok(verdict_code(verdict))
        }
        Command::Witness(WitnessCmd::Antichain(cmd)) => {
            let basis = load_basis(&cmd.basis, OrderKind::Consecutive)?;
            let members = decide::antichain_prefix(&basis, cmd.k)?;
            debug_assert!(oracle::verify_antichain(&members, OrderKind::Consecutive));
            for member in members {
                println!("{member}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle(OracleCmd::Jep(cmd)) => {
            let basis = load_basis(&cmd.basis, cmd.order.into())?;
            let a = parse_relation(&cmd.a)?;
            let b = parse_relation(&cmd.b)?;
            let bound = SearchBound {
                max_length: cmd.max_size,
                deadline: cmd.timeout_secs.map(Duration::from_secs),
            };
            match oracle::jep_search(&a, &b, &basis, &bound) {
                Ok(Some(z)) => {
                    println!("{z}");
                    Ok(ExitCode::SUCCESS)
                }
                Ok(None) => {
                    println!("none within bound");
                    Ok(ExitCode::from(EXIT_FALSE))
                }
                Err(_) => Err(CliError {
                    message: "search deadline exceeded".into(),
                    deadline: true,
                }),
            }
        }
    }
}

fn verdict_code(verdict: bool) -> ExitCode {
    if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}
