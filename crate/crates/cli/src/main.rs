mod output;
mod query;
mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use epinorm::modelspec::{self, Diagnostic, ModelDocument, Severity};
use epinorm::scalar::parse_rational;
use epinorm::{KnowledgeVariant, Rational, SufficiencyRule};

use output::{Format, Output};

/// Default truncation depth for geometric and racing models.
pub const DEPTH_VAR: &str = "EPINORM_DEPTH";
const FALLBACK_DEPTH: u32 = 64;

#[derive(Parser)]
#[command(name = "epinorm", version, about = "Knowledge and belief from probability and normality")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Believed states at a world, or believed answers for every body of evidence.
    Believe {
        model: PathBuf,
        /// World as `state@evidence`.
        #[arg(long)]
        at: Option<String>,
    },
    /// States not ruled out by knowledge at a world.
    Know {
        model: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// Beliefs before and after learning each set in turn.
    Discover {
        model: PathBuf,
        #[arg(long)]
        at: String,
        /// States learned: `{a,b}`, `3..7`, `2..` or `{2,3,...}`.
        #[arg(long, required = true)]
        learn: Vec<String>,
    },
    /// Structural axioms, acyclicity, threshold and accessibility invariants.
    Check { model: PathBuf },
    /// Prints the model in canonical form.
    Render { model: PathBuf },
    /// Built-in worked examples.
    Scenario {
        #[command(subcommand)]
        scenario: scenario::Scenario,
    },
    /// Summary tables.
    Table {
        #[command(subcommand)]
        table: TableCommand,
    },
}

#[derive(Subcommand)]
enum TableCommand {
    /// Beliefs about a race of coins, for every question and threshold.
    Racing {
        #[arg(long = "t", value_parser = threshold, default_values = [".75", ".95"])]
        t: Vec<Rational>,
        #[arg(long, default_value_t = 10)]
        coins: usize,
        #[arg(long)]
        depth: Option<u32>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Stalnaker,
    Williamson,
}

impl From<VariantArg> for KnowledgeVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Stalnaker => KnowledgeVariant::Stalnakerian,
            VariantArg::Williamson => KnowledgeVariant::Williamsonian,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Sufficiency,
    SufficiencyPlus,
}

impl From<RuleArg> for SufficiencyRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Sufficiency => SufficiencyRule::Sufficiency,
            RuleArg::SufficiencyPlus => SufficiencyRule::SufficiencyPlus,
        }
    }
}

/// Parses a threshold in `(0, 1]` exactly.
pub fn threshold(s: &str) -> Result<Rational, String> {
    let r = parse_rational(s).ok_or_else(|| format!("{s:?} is not a number"))?;
    if r <= Rational::from_integer(0.into()) || r > Rational::from_integer(1.into()) {
        return Err(format!("threshold {s} is not in (0, 1]"));
    }
    Ok(r)
}

pub enum Failure {
    /// Exit code 2.
    Parse(Vec<String>),
    /// Exit code 1.
    Model(String),
}

impl From<epinorm::Error> for Failure {
    fn from(e: epinorm::Error) -> Self {
        Failure::Model(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub fn default_depth() -> CliResult<u32> {
    depth_or(FALLBACK_DEPTH)
}

/// Depth from the environment, or `fallback`.
pub fn depth_or(fallback: u32) -> CliResult<u32> {
    match std::env::var(DEPTH_VAR) {
        Err(_) => Ok(fallback),
        Ok(v) => match v.trim().parse::<u32>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(Failure::Model(format!("{DEPTH_VAR}={v:?} is not a positive integer"))),
        },
    }
}

fn show(path: &Path, d: &Diagnostic) -> String {
    format!("{}:{d}", path.display())
}

fn load(path: &Path) -> CliResult<ModelDocument> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Parse(vec![format!("{}: {e}", path.display())]))?;
    match modelspec::parse_bytes(&bytes) {
        Ok(doc) => {
            // warnings only exist for valid UTF-8 input
            let text = String::from_utf8_lossy(&bytes);
            for d in modelspec::parse_with_diagnostics(&text).1 {
                if d.severity == Severity::Warning {
                    eprintln!("{}", show(path, &d));
                }
            }
            Ok(doc)
        }
        Err(diags) => Err(Failure::Parse(diags.iter().map(|d| show(path, d)).collect())),
    }
}

fn run(cli: Cli) -> CliResult<(Output, bool)> {
    let ok = |o| Ok((o, true));
    match cli.command {
        Command::Believe { model, at } => ok(query::believe(&load(&model)?, at.as_deref())?),
        Command::Know { model, at, variant } => ok(query::know(&load(&model)?, &at, variant.map(Into::into))?),
        Command::Discover { model, at, learn } => ok(query::discover(&load(&model)?, &at, &learn)?),
        Command::Check { model } => query::check(&load(&model)?),
        Command::Render { model } => ok(Output::Raw(load(&model)?.render())),
        Command::Scenario { scenario } => ok(scenario::run(scenario)?),
        Command::Table { table: TableCommand::Racing { t, coins, depth } } => {
            use epinorm::scenarios::racing::{racing_table, table_rows, TABLE_COLUMNS};
            let depth = match depth {
                Some(d) => d,
                None => depth_or(epinorm::scenarios::racing::DEFAULT_DEPTH)?,
            };
            let rows = racing_table(coins, &t, depth)?;
            ok(Output::table(TABLE_COLUMNS, table_rows(&rows)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok((out, passed)) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = out.write(format, &mut stdout).and_then(|_| stdout.flush()) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Parse(lines)) => {
            for l in lines {
                eprintln!("{l}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Model(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
