//! Command-line front end. `run` parses arguments, dispatches and returns the
//! process exit code: 0 on success, 2 on a domain error or a failed check,
//! 3 when a search budget is exhausted, 64 on a usage error.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use hyperval_core::FieldDef;

mod commands;
pub mod elem;
pub mod preset;

pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl From<hyperval_core::Error> for CliError {
    fn from(e: hyperval_core::Error) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

impl From<hyperval_logic::Error> for CliError {
    fn from(e: hyperval_logic::Error) -> Self {
        match e {
            hyperval_logic::Error::Core(c) => c.into(),
            hyperval_logic::Error::BudgetExceeded(_) => CliError::Budget(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Parser)]
#[command(name = "hyperval", version, about = "Valued hyperfields of p-adic fields: arithmetic, morphisms, lifting and logic")]
pub struct Cli {
    /// Emit canonical JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for searches and corpus evaluation.
    #[arg(long, global = true, default_value_t = default_threads())]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Show a field definition, optionally with one element.
    Field(FieldArgs),
    /// Hyperfield inspection.
    #[command(subcommand)]
    Hf(HfCmd),
    /// Digit expansion of an element of the valuation ring.
    Expand(ExpandArgs),
    /// The Gauss-valuation model over F_p(t).
    #[command(subcommand)]
    Gauss(GaussCmd),
    /// Ramification bounds and lifting thresholds.
    Bounds(FieldOnly),
    /// Homomorphism search, checking and lifting.
    #[command(subcommand)]
    Hom(HomCmd),
    /// Parsing, translation and bounded evaluation of sentences.
    #[command(subcommand)]
    Logic(LogicCmd),
    /// Reproducible experiments stored under presets/.
    #[command(subcommand)]
    Preset(PresetCmd),
}

#[derive(Debug, Args)]
pub struct FieldOnly {
    /// Field definition JSON (or @name inside a preset).
    #[arg(long)]
    pub field: String,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long)]
    pub field: String,
    /// Element expression, e.g. "3 + pi^2" or "1/p".
    #[arg(long, allow_hyphen_values = true)]
    pub elem: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum HfCmd {
    /// Exhaustive hyperfield and valued-hyperfield axiom checks.
    Axioms {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: Option<u32>,
        /// Valuation window; defaults to 2n+2.
        #[arg(long)]
        window: Option<i64>,
    },
    /// The class [a]_n of an element.
    Class {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// The hyperfield sum [a] + [b].
    Add {
        #[arg(long)]
        field: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// The isomorphism of the level-1 units part with the residue field.
    ResidueIso {
        #[arg(long)]
        field: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RadixArg {
    /// Powers of the uniformizer.
    Pi,
    /// Powers of p, for elements of the unramified part.
    P,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long, allow_hyphen_values = true)]
    pub elem: String,
    #[arg(long)]
    pub level: u32,
    #[arg(long, value_enum, default_value_t = RadixArg::Pi)]
    pub radix: RadixArg,
}

#[derive(Debug, Subcommand)]
pub enum GaussCmd {
    /// Expansion along the p-basis {t}.
    Expand {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        level: u32,
        /// A fraction f/g of integer polynomials in t.
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// Whether a unit is p-independent.
    Independent {
        #[arg(long)]
        p: i64,
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
        #[arg(long, default_value_t = 2)]
        prec: u32,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LiftKind {
    Auto,
    Unramified,
    Tame,
    Wild,
}

#[derive(Debug, Subcommand)]
pub enum HomCmd {
    /// Enumerate homomorphisms H_n(src) → H_n(dst).
    Search {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        #[arg(long)]
        n: u32,
        /// Require f([p]) = [p].
        #[arg(long)]
        over_p: bool,
        /// Keep only isomorphisms (implies --over-p).
        #[arg(long)]
        isos: bool,
        /// Lift every result to a field embedding.
        #[arg(long)]
        lift: bool,
    },
    /// Check the homomorphism conditions for a spec.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        window: Option<i64>,
    },
    /// Lift a spec (or the identity of --field at level --n) to an embedding.
    Lift {
        #[arg(long, conflicts_with_all = ["field", "n"])]
        spec: Option<PathBuf>,
        #[arg(long, requires = "n")]
        field: Option<String>,
        #[arg(long, requires = "field")]
        n: Option<u32>,
        #[arg(long, value_enum, default_value_t = LiftKind::Auto)]
        kind: LiftKind,
    },
    /// Check the quotient map H_n(K) → Krasner F_2.
    Krasner {
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Vhf,
    Val,
}

#[derive(Debug, Subcommand)]
pub enum LogicCmd {
    /// Translate a hyperfield sentence into the valued-field language.
    Translate {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        sentence: String,
    },
    /// Bounded evaluation on H_n(K) or on K.
    Eval {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum)]
        side: Side,
        #[arg(long)]
        radius: i64,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        sentence: String,
        /// With --side val, read the sentence in the hyperfield language and
        /// evaluate its translation.
        #[arg(long)]
        translate: bool,
        #[arg(long, default_value_t = hyperval_logic::eval::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Compare both evaluators on a generated corpus.
    Agree {
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        radius: i64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = hyperval_logic::corpus::CORPUS_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum PresetCmd {
    /// List the presets in the preset directory.
    List {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Run a preset and compare its output digest.
    Run {
        name: String,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

/// Result of one command: the JSON document, its text rendering, and
/// whether the checks it reports passed.
pub struct Output {
    pub json: Value,
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Output { json, text, ok: true }
    }
}

/// Execution context. Inside presets `@name` refers to an inline field.
#[derive(Default)]
pub struct Ctx {
    pub threads: usize,
    pub fields: HashMap<String, FieldDef>,
    pub in_preset: bool,
}

pub fn dispatch(ctx: &Ctx, cmd: &Command) -> CliResult<Output> {
    commands::dispatch(ctx, cmd)
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    let ctx = Ctx { threads: cli.threads.max(1), ..Ctx::default() };
    match dispatch(&ctx, &cli.command) {
        Ok(o) => {
            let _ = if cli.json { writeln!(out, "{}", o.json) } else { writeln!(out, "{}", o.text.trim_end()) };
            if o.ok {
                0
            } else {
                EXIT_DOMAIN
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
