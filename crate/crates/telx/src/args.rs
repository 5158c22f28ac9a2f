//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Reasoning with temporal EL knowledge bases, conjunctive grammars and
/// semilinear sets.
#[derive(Debug, Parser)]
#[command(name = "telx", version, about)]
pub struct Cli {
    /// Print the full result as JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// The command to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Saturation bounds. Unset bounds take the defaults of the command.
#[derive(Debug, Clone, Copy, Default, Args)]
pub struct WindowArgs {
    /// Least time point of the saturation window.
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<i64>,
    /// Greatest time point of the saturation window.
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<i64>,
    /// Maximal nesting of nulls below an individual.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Maximal number of derived facts.
    #[arg(long)]
    pub steps: Option<u64>,
}

/// Which procedure answers a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Grammar membership for future TBoxes, saturation otherwise.
    Auto,
    /// Grammar membership (future TBoxes only; complete).
    Grammar,
    /// Bounded saturation (any TBox; may answer UnknownAtBound).
    Saturation,
}

/// The commands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report the fragments a TBox belongs to.
    Classify {
        /// TBox file.
        tbox: PathBuf,
    },
    /// Check that a TBox is well formed.
    Validate {
        /// TBox file.
        tbox: PathBuf,
    },
    /// Saturate a knowledge base and list the derived facts.
    Saturate {
        /// TBox file.
        tbox: PathBuf,
        /// ABox file.
        abox: PathBuf,
        /// Saturation window and limits.
        #[command(flatten)]
        window: WindowArgs,
        /// List only facts about individuals.
        #[arg(long)]
        individuals_only: bool,
    },
    /// Decide a fact `A(a, n)` over a knowledge base, or an inclusion
    /// `A [= X^n B` over a TBox, by saturation.
    Entails {
        /// TBox file.
        tbox: PathBuf,
        /// ABox file (required with --fact).
        abox: Option<PathBuf>,
        /// The fact to decide.
        #[arg(long, conflicts_with = "ci", required_unless_present = "ci")]
        fact: Option<String>,
        /// The inclusion to decide.
        #[arg(long)]
        ci: Option<String>,
        /// Saturation window and limits.
        #[command(flatten)]
        window: WindowArgs,
    },
    /// The shifts n with |n| ≤ bound such that `lhs [= X^n rhs` is entailed.
    ShiftSet {
        /// TBox file.
        tbox: PathBuf,
        /// Left-hand concept.
        #[arg(long)]
        lhs: String,
        /// Right-hand concept.
        #[arg(long)]
        rhs: String,
        /// Largest shift magnitude.
        #[arg(long, default_value_t = 10)]
        bound: u64,
        /// Saturation window and limits.
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Translate a TBox into a conjunctive grammar with a nonterminal per
    /// concept pair.
    ToGrammar {
        /// TBox file.
        tbox: PathBuf,
        /// Accept negative shifts (they become `d` runs).
        #[arg(long)]
        allow_past: bool,
    },
    /// Translate a unary grammar into a future TBox.
    ToTbox {
        /// Grammar file.
        grammar: PathBuf,
    },
    /// Translate a linear TBox into a context-free grammar over {c, d}.
    ToCfg {
        /// TBox file.
        tbox: PathBuf,
        /// Shift bound of the oracle used when dropping local roles
        /// (default: 2·Σ|δ| + 2).
        #[arg(long)]
        oracle_bound: Option<u64>,
    },
    /// Decide grammar membership of a word.
    Member {
        /// Grammar file.
        grammar: PathBuf,
        /// Nonterminal (default: the start symbol).
        #[arg(long)]
        nt: Option<String>,
        /// The word: literal (`aabbcc`), powers (`c^16`) or `_` for ε.
        #[arg(long)]
        word: String,
        /// Omit the derivation from the output.
        #[arg(long)]
        no_trace: bool,
    },
    /// Answer a temporal atomic query `A(a, n)`.
    Taqa {
        /// TBox file.
        tbox: PathBuf,
        /// ABox file.
        abox: PathBuf,
        /// The query, e.g. `Happy(alice,2028)`.
        #[arg(long)]
        query: String,
        /// Which procedure to use.
        #[arg(long, value_enum, default_value_t = Route::Auto)]
        route: Route,
        /// Also print the nonterminal tested and the word length.
        #[arg(short, long)]
        verbose: bool,
        /// Saturation window and limits.
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Fit an eventually periodic set to the samples within ±bound.
    DetectPeriod {
        /// Comma-separated integers.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "grammar", required_unless_present = "grammar")]
        samples: Option<String>,
        /// Sample the length set of a nonterminal of a unary grammar instead.
        #[arg(long, requires = "nt")]
        grammar: Option<PathBuf>,
        /// Nonterminal whose lengths are sampled.
        #[arg(long)]
        nt: Option<String>,
        /// The sample window.
        #[arg(long)]
        bound: u64,
    },
    /// Emit the linear Datalog program of a linear TBox.
    EmitDatalog {
        /// TBox file.
        tbox: PathBuf,
        /// Shift bound used to fit the shift sets.
        #[arg(long, default_value_t = 10)]
        fit_bound: u64,
        /// Shift bound up to which the fits are checked.
        #[arg(long, default_value_t = 30)]
        verify_bound: u64,
    },
    /// Evaluate a linear Datalog program over an ABox within a window.
    EvalDatalog {
        /// Program file.
        program: PathBuf,
        /// ABox file.
        abox: PathBuf,
        /// Least time point of derived facts.
        #[arg(long, allow_hyphen_values = true)]
        lo: i64,
        /// Greatest time point of derived facts.
        #[arg(long, allow_hyphen_values = true)]
        hi: i64,
    },
    /// Print a derivation of a fact.
    Trace {
        /// TBox file.
        tbox: PathBuf,
        /// ABox file.
        abox: PathBuf,
        /// The fact to derive.
        #[arg(long)]
        fact: String,
        /// Saturation window and limits.
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Search a grammar over {c, d} for a word with #c − #d = shift.
    ExistsShift {
        /// Grammar file.
        grammar: PathBuf,
        /// Nonterminal (default: the start symbol).
        #[arg(long)]
        nt: Option<String>,
        /// The balance sought.
        #[arg(long, allow_hyphen_values = true)]
        shift: i64,
        /// Longest word and largest balance considered.
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
}
