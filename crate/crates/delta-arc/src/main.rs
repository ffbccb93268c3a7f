//! The `delta-arc` command line: product derivation, wellformedness
//! checking, application-order computation, and corpus metrics.
//!
//! Exit codes: 0 on success (warnings allowed), 1 on model or constraint
//! errors, 2 on usage and I/O errors. Diagnostics go to stderr; results go
//! to stdout. `DELTA_ARC_COLOR={auto,always,never}` controls diagnostic
//! coloring (default: color iff stderr is a terminal).

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use delta_arc::check::check_full;
use delta_arc::diag::{Code, Diagnostic, Severity};
use delta_arc::generate::{
    derive_product, load_config, load_core, load_deltas, DerivationRequest, GenerationError,
};
use delta_arc::metrics::{measure, MetricsError};
use delta_arc::order::{
    compute_order, constraint_warnings, enumerate_orders, OrderStrategy, DEFAULT_ENUMERATION_BOUND,
};

#[derive(Parser)]
#[command(name = "delta-arc", version, about = "Delta modeling for architecture descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Explore deltas in the order the configuration lists them.
    Config,
    /// Explore deltas in lexicographic name order.
    Lex,
}

impl From<StrategyArg> for OrderStrategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Config => OrderStrategy::ConfigurationOrder,
            StrategyArg::Lex => OrderStrategy::Lexicographic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Derive a product by applying the configured deltas to a core model.
    Derive {
        /// Directory with the core `.arc` files (repeatable).
        #[arg(long, required = true)]
        core: Vec<PathBuf>,
        /// Directory with the `.delta` files.
        #[arg(long)]
        deltas: PathBuf,
        /// Product configuration file (`.deltacfg`).
        #[arg(long)]
        config: PathBuf,
        /// Data type hierarchy file (`.types`).
        #[arg(long)]
        types: Option<PathBuf>,
        /// Directory the derived `.arc` files are written to.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tie-breaking strategy for the application order.
        #[arg(long, value_enum, default_value_t = StrategyArg::Config)]
        order_strategy: StrategyArg,
    },
    /// Check a core model against all context conditions.
    Check {
        /// Directory with the core `.arc` files (repeatable).
        #[arg(long, required = true)]
        core: Vec<PathBuf>,
        /// Data type hierarchy file (`.types`).
        #[arg(long)]
        types: Option<PathBuf>,
    },
    /// Compute a constraint-valid delta application order.
    Order {
        /// Directory with the `.delta` files.
        #[arg(long)]
        deltas: PathBuf,
        /// Product configuration file (`.deltacfg`).
        #[arg(long)]
        config: PathBuf,
        /// Print every valid order, one per line, instead of the first.
        #[arg(long)]
        all: bool,
    },
    /// Report lines-of-code metrics for a core/delta corpus.
    Metrics {
        /// Directory with the core `.arc` files.
        #[arg(long)]
        core: PathBuf,
        /// Directory with the `.delta` files.
        #[arg(long)]
        deltas: PathBuf,
    },
}

fn use_color() -> bool {
    match std::env::var("DELTA_ARC_COLOR").ok().as_deref() {
        Some("always") => true,
        Some("never") => false,
        _ => std::io::stderr().is_terminal(),
    }
}

fn print_diagnostic(d: &Diagnostic, color: bool) {
    if color {
        let (tint, label) = match d.severity {
            Severity::Error => ("\x1b[31m", "error"),
            Severity::Warning => ("\x1b[33m", "warning"),
        };
        eprintln!("{}: {tint}{label}[{}]\x1b[0m: {}", d.loc, d.code, d.message);
    } else {
        eprintln!("{d}");
    }
}

fn print_generation_error(e: &GenerationError, color: bool) -> u8 {
    match e {
        GenerationError::Parse(d)
        | GenerationError::DeltaMissing(d)
        | GenerationError::Order(d) => {
            print_diagnostic(d, color);
            1
        }
        GenerationError::InvalidCore(report) => {
            eprintln!("core model is not well-formed:");
            for d in &report.diagnostics {
                print_diagnostic(d, color);
            }
            1
        }
        GenerationError::Delta(err) => {
            eprintln!("in delta `{}`:", err.delta);
            print_diagnostic(&err.diagnostic, color);
            1
        }
        GenerationError::InvalidProduct { name, report } => {
            eprintln!("derived product `{name}` is not well-formed:");
            for d in &report.diagnostics {
                print_diagnostic(d, color);
            }
            1
        }
        GenerationError::Io { path, source } => {
            eprintln!("error: {}: {source}", path.display());
            2
        }
    }
}

fn cmd_derive(req: &DerivationRequest, color: bool) -> u8 {
    match derive_product(req) {
        Ok(result) => {
            for w in result.warnings() {
                print_diagnostic(w, color);
            }
            println!("product `{}` derived: {}", result.name, result.order);
            for path in &result.emitted {
                println!("wrote {}", path.display());
            }
            0
        }
        Err(e) => print_generation_error(&e, color),
    }
}

fn cmd_check(core: &[PathBuf], types: Option<&PathBuf>, color: bool) -> u8 {
    let repo = match load_core(core, types.map(PathBuf::as_path)) {
        Ok(repo) => repo,
        Err(e) => return print_generation_error(&e, color),
    };
    let report = check_full(&repo);
    for d in &report.diagnostics {
        print_diagnostic(d, color);
    }
    if report.has_errors() {
        1
    } else {
        println!("{} component(s) checked, no errors", repo.components.len());
        0
    }
}

fn cmd_order(deltas_dir: &PathBuf, config_path: &PathBuf, all: bool, color: bool) -> u8 {
    let loaded = load_config(config_path).and_then(|config| Ok((config, load_deltas(deltas_dir)?)));
    let (config, deltas) = match loaded {
        Ok(pair) => pair,
        Err(e) => return print_generation_error(&e, color),
    };
    for name in &config.deltas {
        if !deltas.contains_key(name) {
            print_diagnostic(
                &Diagnostic::error(
                    Code::GenDeltaMissing,
                    config.loc.clone(),
                    format!(
                        "configuration `{}` selects delta `{name}`, but no delta model with that name was loaded",
                        config.name
                    ),
                ),
                color,
            );
            return 1;
        }
    }
    for w in constraint_warnings(&config, &deltas) {
        print_diagnostic(&w, color);
    }
    let result = if all {
        enumerate_orders(&config, &deltas, OrderStrategy::ConfigurationOrder, DEFAULT_ENUMERATION_BOUND)
    } else {
        compute_order(&config, &deltas, OrderStrategy::ConfigurationOrder).map(|o| vec![o])
    };
    match result {
        Ok(orders) => {
            for order in orders {
                println!("{order}");
            }
            0
        }
        Err(d) => {
            print_diagnostic(&d, color);
            1
        }
    }
}

fn cmd_metrics(core: &PathBuf, deltas: &PathBuf, color: bool) -> u8 {
    match measure(core, deltas) {
        Ok(report) => {
            println!("{report}");
            println!();
            print!("{}", report.key_values());
            0
        }
        Err(MetricsError::Empty(d)) => {
            print_diagnostic(&d, color);
            1
        }
        Err(MetricsError::Io { path, source }) => {
            eprintln!("error: {}: {source}", path.display());
            2
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let color = use_color();
    let status = match &cli.command {
        Command::Derive { core, deltas, config, types, out, order_strategy } => {
            let req = DerivationRequest {
                core_dirs: core.clone(),
                delta_dir: deltas.clone(),
                config_path: config.clone(),
                types_path: types.clone(),
                out_dir: out.clone(),
                strategy: (*order_strategy).into(),
            };
            cmd_derive(&req, color)
        }
        Command::Check { core, types } => cmd_check(core, types.as_ref(), color),
        Command::Order { deltas, config, all } => cmd_order(deltas, config, *all, color),
        Command::Metrics { core, deltas } => cmd_metrics(core, deltas, color),
    };
    ExitCode::from(status)
}
