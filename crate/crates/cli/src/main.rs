//! `pscong`: compute and verify solution sets of `1^n + ... + n^n ≡ m (mod n)`.
//!
//! Every invocation writes one report to standard output (JSON with
//! `--json`) and exits with 0 (Ok), 2 (Inconclusive: a cap was hit), 1
//! (error, including unparsable arguments) or, under `--fail-on-false`, 3
//! when a yes/no command answers no.

mod commands;
mod report;
mod search;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use pscong::arith::set_default_factor_cap;
use pscong::qp::QpCaps;
use pscong::Nat;
use serde_json::Value;

use commands::Route;
use report::{count, num, Outcome, Report, Status};

#[derive(Parser, Debug)]
#[command(
    name = "pscong",
    version,
    about = "Solution sets of 1^n + 2^n + ... + n^n ≡ m (mod n)"
)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress the text report and progress messages.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Pollard rho iteration budget per factorization.
    #[arg(long, global = true, value_name = "ITERS")]
    factor_cap: Option<u64>,
    /// Exit with 3 when a yes/no command answers no.
    #[arg(long, global = true)]
    fail_on_false: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct CapArgs {
    /// Rounds of prime-set construction.
    #[arg(long, default_value_t = QpCaps::default().max_iterations)]
    max_iter: u32,
    /// Largest prime set whose subsets are enumerated.
    #[arg(long, default_value_t = QpCaps::default().max_subset_size)]
    max_subset: usize,
    /// Widest candidate tested for primality, in bits.
    #[arg(long, default_value_t = QpCaps::default().max_candidate_bits)]
    max_bits: u64,
}

impl CapArgs {
    fn caps(self) -> QpCaps {
        QpCaps {
            max_iterations: self.max_iter,
            max_subset_size: self.max_subset,
            max_candidate_bits: self.max_bits,
        }
    }

    fn record(self, inputs: &mut BTreeMap<&'static str, Value>) {
        inputs.insert("max_iter", count(self.max_iter));
        inputs.insert("max_subset", count(self.max_subset));
        inputs.insert("max_bits", count(self.max_bits));
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sum 1^n + ... + n^n mod n directly and compare with m.
    Oracle {
        #[arg(value_parser = parse_nat)]
        n: Nat,
        #[arg(value_parser = parse_nat)]
        m: Nat,
    },
    /// Decide S_n(n) ≡ m (mod n) prime power by prime power.
    Member {
        #[arg(value_parser = parse_nat)]
        n: Nat,
        #[arg(value_parser = parse_nat)]
        m: Nat,
    },
    /// Build the prime set Q_p.
    Qp {
        #[arg(value_parser = parse_nat)]
        p: Nat,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Solutions of S_n(n) ≡ p (mod n) for a prime p.
    Mp {
        #[arg(value_parser = parse_nat)]
        p: Nat,
        /// Only report solutions up to this value.
        #[arg(long, value_parser = parse_nat)]
        bound: Option<Nat>,
        #[arg(long, value_enum, default_value_t = Route::Auto)]
        route: Route,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Square-free products over Q_p that p - 1 does not divide.
    Np {
        #[arg(value_parser = parse_nat)]
        p: Nat,
        #[arg(long, value_parser = parse_nat)]
        bound: Option<Nat>,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Scan [lo, hi] for solutions of S_n(n) ≡ m (mod n).
    Search {
        #[arg(value_parser = parse_nat)]
        lo: Nat,
        #[arg(value_parser = parse_nat)]
        hi: Nat,
        #[arg(value_parser = parse_nat)]
        m: Nat,
        /// Worker threads (defaults to the number of CPUs).
        #[arg(long)]
        jobs: Option<usize>,
        /// Resume from and save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1024)]
        block_size: u64,
        #[arg(long, hide = true)]
        stop_after_blocks: Option<u64>,
        #[arg(long, hide = true)]
        throttle_ms: Option<u64>,
    },
    /// Weak primary pseudoperfect numbers.
    Wpp {
        #[command(subcommand)]
        action: WppAction,
    },
    /// The finiteness screen: no 1 + c·p prime for the eight multipliers c.
    Cond {
        #[arg(value_parser = parse_nat)]
        p: Nat,
    },
}

#[derive(Subcommand, Debug)]
enum WppAction {
    /// Test one number.
    Verify {
        #[arg(value_parser = parse_nat)]
        n: Nat,
    },
    /// Re-verify and print the nine known values.
    Catalog,
}

fn parse_nat(s: &str) -> Result<Nat, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a nonnegative decimal integer, got {s:?}"));
    }
    Nat::from_str(s).map_err(|e| e.to_string())
}

fn dispatch(
    cli: &Cli,
) -> (
    &'static str,
    BTreeMap<&'static str, Value>,
    Result<Outcome, report::Failure>,
) {
    let mut inputs = BTreeMap::new();
    let (name, outcome) = match &cli.command {
        Command::Oracle { n, m } => {
            inputs.insert("n", num(n));
            inputs.insert("m", num(m));
            ("oracle", commands::oracle(n, m))
        }
        Command::Member { n, m } => {
            inputs.insert("n", num(n));
            inputs.insert("m", num(m));
            ("member", commands::member(n, m))
        }
        Command::Qp { p, caps } => {
            inputs.insert("p", num(p));
            caps.record(&mut inputs);
            ("qp", commands::qp(p, caps.caps()))
        }
        Command::Mp { p, bound, route, caps } => {
            inputs.insert("p", num(p));
            inputs.insert("bound", bound.as_ref().map_or(Value::Null, num));
            inputs.insert("route", Value::from(route.label()));
            caps.record(&mut inputs);
            ("mp", commands::mp(p, bound.as_ref(), *route, caps.caps()))
        }
        Command::Np { p, bound, caps } => {
            inputs.insert("p", num(p));
            inputs.insert("bound", bound.as_ref().map_or(Value::Null, num));
            caps.record(&mut inputs);
            ("np", commands::np(p, bound.as_ref(), caps.caps()))
        }
        Command::Search {
            lo,
            hi,
            m,
            jobs,
            checkpoint,
            block_size,
            stop_after_blocks,
            throttle_ms,
        } => {
            inputs.insert("lo", num(lo));
            inputs.insert("hi", num(hi));
            inputs.insert("m", num(m));
            inputs.insert("block_size", count(block_size));
            let args = search::SearchArgs {
                lo: lo.clone(),
                hi: hi.clone(),
                m: m.clone(),
                block_size: *block_size,
                jobs: jobs.unwrap_or_else(rayon::current_num_threads),
                checkpoint: checkpoint.clone(),
                stop_after_blocks: *stop_after_blocks,
                throttle: throttle_ms.map(Duration::from_millis),
                quiet: cli.quiet,
            };
            ("search", search::run(&args))
        }
        Command::Wpp {
            action: WppAction::Verify { n },
        } => {
            inputs.insert("n", num(n));
            ("wpp verify", commands::wpp_verify(n))
        }
        Command::Wpp {
            action: WppAction::Catalog,
        } => ("wpp catalog", commands::wpp_catalog()),
        Command::Cond { p } => {
            inputs.insert("p", num(p));
            ("cond", commands::cond(p))
        }
    };
    if let Some(cap) = cli.factor_cap {
        inputs.insert("factor_cap", count(cap));
    }
    (name, inputs, outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(cap) = cli.factor_cap {
        set_default_factor_cap(cap);
    }

    let (command, inputs, outcome) = dispatch(&cli);
    let outcome = outcome.unwrap_or_else(|failure| Outcome {
        result: Value::Null,
        status: failure.status(),
        notes: vec![failure.to_string()],
        verdict: None,
    });
    let report = Report {
        command,
        inputs,
        outcome,
    };

    if cli.json {
        print!("{}", report.render_json());
    } else if !cli.quiet {
        print!("{}", report.render_text());
    }
    if report.outcome.status == Status::Error && (cli.json || cli.quiet) {
        for note in &report.outcome.notes {
            eprintln!("error: {note}");
        }
    }

    let code = match report.outcome.status {
        Status::Ok if cli.fail_on_false && report.outcome.verdict == Some(false) => 3,
        Status::Ok => 0,
        Status::Inconclusive => 2,
        Status::Error => 1,
    };
    ExitCode::from(code)
}
