//! Exhaustive scan of `[lo, hi]` for `S_n(n) ≡ m (mod n)`.
//!
//! The range is cut into blocks of `block_size` consecutive integers. Each
//! wave hands `jobs` blocks to the worker pool, merges their results in
//! block order and then replaces the checkpoint file, so every checkpoint
//! sits on a block boundary and a resumed run picks up exactly where the
//! last completed wave ended.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use pscong::powersum::is_member;
use pscong::{Error, Nat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{count, num, nums, Failure, Outcome};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug)]
pub struct SearchArgs {
    pub lo: Nat,
    pub hi: Nat,
    pub m: Nat,
    pub block_size: u64,
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many blocks in this invocation (leaves a resumable checkpoint).
    pub stop_after_blocks: Option<u64>,
    /// Sleep per block, to make interruption testable.
    pub throttle: Option<Duration>,
    pub quiet: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedN {
    pub n: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: String,
    pub modulus_m: String,
    pub lo: String,
    pub hi: String,
    pub block_size: String,
    pub next_unscanned: String,
    pub found: Vec<String>,
    pub failures: Vec<SkippedN>,
}

struct Progress {
    next: Nat,
    found: Vec<Nat>,
    failures: Vec<SkippedN>,
}

impl Progress {
    fn checkpoint(&self, args: &SearchArgs) -> Checkpoint {
        Checkpoint {
            schema_version: SCHEMA_VERSION.into(),
            modulus_m: args.m.to_string(),
            lo: args.lo.to_string(),
            hi: args.hi.to_string(),
            block_size: args.block_size.to_string(),
            next_unscanned: self.next.to_string(),
            found: self.found.iter().map(Nat::to_string).collect(),
            failures: self.failures.clone(),
        }
    }
}

fn check(msg: impl Into<String>) -> Failure {
    Failure::Check(msg.into())
}

fn parse_nat(field: &str, s: &str) -> Result<Nat, Failure> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(check(format!(
            "checkpoint field {field} is not a decimal integer: {s:?}"
        )));
    }
    Ok(Nat::from_str(s).expect("validated digits"))
}

/// Loads and validates a checkpoint against the requested search.
fn resume(path: &Path, args: &SearchArgs) -> Result<Option<Progress>, Failure> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(check(format!("cannot read checkpoint {}: {e}", path.display()))),
    };
    let cp: Checkpoint =
        serde_json::from_str(&text).map_err(|e| check(format!("checkpoint {} is not valid: {e}", path.display())))?;
    if cp.schema_version != SCHEMA_VERSION {
        return Err(check(format!(
            "checkpoint schema_version {} is not supported (expected {SCHEMA_VERSION})",
            cp.schema_version
        )));
    }
    let expected = [
        ("modulus_m", &cp.modulus_m, args.m.to_string()),
        ("lo", &cp.lo, args.lo.to_string()),
        ("hi", &cp.hi, args.hi.to_string()),
        ("block_size", &cp.block_size, args.block_size.to_string()),
    ];
    for (field, have, want) in expected {
        if *have != want {
            return Err(check(format!("checkpoint {field} is {have}, this search has {want}")));
        }
    }
    let next = parse_nat("next_unscanned", &cp.next_unscanned)?;
    if next < args.lo || next > &args.hi + 1u32 {
        return Err(check(format!(
            "checkpoint next_unscanned {next} lies outside [lo, hi + 1]"
        )));
    }
    let mut found = Vec::with_capacity(cp.found.len());
    for s in &cp.found {
        let n = parse_nat("found", s)?;
        if n < args.lo || n >= next || !is_member(&n, &args.m)? {
            return Err(check(format!("checkpoint lists {n}, which is not a scanned solution")));
        }
        found.push(n);
    }
    if found.windows(2).any(|w| w[0] >= w[1]) {
        return Err(check("checkpoint found list is not strictly ascending"));
    }
    Ok(Some(Progress {
        next,
        found,
        failures: cp.failures,
    }))
}

fn write_atomically(path: &Path, cp: &Checkpoint) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| check(format!("cannot write checkpoint {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    let mut body = serde_json::to_string_pretty(cp).expect("checkpoint is plain JSON");
    body.push('\n');
    tmp.write_all(body.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

struct BlockResult {
    found: Vec<Nat>,
    failures: Vec<SkippedN>,
}

fn scan_block(start: &Nat, end: &Nat, m: &Nat, throttle: Option<Duration>) -> BlockResult {
    let mut out = BlockResult {
        found: Vec::new(),
        failures: Vec::new(),
    };
    let mut n = start.clone();
    while &n <= end {
        match is_member(&n, m) {
            Ok(true) => out.found.push(n.clone()),
            Ok(false) => {}
            Err(e) => out.failures.push(SkippedN {
                n: n.to_string(),
                reason: e.to_string(),
            }),
        }
        n += 1u32;
    }
    if let Some(d) = throttle {
        std::thread::sleep(d);
    }
    out
}

pub fn run(args: &SearchArgs) -> Result<Outcome, Failure> {
    if args.lo == Nat::default() {
        return Err(Error::Zero { what: "lo" }.into());
    }
    if args.lo > args.hi {
        return Err(check(format!("empty range: lo {} exceeds hi {}", args.lo, args.hi)));
    }
    if args.block_size == 0 || args.jobs == 0 {
        return Err(check("block size and jobs must be positive"));
    }

    let resumed = match &args.checkpoint {
        Some(path) => resume(path, args)?,
        None => None,
    };
    let mut progress = match resumed {
        Some(p) => {
            if !args.quiet {
                eprintln!("resuming at {} with {} solutions so far", p.next, p.found.len());
            }
            p
        }
        None => Progress {
            next: args.lo.clone(),
            found: Vec::new(),
            failures: Vec::new(),
        },
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| check(format!("cannot start worker pool: {e}")))?;
    let mut budget = args.stop_after_blocks;
    let end = &args.hi + 1u32;

    while progress.next < end && budget != Some(0) {
        let mut wave = Vec::with_capacity(args.jobs);
        let mut start = progress.next.clone();
        while wave.len() < args.jobs && start < end && budget != Some(0) {
            let stop = (&start + args.block_size).min(end.clone());
            wave.push((start.clone(), &stop - 1u32));
            start = stop;
            budget = budget.map(|b| b - 1);
        }
        let results: Vec<BlockResult> = pool.install(|| {
            wave.par_iter()
                .map(|(s, e)| scan_block(s, e, &args.m, args.throttle))
                .collect()
        });
        for r in results {
            progress.found.extend(r.found);
            progress.failures.extend(r.failures);
        }
        progress.next = start;
        if let Some(path) = &args.checkpoint {
            write_atomically(path, &progress.checkpoint(args))?;
        }
    }

    let complete = progress.next == end;
    let result = json!({
        "lo": num(&args.lo),
        "hi": num(&args.hi),
        "m": num(&args.m),
        "block_size": count(args.block_size),
        "complete": complete,
        "next_unscanned": num(&progress.next),
        "count": count(progress.found.len()),
        "found": nums(&progress.found),
        "failures": progress.failures.iter().map(|f| json!({ "n": f.n, "reason": f.reason })).collect::<Vec<_>>(),
    });
    let mut notes = Vec::new();
    if !progress.failures.is_empty() {
        notes.push(format!(
            "{} values could not be factored within the cap and were not classified",
            progress.failures.len()
        ));
    }
    if !complete {
        notes.push(format!(
            "stopped before {}; rerun with the same checkpoint to continue",
            progress.next
        ));
    }
    if notes.is_empty() {
        Ok(Outcome::ok(result))
    } else {
        Ok(Outcome::inconclusive(result, notes))
    }
}
