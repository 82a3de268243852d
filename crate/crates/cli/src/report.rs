use std::collections::BTreeMap;

use pscong::{Factorization, Nat};
use serde_json::{json, Map, Value};

/// Why a command produced no result.
#[derive(Debug)]
pub enum Failure {
    Lib(pscong::Error),
    /// A self-check or input validation failed.
    Check(String),
}

impl From<pscong::Error> for Failure {
    fn from(e: pscong::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    /// Hitting the factorization budget is a cap, not a wrong input.
    pub fn status(&self) -> Status {
        match self {
            Failure::Lib(pscong::Error::FactorizationIncomplete { .. }) => Status::Inconclusive,
            _ => Status::Error,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => e.fmt(f),
            Failure::Check(msg) => f.write_str(msg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Inconclusive,
    Error,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "Ok",
            Status::Inconclusive => "Inconclusive",
            Status::Error => "Error",
        }
    }
}

/// What a command produced, before it is wrapped with its name and inputs.
#[derive(Debug)]
pub struct Outcome {
    pub result: Value,
    pub status: Status,
    pub notes: Vec<String>,
    /// The yes/no answer for commands that have one; drives `--fail-on-false`.
    pub verdict: Option<bool>,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Self {
            result,
            status: Status::Ok,
            notes: Vec::new(),
            verdict: None,
        }
    }

    pub fn answer(result: Value, verdict: bool) -> Self {
        Self {
            verdict: Some(verdict),
            ..Self::ok(result)
        }
    }

    pub fn inconclusive(result: Value, notes: Vec<String>) -> Self {
        Self {
            result,
            status: Status::Inconclusive,
            notes,
            verdict: None,
        }
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes.extend(notes);
        self
    }
}

pub struct Report {
    pub command: &'static str,
    pub inputs: BTreeMap<&'static str, Value>,
    pub outcome: Outcome,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let inputs: Map<String, Value> = self.inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        json!({
            "command": self.command,
            "inputs": inputs,
            "result": self.outcome.result,
            "status": self.outcome.status.label(),
            "notes": self.outcome.notes,
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report is plain JSON");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.outcome.status.label());
        if let Value::Object(fields) = &self.outcome.result {
            for (key, value) in fields {
                out.push_str(&format!("  {key}: {}\n", text(value)));
            }
        }
        for note in &self.outcome.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
        out
    }
}

fn text(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(Value::is_string) => {
            let parts: Vec<&str> = items.iter().filter_map(Value::as_str).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

pub fn num(n: &Nat) -> Value {
    Value::String(n.to_string())
}

pub fn nums<'a>(values: impl IntoIterator<Item = &'a Nat>) -> Value {
    Value::Array(values.into_iter().map(num).collect())
}

pub fn count(n: impl ToString) -> Value {
    Value::String(n.to_string())
}

pub fn factorization(f: &Factorization) -> Value {
    f.factors()
        .iter()
        .map(|(p, e)| json!({ "prime": num(p), "exponent": count(e) }))
        .collect()
}
