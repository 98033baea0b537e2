//! File formats and subcommands of the `logtrop` command-line tool. Every
//! command returns a JSON value; keys are sorted and rationals print as
//! reduced `"p/q"` strings.

pub mod commands;
pub mod schema;

use std::fmt;

use logtrop::{Int, Rat};
use num_traits::ToPrimitive;
use serde_json::Value;

/// Exit code 2: input does not parse or violates a structural precondition.
pub const EXIT_SCHEMA: i32 = 2;
/// Exit code 3: outside the computational capabilities (rank caps).
pub const EXIT_CAPABILITY: i32 = 3;
/// Exit code 4: the data do not determine the requested verdict.
pub const EXIT_REFUSED: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn schema(m: impl Into<String>) -> CliError {
        CliError { code: EXIT_SCHEMA, message: m.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<logtrop::Error> for CliError {
    fn from(e: logtrop::Error) -> CliError {
        let code = match e {
            logtrop::Error::Capability(_) => EXIT_CAPABILITY,
            _ => EXIT_SCHEMA,
        };
        CliError { code, message: e.to_string() }
    }
}

/// A command's report and the exit code it asks for.
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

pub fn int(x: &Int) -> Value {
    match x.to_i64() {
        Some(i) => Value::from(i),
        None => Value::from(x.to_string()),
    }
}

pub fn ints(xs: &[Int]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn rat(x: &Rat) -> Value {
    Value::from(x.to_string())
}

pub fn rats(xs: &[Rat]) -> Value {
    Value::Array(xs.iter().map(rat).collect())
}

/// One `path<TAB>value` line per leaf.
pub fn table(v: &Value) -> String {
    fn walk(v: &Value, path: String, out: &mut Vec<String>) {
        match v {
            Value::Object(m) if !m.is_empty() => {
                for (k, x) in m {
                    let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                    walk(x, p, out);
                }
            }
            Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in a.iter().enumerate() {
                    walk(x, format!("{path}[{i}]"), out);
                }
            }
            Value::String(s) => out.push(format!("{path}\t{s}")),
            other => out.push(format!("{path}\t{other}")),
        }
    }
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out.join("\n")
}
