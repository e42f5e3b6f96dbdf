use serde_json::{json, Map, Value};
use toric_gs::Error;

use crate::args::Format;

/// Result of one command, before rendering.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub diagnostics: Value,
    pub seed: Option<u64>,
}

impl RunReport {
    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("command".into(), json!(self.command));
        map.insert("inputs".into(), self.inputs.clone());
        map.insert("results".into(), self.results.clone());
        map.insert("diagnostics".into(), self.diagnostics.clone());
        map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        if let Some(seed) = self.seed {
            map.insert("seed".into(), json!(seed));
        }
        let mut v = Value::Object(map);
        normalize(&mut v);
        v
    }
}

/// Replaces `-0.0` by `0.0` so equal values print identically.
fn normalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.as_f64() == Some(0.0) && n.is_f64() => *v = json!(0.0),
        Value::Array(xs) => xs.iter_mut().for_each(normalize),
        Value::Object(m) => m.values_mut().for_each(normalize),
        _ => {}
    }
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(x, format!("{path}/{k}"), out);
            }
        }
        Value::Array(xs) if !xs.is_empty() => {
            for (i, x) in xs.iter().enumerate() {
                flatten(x, format!("{path}/{i}"), out);
            }
        }
        Value::String(s) => out.push((path, s.replace('|', "\\|"))),
        other => out.push((path, other.to_string())),
    }
}

fn table(title: &str, v: &Value) -> String {
    let mut rows = Vec::new();
    flatten(v, String::new(), &mut rows);
    let mut s = format!("## {title}\n\n| key | value |\n|---|---|\n");
    for (k, x) in rows {
        s.push_str(&format!("| {k} | {x} |\n"));
    }
    s
}

pub fn render(report: &RunReport, format: Format) -> String {
    let v = report.to_value();
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Md => {
            let mut s = format!("# toric-gs {}\n\nversion {}", report.command, v["version"].as_str().unwrap_or(""));
            if let Some(seed) = report.seed {
                s.push_str(&format!(", seed {seed}"));
            }
            s.push_str("\n\n");
            s.push_str(&table("Results", &v["results"]));
            s.push('\n');
            s.push_str(&table("Diagnostics", &v["diagnostics"]));
            s.push_str("\n## Inputs\n\n```json\n");
            s.push_str(&serde_json::to_string_pretty(&v["inputs"]).expect("inputs serialize"));
            s.push_str("\n```\n");
            s
        }
    }
}

/// Everything that ends a run without a report.
#[derive(Debug)]
pub enum Failure {
    /// Help or version text for stdout.
    Display(String),
    UnknownCommand(String),
    Usage(String),
    /// A library error, with the flag or input it came from.
    Library { source: String, error: Error },
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure::Usage(message.into())
    }

    pub fn input(source: &str, error: Error) -> Failure {
        Failure::Library {
            source: source.to_string(),
            error,
        }
    }

    pub fn from_clap(e: clap::Error) -> Failure {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Failure::Display(e.to_string()),
            ErrorKind::InvalidSubcommand => Failure::UnknownCommand(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Display(_) => 0,
            Failure::Library { error, .. } if error.is_numerical() => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let body = match self {
            Failure::Display(text) => json!({ "kind": "Display", "message": text }),
            Failure::UnknownCommand(m) => json!({ "kind": "UnknownCommand", "message": m.trim() }),
            Failure::Usage(m) => json!({ "kind": "SchemaViolation", "message": m.trim() }),
            Failure::Library { source, error } => {
                let kind = if error.is_numerical() {
                    "NumericalFailure"
                } else {
                    "SchemaViolation"
                };
                let mut body = json!({
                    "kind": kind,
                    "tag": error.tag(),
                    "source": source,
                    "message": error.to_string(),
                });
                if let Error::Schema { pointer, .. } = error {
                    body["pointer"] = json!(pointer);
                }
                body
            }
        };
        json!({ "error": body }).to_string()
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Failure {
        Failure::Library {
            source: "run".into(),
            error,
        }
    }
}
