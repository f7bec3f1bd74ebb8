use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    In,
    Out,
    Unknown,
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::In | Outcome::Pass => 0,
            Outcome::Out | Outcome::Fail => 1,
            Outcome::Unknown => 2,
        }
    }

    pub fn from_pass(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub certificates: Value,
    pub outcome: Outcome,
    pub seed: u64,
    pub wall_time: f64,
}

impl RunReport {
    pub fn exit_code(&self) -> u8 {
        self.outcome.exit_code()
    }

    /// Write errors (a closed pipe, say) are ignored.
    pub fn print(&self, format: Format) {
        let text = match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serialises") + "\n",
            Format::Table => self.table(),
        };
        let _ = std::io::stdout().lock().write_all(text.as_bytes());
    }

    fn table(&self) -> String {
        let mut out = format!("command  {}\noutcome  {:?}\nseed     {}\ntime     {:.3}s\n", self.command, self.outcome, self.seed, self.wall_time);
        if let Some(checks) = self.results.get("checks").and_then(Value::as_array) {
            out.push_str(&format!("\n{:>3}  {:<26} {:<5} {:>8}  {}\n", "id", "check", "pass", "seconds", "anchor"));
            for c in checks {
                out.push_str(&format!(
                    "{:>3}  {:<26} {:<5} {:>8.2}  {}\n      {}\n",
                    c["id"].as_u64().unwrap_or(0),
                    c["name"].as_str().unwrap_or(""),
                    if c["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" },
                    c["seconds"].as_f64().unwrap_or(0.0),
                    c["anchor"].as_str().unwrap_or(""),
                    c["detail"].as_str().unwrap_or(""),
                ));
            }
            return out;
        }
        if let Value::Object(map) = &self.results {
            out.push('\n');
            for (k, v) in map {
                out.push_str(&format!("{k:<28} {}\n", compact(v)));
            }
        }
        if !self.certificates.is_null() {
            out.push_str(&format!("{:<28} {}\n", "certificate", compact(&self.certificates)));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 100 {
        format!("{}…", &s[..s.char_indices().nth(99).map_or(s.len(), |(i, _)| i)])
    } else {
        s
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad argument values that clap cannot detect.
    Usage(String),
    /// Input file parsed but malformed or violating a precondition.
    Data(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::Io(_) => 66,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "malformed input: {m}"),
            CliError::Io(m) => write!(f, "cannot read input: {m}"),
        }
    }
}

impl From<cone_lab::Error> for CliError {
    fn from(e: cone_lab::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
