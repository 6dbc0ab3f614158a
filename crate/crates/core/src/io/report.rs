//! Machine-readable and human-readable run reports.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{KitError, KitResult};
use crate::oracle::round12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    /// The check ran and nothing contradicts the claim or question.
    Pass,
    /// A theorem or principle was contradicted.
    Violation,
    /// Some oracle answer was undecided.
    Undecided,
    /// The model does not meet the check's preconditions.
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub operation: String,
    pub inputs: Vec<String>,
    pub status: CheckStatus,
    /// One-line answer for the text format.
    pub answer: String,
    /// Certificate kinds found anywhere in `detail`.
    pub certificates: Vec<String>,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl Record {
    pub fn new(
        operation: impl Into<String>,
        inputs: Vec<String>,
        status: CheckStatus,
        answer: impl Into<String>,
        detail: &impl Serialize,
    ) -> KitResult<Self> {
        let detail = serde_json::to_value(detail).map_err(|e| KitError::Io(e.to_string()))?;
        let mut certificates = Vec::new();
        collect_certificates(&detail, &mut certificates);
        Ok(Record {
            operation: operation.into(),
            inputs,
            status,
            answer: answer.into(),
            certificates,
            detail,
            wall_ms: None,
        })
    }
}

fn collect_certificates(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            if let Some(Value::String(kind)) = map.get("certificate").and_then(|c| c.get("kind")) {
                if !out.contains(kind) {
                    out.push(kind.clone());
                }
            }
            map.values().for_each(|x| collect_certificates(x, out));
        }
        Value::Array(xs) => xs.iter().for_each(|x| collect_certificates(x, out)),
        _ => {}
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub violations: usize,
    pub undecided: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub seed: u64,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Report {
            tool: "ctkit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            seed,
            records: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.summary.checks += 1;
        match r.status {
            CheckStatus::Pass => self.summary.passed += 1,
            CheckStatus::Violation => self.summary.violations += 1,
            CheckStatus::Undecided => self.summary.undecided += 1,
            CheckStatus::Skipped => self.summary.skipped += 1,
        }
        self.records.push(r);
    }

    /// Runs `f` and records its result, timed when `timed`.
    pub fn timed(&mut self, timed: bool, f: impl FnOnce() -> KitResult<Record>) -> KitResult<()> {
        let start = Instant::now();
        let mut r = f()?;
        if timed {
            r.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        self.push(r);
        Ok(())
    }

    /// 0 when every check passed, 1 on any violation, 3 when some check
    /// was undecided.
    pub fn exit_code(&self) -> i32 {
        if self.summary.violations > 0 {
            1
        } else if self.summary.undecided > 0 {
            3
        } else {
            0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round12(x))) {
                *n = x;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_numbers),
        Value::Object(m) => m.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Serializes with sorted keys and every float rounded to 12 significant
/// digits.
pub fn emit_report(report: &Report, format: Format) -> KitResult<Vec<u8>> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(report).map_err(|e| KitError::Io(e.to_string()))?;
            round_numbers(&mut v);
            let mut s = serde_json::to_string_pretty(&v).map_err(|e| KitError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Text => Ok(render_text(report).into_bytes()),
    }
}

fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} (seed {})", r.tool, r.version, r.seed);
    let _ = writeln!(s, "command: {}", r.command.join(" "));
    for rec in &r.records {
        let tag = match rec.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Violation => "VIOLATION",
            CheckStatus::Undecided => "UNDECIDED",
            CheckStatus::Skipped => "SKIPPED",
        };
        let _ = write!(s, "{tag:<9}  {}", rec.operation);
        if !rec.inputs.is_empty() {
            let _ = write!(s, " [{}]", rec.inputs.join(", "));
        }
        let _ = write!(s, ": {}", rec.answer);
        if !rec.certificates.is_empty() {
            let _ = write!(s, " (certificate {})", rec.certificates.join(", "));
        }
        if let Some(ms) = rec.wall_ms {
            let _ = write!(s, " in {ms:.1} ms");
        }
        s.push('\n');
    }
    let m = &r.summary;
    let _ = writeln!(
        s,
        "summary: {} checks, {} passed, {} violations, {} undecided, {} skipped",
        m.checks, m.passed, m.violations, m.undecided, m.skipped
    );
    s
}
