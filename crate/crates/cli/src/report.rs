//! Report records and their table, JSON and CSV renderings.
//!
//! Object keys are emitted in sorted order and nothing time-dependent is
//! recorded, so identical inputs render to identical bytes.

use serde::Serialize;
use serde_json::Value;

pub const FORMAT_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    pub kind: String,
    pub inputs: Value,
    pub values: Value,
    pub passed: bool,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    /// A record for a check that could not be evaluated.
    pub fn failed(
        id: String,
        kind: &str,
        inputs: Value,
        tolerance: Option<f64>,
        error: String,
    ) -> Self {
        Self {
            id,
            kind: kind.to_string(),
            inputs,
            values: Value::Object(Default::default()),
            passed: false,
            tolerance,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub format_version: String,
    pub command: String,
    pub seed: u64,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, seed: u64, records: Vec<Record>) -> Self {
        let passed = records.iter().filter(|r| r.passed).count();
        Self {
            format_version: FORMAT_VERSION.to_string(),
            command: command.to_string(),
            seed,
            summary: Summary {
                passed,
                failed: records.len() - passed,
                total: records.len(),
            },
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        // Round-tripping through `Value` sorts every object's keys.
        let value = serde_json::to_value(self).expect("report is serializable");
        let mut out = serde_json::to_string_pretty(&value).expect("value is serializable");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record([
            "id",
            "kind",
            "passed",
            "tolerance",
            "error",
            "inputs",
            "values",
        ])
        .expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.id.clone(),
                r.kind.clone(),
                r.passed.to_string(),
                r.tolerance.map(|t| t.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
                r.inputs.to_string(),
                r.values.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
    }

    /// Human-readable listing. Scalar values and short numeric vectors are
    /// shown; long tables (such as per-outcome rows) are left to JSON/CSV.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let status = if r.passed { "PASS" } else { "FAIL" };
            let tol = r
                .tolerance
                .map(|t| format!("  tol={t:e}"))
                .unwrap_or_default();
            out.push_str(&format!("[{status}] {} ({}){tol}\n", r.id, r.kind));
            if let Value::Object(values) = &r.values {
                for (k, v) in values {
                    if let Some(text) = short_value(v) {
                        out.push_str(&format!("    {k} = {text}\n"));
                    }
                }
            }
            if let Some(e) = &r.error {
                out.push_str(&format!("    error: {e}\n"));
            }
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} total\n",
            self.summary.passed, self.summary.failed, self.summary.total
        ));
        out
    }
}

fn short_value(v: &Value) -> Option<String> {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => {
            Some(v.to_string().trim_matches('"').to_string())
        }
        Value::Number(n) => Some(format_number(n.as_f64()?)),
        Value::Array(items) if items.len() <= 3 && items.iter().all(Value::is_number) => {
            let parts: Vec<String> = items
                .iter()
                .filter_map(Value::as_f64)
                .map(format_number)
                .collect();
            Some(format!("({})", parts.join(", ")))
        }
        Value::Array(items) if items.len() <= 4 && items.iter().all(Value::is_string) => Some(
            items
                .iter()
                .filter_map(Value::as_str)
                .collect::<Vec<_>>()
                .join(", "),
        ),
        _ => None,
    }
}

fn format_number(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x}")
    } else if x.abs() < 1e-4 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

/// JSON number for a float; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn vec3(v: [f64; 3]) -> Value {
    Value::Array(v.into_iter().map(num).collect())
}
