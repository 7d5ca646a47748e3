use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    fn new(name: impl Into<String>, status: Status, measured: Option<f64>, threshold: Option<f64>) -> Self {
        Self { name: name.into(), status, measured, threshold, note: String::new() }
    }

    /// Pass iff measured ≤ threshold; a NaN measurement is undefined.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let status = if measured.is_nan() {
            Status::Undefined
        } else if measured <= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        Self::new(name, status, Some(measured), Some(threshold))
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let status = if measured.is_nan() {
            Status::Undefined
        } else if measured >= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        Self::new(name, status, Some(measured), Some(threshold))
    }

    /// A check whose verdict is not a single comparison of `measured`.
    pub fn judged(name: impl Into<String>, ok: bool, measured: f64, threshold: f64) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail }, Some(measured), Some(threshold))
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail }, None, None)
    }

    pub fn skipped(name: impl Into<String>) -> Self {
        Self::new(name, Status::Skipped, None, None)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Skipped)
    }
}

/// One machine-readable record per run. No timestamps, so identical inputs
/// give identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    /// The run configuration as TOML.
    pub config: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub details: serde_json::Value,
}

impl ResultRecord {
    pub fn new(command: &str, seed: u64, config: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            config,
            checks: Vec::new(),
            warnings: Vec::new(),
            details: serde_json::Value::Object(Default::default()),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("detail values are plain data");
        self.details.as_object_mut().expect("details is an object").insert(key.to_string(), v);
    }

    /// The exit-code contract: every non-skipped check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}
