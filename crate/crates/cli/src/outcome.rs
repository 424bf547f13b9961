//! Per-instance verification reports and exit codes.

use fusion_locality::Error;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl From<bool> for Status {
    fn from(b: bool) -> Self {
        if b {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClauseLine {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Cap,
    Precondition,
    Descriptor,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorLine {
    pub kind: ErrorKind,
    pub message: String,
}

impl From<&Error> for ErrorLine {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::CapExceeded { .. } => ErrorKind::Cap,
            Error::Descriptor(_) | Error::NotBijective { .. } => ErrorKind::Descriptor,
            _ => ErrorKind::Precondition,
        };
        ErrorLine { kind, message: e.to_string() }
    }
}

/// The report for one instance under one command.
#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub instance: String,
    pub command: String,
    pub seed: u64,
    pub clauses: Vec<ClauseLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub data: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<ErrorLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl InstanceReport {
    pub fn new(instance: &str, command: &str, seed: u64) -> Self {
        InstanceReport {
            instance: instance.to_string(),
            command: command.to_string(),
            seed,
            clauses: Vec::new(),
            flags: Vec::new(),
            data: Map::new(),
            errors: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn clause(&mut self, name: impl Into<String>, status: impl Into<Status>, witness: Option<Value>) {
        self.clauses.push(ClauseLine { name: name.into(), status: status.into(), witness });
    }

    pub fn flag(&mut self, flag: impl Into<String>) {
        let flag = flag.into();
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }

    pub fn data(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.data.insert(key.into(), value.into());
    }

    pub fn error(&mut self, e: &Error) {
        self.errors.push(e.into());
    }

    /// Records an error raised while checking the named item.
    pub fn error_in(&mut self, item: &str, e: &Error) {
        let mut line = ErrorLine::from(e);
        line.message = format!("{item}: {}", line.message);
        self.errors.push(line);
    }

    /// Moves another report's content in, prefixing clause and data names.
    pub fn absorb(&mut self, prefix: &str, other: InstanceReport) {
        for mut c in other.clauses {
            c.name = format!("{prefix}:{}", c.name);
            self.clauses.push(c);
        }
        for f in other.flags {
            self.flag(f);
        }
        if !other.data.is_empty() {
            self.data.insert(prefix.to_string(), Value::Object(other.data));
        }
        for mut e in other.errors {
            e.message = format!("{prefix}: {}", e.message);
            self.errors.push(e);
        }
    }
}

/// 2 on descriptor or precondition errors, then 1 on any failed clause,
/// then 3 on caps or unknown verdicts, else 0.
pub fn exit_code(reports: &[InstanceReport]) -> i32 {
    let errors = reports.iter().flat_map(|r| &r.errors);
    let clauses = || reports.iter().flat_map(|r| &r.clauses);
    if errors.clone().any(|e| e.kind != ErrorKind::Cap) {
        2
    } else if clauses().any(|c| c.status == Status::Fail) {
        1
    } else if errors.clone().next().is_some() || clauses().any(|c| c.status == Status::Unknown) {
        3
    } else {
        0
    }
}
