//! Pass/fail reports shared by the verification harnesses.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub kind: String,
    pub passed: bool,
    pub clauses: Vec<Clause>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub data: Map<String, Value>,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Report { kind: kind.to_string(), passed: true, clauses: Vec::new(), flags: Vec::new(), data: Map::new() }
    }

    pub fn clause(&mut self, name: &str, passed: bool, detail: Option<Value>) -> &mut Self {
        self.passed &= passed;
        self.clauses.push(Clause { name: name.to_string(), passed, detail });
        self
    }

    pub fn flag(&mut self, flag: &str) -> &mut Self {
        self.flags.push(flag.to_string());
        self
    }

    pub fn data(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.data.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}
