use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{Command, Params};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub v: usize,
    pub e: usize,
    pub b: i64,
    pub degree: i64,
    pub value: Value,
}

impl Row {
    pub fn check(v: usize, e: usize, b: i64, degree: i64, ok: bool, detail: String) -> Row {
        let status = if ok { "pass" } else { "FAIL" };
        Row { v, e, b, degree, value: Value::String(format!("{status} {detail}")) }
    }

    pub fn failed(&self) -> bool {
        matches!(&self.value, Value::String(s) if s.starts_with("FAIL"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: Command,
    pub params: Params,
    pub rows: Vec<Row>,
    /// Wall-clock seconds of the run that produced the rows.
    pub timing: f64,
}

impl ResultRecord {
    pub fn passed(&self) -> bool {
        !self.rows.iter().any(Row::failed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,e,b,degree,value\n");
        for r in &self.rows {
            let value = match &r.value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{},{},{},{},{}\n", r.v, r.e, r.b, r.degree, csv_field(&value)));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
