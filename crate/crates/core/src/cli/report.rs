//! Scenario reports and their bit-stable serialisation.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Undetermined => "undetermined",
        })
    }
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// A constant or verdict given with the worked example.
    Stated,
    /// Computed independently (oracle, brute force, direct iteration).
    Derived,
    /// Follows from the definitions.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub params: Map<String, Value>,
    pub checks: Vec<Check>,
    pub details: Map<String, Value>,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.into(),
            params: Map::new(),
            checks: Vec::new(),
            details: Map::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }

    /// Records a check that passes when `actual == expected`.
    pub fn expect(&mut self, label: &str, expected: impl ToString, actual: impl ToString, provenance: Provenance) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let status = if expected == actual { Status::Pass } else { Status::Fail };
        self.checks.push(Check { label: label.into(), expected, actual, status, provenance });
    }

    /// Records a check whose outcome was not decided.
    pub fn undetermined(&mut self, label: &str, expected: impl ToString, actual: impl ToString, provenance: Provenance) {
        self.checks.push(Check {
            label: label.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            status: Status::Undetermined,
            provenance,
        });
    }

    /// Fail if any check failed, else undetermined if any was, else pass.
    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Undetermined) {
            Status::Undetermined
        } else {
            Status::Pass
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scenario": self.scenario,
            "status": self.status(),
            "params": self.params,
            "checks": self.checks,
            "details": self.details,
            "artifacts": self.artifacts,
        })
    }

    /// One row per check.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "status", "expected", "actual", "provenance"]).expect("in-memory write");
        for c in &self.checks {
            let prov = serde_json::to_value(c.provenance).expect("serializable");
            w.write_record([
                c.label.as_str(),
                &c.status.to_string(),
                &c.expected,
                &c.actual,
                prov.as_str().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Pretty JSON with sorted keys (the default map is ordered) and a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => json_text(&report.to_json()),
        Format::Csv => report.to_csv(),
    }
}

pub fn emit(report: &Report, format: Format, path: &Path) -> std::io::Result<()> {
    fs::write(path, render(report, format))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo");
        r.param("seed", 7);
        r.param("alpha", "1/2");
        r.expect("one", "certified", "certified", Provenance::Stated);
        r.expect("two, with comma", 3, 4, Provenance::Derived);
        r
    }

    #[test]
    fn status_rules() {
        let mut r = Report::new("x");
        assert_eq!(r.status(), Status::Pass);
        r.undetermined("u", "yes", "unknown", Provenance::Trivial);
        assert_eq!(r.status(), Status::Undetermined);
        assert_eq!(sample().status(), Status::Fail);
    }

    #[test]
    fn emitted_files_are_stable() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        emit(&sample(), Format::Json, &a).unwrap();
        emit(&sample(), Format::Json, &b).unwrap();
        let text = fs::read_to_string(&a).unwrap();
        assert_eq!(text, fs::read_to_string(&b).unwrap());
        // keys sorted
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"seed\"").unwrap());
        assert!(text.find("\"artifacts\"").unwrap() < text.find("\"checks\"").unwrap());
    }

    #[test]
    fn csv_and_json_carry_the_same_checks() {
        let r = sample();
        let mut from_csv: Vec<(String, String)> = csv::Reader::from_reader(r.to_csv().as_bytes())
            .records()
            .map(|rec| {
                let rec = rec.unwrap();
                (rec[0].to_string(), rec[1].to_string())
            })
            .collect();
        let mut from_json: Vec<(String, String)> = r.to_json()["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| (c["label"].as_str().unwrap().to_string(), c["status"].as_str().unwrap().to_string()))
            .collect();
        from_csv.sort();
        from_json.sort();
        assert_eq!(from_csv, from_json);
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new("empty");
        let v: Value = serde_json::from_str(&render(&r, Format::Json)).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 0);
        assert_eq!(r.to_csv().lines().count(), 1);
    }
}
