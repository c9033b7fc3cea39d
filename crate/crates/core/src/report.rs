//! Serializable outcomes of check runs and their comparison.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::enlarge::BRResult;
use crate::error::{Error, Result};
use crate::optim::lp_calls;
use crate::polar::PolarCertificate;
use crate::space::{ExtReal, PairPoint, Window};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// No counterexample within a bounded search; not a proof.
    BoundedPass,
    Refused,
}

impl Status {
    pub fn is_success(self) -> bool {
        matches!(self, Status::Pass | Status::BoundedPass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// A point with the scalar values that make it a witness.
    Point { label: String, point: PairPoint, values: BTreeMap<String, ExtReal> },
    /// Two points with their monotone product `<p.x - q.x, p.xs - q.xs>`.
    Pair { label: String, p: PairPoint, q: PairPoint, product: f64 },
    PolarCertificate(PolarCertificate),
    /// Two graph points whose midpoint is off the graph.
    Midpoint { a: PairPoint, b: PairPoint, midpoint: PairPoint },
    BrSearch(BRResult),
}

impl Witness {
    pub fn point(label: &str, point: PairPoint, values: &[(&str, ExtReal)]) -> Self {
        Witness::Point {
            label: label.to_string(),
            point,
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    pub evaluations: u64,
    pub lp_calls: u64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub operator: String,
    pub window: Option<Window>,
    pub tolerances: BTreeMap<String, f64>,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub statistics: Statistics,
    pub tool_version: String,
    pub seed: Option<u64>,
    /// Check-specific scalar results (maximum deviations, gaps, minima).
    #[serde(default)]
    pub details: BTreeMap<String, Value>,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// Accumulates a report while a check runs; LP calls and wall time are
/// measured from construction.
pub struct ReportBuilder {
    report: CheckReport,
    started: Instant,
    lp_base: u64,
}

impl ReportBuilder {
    pub fn new(check: &str, operator: &str) -> Self {
        ReportBuilder {
            report: CheckReport {
                check: check.to_string(),
                operator: operator.to_string(),
                window: None,
                tolerances: BTreeMap::new(),
                status: Status::Pass,
                witnesses: Vec::new(),
                statistics: Statistics::default(),
                tool_version: TOOL_VERSION.to_string(),
                seed: None,
                details: BTreeMap::new(),
                notes: Vec::new(),
            },
            started: Instant::now(),
            lp_base: lp_calls(),
        }
    }

    pub fn window(mut self, w: &Window) -> Self {
        self.report.window = Some(w.clone());
        self
    }

    pub fn tol(mut self, name: &str, v: f64) -> Self {
        self.report.tolerances.insert(name.to_string(), v);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.report.seed = Some(seed);
        self
    }

    pub fn evaluations(&mut self, n: u64) {
        self.report.statistics.evaluations += n;
    }

    pub fn witness(&mut self, w: Witness) {
        self.report.witnesses.push(w);
    }

    pub fn witness_count(&self) -> usize {
        self.report.witnesses.len()
    }

    pub fn detail(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        self.report.details.insert(key.to_string(), v);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.report.notes.push(s.into());
    }

    pub fn finish(mut self, status: Status) -> Result<CheckReport> {
        if status == Status::Fail && self.report.witnesses.is_empty() {
            return Err(Error::Internal(format!("{} failed without a witness", self.report.check)));
        }
        self.report.status = status;
        self.report.statistics.lp_calls = lp_calls() - self.lp_base;
        self.report.statistics.wall_time_ms = self.started.elapsed().as_secs_f64() * 1e3;
        Ok(self.report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDiff {
    pub equivalent: bool,
    /// JSON paths of differing fields.
    pub differences: Vec<String>,
}

/// Compares two reports field by field, ignoring wall time. With
/// `verdict_only`, only the check, operator and status are compared.
pub fn report_diff(a: &Value, b: &Value, verdict_only: bool) -> Result<ReportDiff> {
    let ra: CheckReport = serde_json::from_value(a.clone()).map_err(|e| Error::input(format!("first report: {e}")))?;
    let rb: CheckReport = serde_json::from_value(b.clone()).map_err(|e| Error::input(format!("second report: {e}")))?;
    if ra.check != rb.check {
        return Err(Error::input(format!("reports are for different checks: {} vs {}", ra.check, rb.check)));
    }
    let mut differences = Vec::new();
    if verdict_only {
        if ra.operator != rb.operator {
            differences.push("operator".to_string());
        }
        if ra.status != rb.status {
            differences.push("status".to_string());
        }
    } else {
        let mut va = a.clone();
        let mut vb = b.clone();
        for v in [&mut va, &mut vb] {
            if let Some(stats) = v.get_mut("statistics").and_then(Value::as_object_mut) {
                stats.remove("wall_time_ms");
            }
        }
        diff_values("", &va, &vb, &mut differences);
    }
    Ok(ReportDiff { equivalent: differences.is_empty(), differences })
}

fn diff_values(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            for k in keys {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff_values(&p, u, v, out),
                    _ => out.push(p),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{path}[len]"));
                return;
            }
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                diff_values(&format!("{path}[{i}]"), u, v, out);
            }
        }
        _ => {
            if a != b {
                out.push(path.to_string());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(status: Status, seed: u64) -> Value {
        let mut b = ReportBuilder::new("demo", "op").seed(seed).tol("tol", 1e-8);
        b.witness(Witness::point("w", PairPoint::scalar(seed as f64, 0.0), &[("gap", ExtReal::Finite(-1.0))]));
        serde_json::to_value(b.finish(status).unwrap()).unwrap()
    }

    #[test]
    fn fail_requires_witness() {
        assert!(ReportBuilder::new("x", "y").finish(Status::Fail).is_err());
        assert!(ReportBuilder::new("x", "y").finish(Status::Pass).is_ok());
    }

    #[test]
    fn diff_ignores_wall_time() {
        let a = sample(Status::Pass, 1);
        let mut b = a.clone();
        b["statistics"]["wall_time_ms"] = serde_json::json!(12345.0);
        assert!(report_diff(&a, &b, false).unwrap().equivalent);
    }

    #[test]
    fn seeds_differ_but_verdicts_agree() {
        let a = sample(Status::Pass, 1);
        let b = sample(Status::Pass, 2);
        let full = report_diff(&a, &b, false).unwrap();
        assert!(!full.equivalent);
        assert!(full.differences.contains(&"seed".to_string()));
        assert!(report_diff(&a, &b, true).unwrap().equivalent);
    }

    #[test]
    fn pass_vs_fail_names_status() {
        let d = report_diff(&sample(Status::Pass, 1), &sample(Status::Fail, 1), false).unwrap();
        assert_eq!(d.differences, vec!["status".to_string()]);
    }

    #[test]
    fn schema_mismatch_is_input_error() {
        let a = sample(Status::Pass, 1);
        assert!(report_diff(&a, &serde_json::json!({"hello": 1}), false).is_err());
        let mut other = a.clone();
        other["check"] = serde_json::json!("another");
        assert!(report_diff(&a, &other, false).is_err());
    }
}
