//! JSON-lines verdict records. The first line of every verdict file is a
//! header carrying the effective configuration, so a file can be re-checked
//! on its own.

use serde::{Deserialize, Serialize};

use crate::conditions::{ConditionVerdict, Status, Witness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Header(Header),
    Check(CheckRecord),
    Oracle(OracleRecord),
    Regime(RegimeRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: String,
    /// Whether this record decides the exit code. Diagnostic comparisons
    /// are reported but do not gate.
    pub gating: bool,
    pub min_margin: f64,
    pub margin_tol: f64,
    pub pairs_tested: u64,
    pub resolution: (usize, usize),
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_pair: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortcut: Option<bool>,
}

impl CheckRecord {
    pub fn from_verdict(check: &str, v: &ConditionVerdict, gating: bool) -> Self {
        Self {
            check: check.to_string(),
            status: v.status.as_str().to_string(),
            gating,
            min_margin: v.min_margin,
            margin_tol: v.margin_tol,
            pairs_tested: v.pairs_tested,
            resolution: v.resolution,
            witnesses: v.witnesses.clone(),
            witness_pair: None,
            shortcut: None,
        }
    }

    /// Gating records fail on a violated condition or a suboptimality witness.
    pub fn fails(&self) -> bool {
        self.gating && (self.status == Status::Violated.as_str() || self.status == "WITNESS_FOUND")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub states: Vec<f64>,
    pub prior: Vec<f64>,
    pub verdict: String,
    pub margin: f64,
    pub envelope_value: f64,
    pub full_disclosure_value: f64,
    pub pooled_value: f64,
    pub samples: usize,
    pub min_gain: f64,
    pub worst_pair: (f64, f64),
    pub worst_p_low: f64,
    pub pooling_improves: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRecord {
    pub gamma: f64,
    pub rho: f64,
    pub delta: f64,
    pub kappa: f64,
    /// `OPTIMAL`, `SUBOPTIMAL`, `INCONCLUSIVE` or `EXCLUDED`.
    pub regime: String,
    pub validated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_status: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subopt_outcome: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agrees: Option<bool>,
}

/// Structural equality with a relative tolerance on numbers.
pub fn values_match(a: &serde_json::Value, b: &serde_json::Value, rel_tol: f64) -> bool {
    use serde_json::Value::*;
    match (a, b) {
        (Number(x), Number(y)) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) => x == y || (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1e-300),
            _ => x == y,
        },
        (Array(x), Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| values_match(p, q, rel_tol)),
        (Object(x), Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| values_match(v, w, rel_tol)))
        }
        _ => a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn records_round_trip_through_json() {
        let r = Record::Regime(RegimeRecord {
            gamma: 0.5,
            rho: 0.0,
            delta: 0.5,
            kappa: 0.5,
            regime: "OPTIMAL".into(),
            validated: true,
            weak_status: Some("HOLDS_STRICTLY".into()),
            subopt_outcome: Some("NONE_FOUND".into()),
            agrees: Some(true),
        });
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.starts_with(r#"{"kind":"regime""#));
        assert_eq!(serde_json::from_str::<Record>(&line).unwrap(), r);
    }

    #[test]
    fn tolerant_comparison() {
        assert!(values_match(&json!({"a": [1.0, "x"]}), &json!({"a": [1.0 + 1e-15, "x"]}), 1e-12));
        assert!(!values_match(&json!({"a": 1.0}), &json!({"a": 1.1}), 1e-12));
        assert!(!values_match(&json!({"a": 1.0}), &json!({"a": 1.0, "b": 2}), 1e-12));
        assert!(!values_match(&json!("HOLDS"), &json!("VIOLATED"), 1e-12));
    }

    #[test]
    fn only_gating_failures_count() {
        let mut r = CheckRecord {
            check: "weak".into(),
            status: "VIOLATED".into(),
            gating: false,
            min_margin: -1.0,
            margin_tol: 0.0,
            pairs_tested: 1,
            resolution: (2, 2),
            witnesses: vec![],
            witness_pair: None,
            shortcut: None,
        };
        assert!(!r.fails());
        r.gating = true;
        assert!(r.fails());
        r.status = "NONE_FOUND".into();
        assert!(!r.fails());
    }
}
