//! Verification reports and number formatting.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Format like C's `%.12g`: twelve significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { "-" } else { "+" }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to twelve significant digits.
pub fn round12(x: f64) -> f64 {
    sig12(x).parse().unwrap_or(x)
}

/// SHA-256 over the inputs, each prefixed by its length.
pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub witness: Value,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, pass: bool, witness: Value) -> CheckResult {
        CheckResult { name: name.into(), pass, witness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub checks: Vec<CheckResult>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs_digest: String) -> Report {
        Report { command: command.into(), inputs_digest, checks: Vec::new(), result: Value::Null, timing_ms: None }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, witness: Value) {
        self.checks.push(CheckResult::new(name, pass, witness));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_canonical_json(self)
    }

    /// Plain-text rendering: a header, one line per check, then the result.
    pub fn to_text(&self) -> String {
        let mut out =
            format!("{}  (inputs {})\n", self.command, &self.inputs_digest[..12.min(self.inputs_digest.len())]);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            out.push_str(&format!("  {:<width$}  {}", c.name, if c.pass { "pass" } else { "FAIL" }));
            if !c.witness.is_null() {
                out.push_str(&format!("  {}", compact(&c.witness)));
            }
            out.push('\n');
        }
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                out.push_str(&format!("{k}: {}\n", compact(v)));
            }
        } else if !self.result.is_null() {
            out.push_str(&format!("{}\n", compact(&self.result)));
        }
        if let Some(ms) = self.timing_ms {
            out.push_str(&format!("time: {} ms\n", sig12(ms)));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(2.0_f64.sqrt()), "1.41421356237");
        assert_eq!(sig12(-0.5), "-0.5");
        assert_eq!(sig12(1e-7), "1e-07");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(sig12(9.9999999999999), "10");
        assert_eq!(sig12(0.0001), "0.0001");
        assert_eq!(round12(0.1 + 0.2), 0.3);
    }

    #[test]
    fn digest_separates_inputs() {
        assert_ne!(digest(&[b"ab", b"c"]), digest(&[b"a", b"bc"]));
        assert_eq!(digest(&[b"x"]).len(), 64);
    }
}
