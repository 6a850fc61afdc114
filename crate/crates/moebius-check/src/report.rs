//! JSON report structure with deterministic float formatting.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A float serialized with 17 significant digits, enough to round-trip f64
/// exactly; non-finite values become strings since JSON has no literal for
/// them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0))
                .map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_str(&format!("{}", self.0))
        }
    }
}

/// One tracked residual or quantity: grid extrema plus the bound it is held
/// to, if any.
#[derive(Debug, Serialize)]
pub struct NamedStat {
    pub name: String,
    pub min: Num,
    pub max: Num,
    pub mean: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<Num>,
    pub bound: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub points: usize,
    pub wall_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub residuals: Vec<NamedStat>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub examples: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<String>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// Running min/max/mean accumulator for one named statistic.
pub struct StatAcc {
    name: String,
    min: f64,
    max: f64,
    sum: f64,
    count: usize,
    tol: Option<f64>,
    bound: &'static str,
}

impl StatAcc {
    pub fn new(name: &str, tol: Option<f64>, bound: &'static str) -> StatAcc {
        StatAcc {
            name: name.to_string(),
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            sum: 0.0,
            count: 0,
            tol,
            bound,
        }
    }

    pub fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.sum += v;
        self.count += 1;
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Whether every pushed value respects the bound. Unbounded stats pass
    /// vacuously; a bounded stat with no data fails.
    pub fn ok(&self) -> bool {
        match (self.tol, self.bound) {
            (Some(t), "upper") => self.count > 0 && self.max <= t,
            (Some(t), "lower") => self.count > 0 && self.min >= t,
            _ => true,
        }
    }

    pub fn stat(&self) -> NamedStat {
        let (min, max, mean) = if self.count == 0 {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            (self.min, self.max, self.sum / self.count as f64)
        };
        NamedStat {
            name: self.name.clone(),
            min: Num(min),
            max: Num(max),
            mean: Num(mean),
            tol: self.tol.map(Num),
            bound: self.bound,
        }
    }
}
