//! Run reports, JSON and CSV emission.
//!
//! Non-finite numbers are written as the strings `"inf"`, `"-inf"` and
//! `"nan"` in both formats; finite numbers use shortest round-trip
//! decimal form, so parsing a report back reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::checks::CheckReport;
use crate::error::{Error, Result};
use crate::growth::{GrowthSample, RateEstimate};
use crate::params::ComparisonConstants;

/// Serde adapter writing non-finite `f64` as sentinel strings.
pub mod sentinel {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct SentinelVisitor;

    impl Visitor<'_> for SentinelVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => other
                    .parse()
                    .map_err(|_| E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(SentinelVisitor)
    }
}

/// Sharp constants of a parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBlock {
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1_sharp: f64,
    #[serde(flatten)]
    pub comparison: ComparisonConstants,
}

/// A named scalar result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    #[serde(with = "sentinel")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// Echo of the effective configuration.
    pub config: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub constants: Option<ConstantsBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rate: Option<RateEstimate>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub samples: Vec<GrowthSample>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub measurements: Vec<Measurement>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<String>,
    pub passed: bool,
    /// Quantities and relations the run relied on.
    pub provenance: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            config: BTreeMap::new(),
            constants: None,
            checks: Vec::new(),
            rate: None,
            samples: Vec::new(),
            measurements: Vec::new(),
            verdict: None,
            passed: true,
            provenance: Vec::new(),
        }
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.push(Measurement {
            name: name.into(),
            value,
        });
    }

    /// Appends a check and folds its outcome into `passed`.
    pub fn push_check(&mut self, check: CheckReport) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut file = File::create(path)?;
        file.write_all(self.to_json()?.as_bytes())?;
        file.write_all(b"\n")?;
        Ok(())
    }
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], sink: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Precondition("nothing to write: payload is empty".into()));
    }
    let mut writer = csv::Writer::from_writer(sink);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes rows as CSV with a header row; an empty payload is an error.
pub fn emit_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Precondition("nothing to write: payload is empty".into()));
    }
    write_rows(rows, File::create(path)?)
}

/// CSV text for rows, as written by [`emit_csv`].
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}
