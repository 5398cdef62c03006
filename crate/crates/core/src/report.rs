//! Report envelopes: a versioned header kept apart from the content, JSON
//! helpers for non-finite reals, and atomic file output.

use std::io::Write;
use std::path::Path;
use std::time::SystemTime;

use serde::{Serialize, Serializer};

use crate::error::Result;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub schema_version: String,
    pub generator: String,
    pub command: String,
    pub timestamp: String,
}

impl Header {
    pub fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            generator: format!("modspace {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            timestamp: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
        }
    }
}

/// A report together with its header.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub header: Header,
    pub report: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, report: T) -> Self {
        Self {
            header: Header::new(command),
            report,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Serializes finite reals as numbers, infinities as `"inf"`/`"-inf"`, NaN as null.
pub fn real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_none()
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// [`real`] applied elementwise.
pub fn reals<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct R(f64);
    impl Serialize for R {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            real(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&R(x))?;
    }
    seq.end()
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::env::current_dir()?,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Formats a real for CSV output (`inf` for infinities).
pub fn csv_real(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}
