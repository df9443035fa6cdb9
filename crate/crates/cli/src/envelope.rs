use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const TOOL: &str = "syz-skeleton";

/// Rounds `x` to 12 significant digits. Integers and non-finite values pass
/// through unchanged.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Recursively rounds floats and rebuilds objects with sorted keys.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => {
            let mut entries: Vec<(String, Value)> = o.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, canonical(v))).collect::<Map<_, _>>())
        }
        other => other,
    }
}

pub fn to_canonical_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(canonical(serde_json::to_value(v).context("serializing")?))
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(v.clone())).expect("values always serialize");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `SOURCE_DATE_EPOCH` when set, so whole envelopes can be reproduced
/// byte for byte; otherwise the current time.
pub fn timestamp() -> String {
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .map_or_else(SystemTime::now, |secs| UNIX_EPOCH + Duration::from_secs(secs));
    humantime::format_rfc3339_seconds(t).to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultEnvelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub timestamp: String,
    pub passed: bool,
    pub payload: Value,
    /// SHA-256 of the canonical payload text.
    pub payload_sha256: String,
}

impl ResultEnvelope {
    pub fn new(command: &str, config: &RunConfig, payload: Value, passed: bool) -> Result<Self> {
        let payload = canonical(payload);
        let digest = sha256_hex(to_canonical_string(&payload).as_bytes());
        Ok(ResultEnvelope {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: to_canonical_value(config)?,
            timestamp: timestamp(),
            passed,
            payload,
            payload_sha256: digest,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(to_canonical_string(&serde_json::to_value(self)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(-0.33087854671116194), -0.330878546711);
        assert_eq!(round_sig(1.4210854715202004e-14), 1.42108547152e-14);
        assert!(round_sig(f64::NAN).is_nan());
    }

    #[test]
    fn keys_are_sorted_and_integers_kept() {
        let v = json!({"b": 1, "a": {"z": 0.1_f64 + 0.2, "c": [3, 2.5]}});
        assert_eq!(
            serde_json::to_string(&canonical(v)).unwrap(),
            r#"{"a":{"c":[3,2.5],"z":0.3},"b":1}"#
        );
    }

    #[test]
    fn checksum_covers_payload_text() {
        let cfg = RunConfig::default();
        let a = ResultEnvelope::new("x", &cfg, json!({"v": 1.0}), true).unwrap();
        let b = ResultEnvelope::new("x", &cfg, json!({"v": 1.0 + 1e-15}), true).unwrap();
        let c = ResultEnvelope::new("x", &cfg, json!({"v": 1.1}), true).unwrap();
        assert_eq!(a.payload_sha256, b.payload_sha256);
        assert_ne!(a.payload_sha256, c.payload_sha256);
        assert_eq!(a.payload_sha256.len(), 64);
    }
}
