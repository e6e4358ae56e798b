#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

use serde_json::Value;
use sha2::{Digest, Sha256};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub manifest: Value,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }

    pub fn csv(&self) -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_reader(self.stdout.as_bytes());
        let header = r.headers().unwrap().iter().map(String::from).collect();
        std::iter::once(header)
            .chain(
                r.records()
                    .map(|row| row.unwrap().iter().map(String::from).collect()),
            )
            .collect()
    }
}

/// Runs the binary and checks the manifest contract: exactly one manifest
/// line on stderr whose digest matches stdout.
pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_dropkit"))
        .args(args)
        .env(
            "DROPKIT_CACHE_DIR",
            std::env::temp_dir().join("dropkit-cli-tests"),
        )
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let manifests: Vec<Value> = stderr
        .lines()
        .filter_map(|l| serde_json::from_str::<Value>(l).ok())
        .filter(|v| v.get("output_sha256").is_some())
        .collect();
    assert_eq!(manifests.len(), 1, "{args:?}: {stderr}");
    let manifest = manifests.into_iter().next().unwrap();
    assert_eq!(
        manifest["output_sha256"].as_str().unwrap(),
        hex::encode(Sha256::digest(stdout.as_bytes()))
    );
    let code = out.status.code().expect("exited normally");
    assert_eq!(manifest["exit_code"].as_i64().unwrap(), code as i64);
    assert_valid(&manifest, &schema("manifest"));
    Run {
        code,
        stdout,
        stderr,
        manifest,
    }
}

pub fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn assert_valid(value: &Value, schema: &Value) {
    if let Err(e) = check(value, schema, "$") {
        panic!("schema violation: {e}\n{value:#}");
    }
}

/// Checks the keywords the shipped schemas use: type, enum, minimum,
/// properties, required, additionalProperties (false only) and items.
fn check(v: &Value, s: &Value, at: &str) -> Result<(), String> {
    if let Some(t) = s.get("type") {
        let types: Vec<&str> = match t {
            Value::String(t) => vec![t.as_str()],
            Value::Array(ts) => ts.iter().map(|t| t.as_str().unwrap()).collect(),
            _ => return Err(format!("{at}: bad type keyword")),
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            "number" => v.is_number(),
            "integer" => v.is_u64() || v.is_i64(),
            other => panic!("unsupported type {other}"),
        });
        if !ok {
            return Err(format!("{at}: expected {types:?}, got {v}"));
        }
    }
    if let Some(allowed) = s.get("enum").and_then(Value::as_array) {
        if !allowed.contains(v) {
            return Err(format!("{at}: {v} not in {allowed:?}"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{at}: {x} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = s.get("properties").and_then(Value::as_object);
        for key in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(key.as_str().unwrap()) {
                return Err(format!("{at}: missing {key}"));
            }
        }
        for (k, val) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => check(val, sub, &format!("{at}.{k}"))?,
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{at}: unexpected key {k}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            check(x, items, &format!("{at}[{i}]"))?;
        }
    }
    Ok(())
}
