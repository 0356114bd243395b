use super::Instance;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("instance parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported schema_version {found} (this build reads version {expected})")]
    SchemaVersion { found: u32, expected: u32 },
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    schema_version: u32,
    #[serde(flatten)]
    instance: Instance,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize)]
struct InstanceFileOut<'a> {
    schema_version: u32,
    #[serde(flatten)]
    instance: &'a Instance,
}

/// Parses an instance document. Unknown top-level fields are accepted and logged.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(InstanceError::SchemaVersion { found: file.schema_version, expected: SCHEMA_VERSION });
    }
    for key in file.extra.keys() {
        log::warn!("ignoring unknown instance field `{key}`");
    }
    Ok(file.instance)
}

pub fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFileOut { schema_version: SCHEMA_VERSION, instance: inst })
        .expect("instance serializes")
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })?;
    parse_instance(&text)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    let path = path.as_ref();
    std::fs::write(path, to_json(inst) + "\n")
        .map_err(|source| InstanceError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::example1;

    #[test]
    fn round_trip_example1() {
        let inst = example1();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ex1.json");
        save_instance(&inst, &path).unwrap();
        assert_eq!(load_instance(&path).unwrap(), inst);
    }

    #[test]
    fn missing_jobs_names_field() {
        let text = r#"{"schema_version":1,"machine_groups":[{"id":1,"capacity":1}],"horizon":10,"shift_length":2}"#;
        match parse_instance(text) {
            Err(InstanceError::Parse { message, .. }) => {
                assert!(message.contains("jobs"), "{message}")
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_accepted() {
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&example1())).unwrap();
        v["generated_by"] = serde_json::json!("someone else");
        let inst = parse_instance(&v.to_string()).unwrap();
        assert_eq!(inst, example1());
    }

    #[test]
    fn wrong_schema_version() {
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&example1())).unwrap();
        v["schema_version"] = serde_json::json!(99);
        assert!(matches!(parse_instance(&v.to_string()), Err(InstanceError::SchemaVersion { found: 99, .. })));
    }

    #[test]
    fn parse_error_reports_line() {
        let err = parse_instance("{\n\"schema_version\": 1,\n\"jobs\": [ oops ]\n}").unwrap_err();
        match err {
            InstanceError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
