//! Effective configuration: command defaults, merged with the config file,
//! then with flags and `--set` overrides, then strictly deserialized.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Sets a dotted key such as `params.coarse_dx`.
fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), CliError> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::validation(format!("override key `{key}` has an empty component")));
        }
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        let Value::Object(map) = node else {
            return Err(CliError::validation(format!(
                "override key `{key}`: `{}` is not an object",
                parts[..depth].join(".")
            )));
        };
        if depth + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert(Value::Null);
    }
    unreachable!("split yields at least one component")
}

/// `key=value`, with the value read as JSON when it parses and as a string otherwise.
pub fn parse_override(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::validation(format!("override `{s}` is not of the form key=value")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

pub fn load<T: DeserializeOwned + Serialize + Default>(
    path: Option<&Path>,
    overrides: &[(String, Value)],
) -> Result<T, CliError> {
    let mut value = serde_json::to_value(T::default()).expect("defaults serialize");
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::validation(format!("config {}: {e}", p.display())))?;
        let file: Value =
            serde_json::from_str(&text).map_err(|e| CliError::validation(format!("config {}: {e}", p.display())))?;
        if !file.is_object() {
            return Err(CliError::validation(format!("config {}: top level must be an object", p.display())));
        }
        merge(&mut value, file);
    }
    for (k, v) in overrides {
        set_path(&mut value, k, v.clone())?;
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::validation(format!("config: {inner}"))
        } else {
            CliError::validation(format!("config key `{path}`: {inner}"))
        }
    })
}

/// SHA-256 of the compact JSON form of the effective config.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields, default)]
    struct Inner {
        a: f64,
        b: u32,
    }

    #[derive(Debug, Serialize, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields, default)]
    struct Outer {
        name: String,
        inner: Inner,
        list: Vec<f64>,
    }

    impl Default for Inner {
        fn default() -> Self {
            Inner { a: 1.5, b: 2 }
        }
    }

    impl Default for Outer {
        fn default() -> Self {
            Outer {
                name: "x".into(),
                inner: Inner::default(),
                list: vec![1.0],
            }
        }
    }

    #[test]
    fn overrides_keep_sibling_defaults() {
        let o = vec![parse_override("inner.b=7").unwrap(), parse_override("list=[2,3]").unwrap()];
        let c: Outer = load(None, &o).unwrap();
        assert_eq!(c.inner, Inner { a: 1.5, b: 7 });
        assert_eq!(c.list, vec![2.0, 3.0]);
    }

    #[test]
    fn plain_strings_and_unknown_keys() {
        let c: Outer = load(None, &[parse_override("name=indicator:1,2").unwrap()]).unwrap();
        assert_eq!(c.name, "indicator:1,2");
        let err = load::<Outer>(None, &[parse_override("inner.zzz=1").unwrap()]).unwrap_err();
        assert!(err.to_string().contains("zzz"), "{err}");
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = Outer::default();
        let mut b = Outer::default();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.inner.b = 3;
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
