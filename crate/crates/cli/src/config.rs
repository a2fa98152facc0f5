//! Scenario loading: defaults, then the JSON file, then `key=value` overrides.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use femtocell_core::engine::Scenario;
use serde_json::{Map, Value};

/// Loads and validates a scenario. `path = None` means pure defaults.
pub fn load_scenario(path: Option<&Path>, overrides: &[String]) -> anyhow::Result<Scenario> {
    let mut tree = serde_json::to_value(Scenario::default())?;
    if let Some(path) = path {
        let text = fs::read_to_string(path).with_context(|| format!("reading scenario {}", path.display()))?;
        if !text.trim().is_empty() {
            let file: Value = serde_json::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))?;
            if !file.is_object() {
                bail!("scenario {} must be a JSON object", path.display());
            }
            merge(&mut tree, file);
        }
    }
    for item in overrides {
        apply_override(&mut tree, item)?;
    }
    from_tree(tree)
}

/// Deserializes a merged tree, reporting the offending key path on failure.
pub fn from_tree(tree: Value) -> anyhow::Result<Scenario> {
    let scenario: Scenario = serde_path_to_error::deserialize(tree).map_err(|e| {
        let path = e.path().to_string();
        anyhow!("invalid scenario at `{path}`: {}", e.into_inner())
    })?;
    scenario.validate().map_err(|e| {
        let key = match &e {
            femtocell_core::Error::InvalidParameter { name, .. } => leaf_paths(name).join(" or "),
            _ => String::new(),
        };
        if key.is_empty() {
            anyhow!("invalid scenario: {e}")
        } else {
            anyhow!("invalid scenario at `{key}`: {e}")
        }
    })?;
    Ok(scenario)
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(base), Value::Object(patch)) => {
            for (k, v) in patch {
                match base.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        base.insert(k, v);
                    }
                }
            }
        }
        (slot, patch) => *slot = patch,
    }
}

fn collect_leaves(prefix: &str, value: &Value, out: &mut Vec<String>) {
    if let Value::Object(map) = value {
        for (k, v) in map {
            let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            if v.is_object() {
                collect_leaves(&path, v, out);
            } else {
                out.push(path);
            }
        }
    }
}

/// Dotted paths of every default leaf named `name`.
fn leaf_paths(name: &str) -> Vec<String> {
    let tree = serde_json::to_value(Scenario::default()).expect("defaults serialize");
    let mut leaves = Vec::new();
    collect_leaves("", &tree, &mut leaves);
    leaves
        .into_iter()
        .filter(|p| p == name || p.ends_with(&format!(".{name}")))
        .collect()
}

/// Resolves an override key to a dotted path. A bare key resolves to the
/// top-level field of that name, or to the unique leaf ending in it.
fn resolve_key(tree: &Value, key: &str) -> anyhow::Result<String> {
    if key.contains('.') || tree.get(key).is_some() {
        return Ok(key.to_string());
    }
    let mut leaves = Vec::new();
    collect_leaves("", tree, &mut leaves);
    let matches: Vec<&String> = leaves.iter().filter(|p| p.ends_with(&format!(".{key}"))).collect();
    match matches.as_slice() {
        [one] => Ok((*one).clone()),
        [] => bail!("unknown scenario key `{key}`"),
        many => bail!(
            "ambiguous scenario key `{key}`: use one of {}",
            many.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Applies one `key=value` override. The value is read as JSON, falling back
/// to a plain string.
pub fn apply_override(tree: &mut Value, item: &str) -> anyhow::Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| anyhow!("override `{item}` is not of the form key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        bail!("override `{item}` has an empty key");
    }
    let path = resolve_key(tree, key)?;
    let mut node = &mut *tree;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let map: &mut Map<String, Value> = node
            .as_object_mut()
            .ok_or_else(|| anyhow!("scenario key `{}` is not a section", parts[..i].join(".")))?;
        if i + 1 == parts.len() {
            if !map.contains_key(*part) {
                bail!("unknown scenario key `{path}`");
            }
            map.insert(part.to_string(), parse_value(raw.trim()));
            return Ok(());
        }
        node = map.get_mut(*part).ok_or_else(|| anyhow!("unknown scenario key `{path}`"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overrides(items: &[&str]) -> anyhow::Result<Scenario> {
        let items: Vec<String> = items.iter().map(|s| s.to_string()).collect();
        load_scenario(None, &items)
    }

    #[test]
    fn defaults_without_file() {
        assert_eq!(overrides(&[]).unwrap(), Scenario::default());
    }

    #[test]
    fn bare_and_dotted_keys() {
        let s = overrides(&["gamma_macro_db=10", "n_femto=12", "channel.shadow_sigma_db=6"]).unwrap();
        assert_eq!(s.gamma_macro_db, 10.0);
        assert_eq!(s.layout.n_femto, 12);
        assert_eq!(s.channel.shadow_sigma_db, 6.0);
    }

    #[test]
    fn string_values_fall_back() {
        let s = overrides(&["power_control=cpc", "macro_sectors.mode=\"90\""]).unwrap();
        assert_eq!(s.power_control, "cpc");
        assert_eq!(s.macro_sectors.n_sectors(), 4);
    }

    #[test]
    fn errors_carry_key_path() {
        let err = overrides(&["n_femto=-1"]).unwrap_err().to_string();
        assert!(err.contains("layout.n_femto"), "{err}");
        let err = overrides(&["no_such_key=1"]).unwrap_err().to_string();
        assert!(err.contains("no_such_key"), "{err}");
        let err = overrides(&["source_activity=0.1"]).unwrap_err().to_string();
        assert!(err.contains("ambiguous"), "{err}");
        let err = overrides(&["phi_macro=2"]).unwrap_err().to_string();
        assert!(err.contains("`phi_macro`"), "{err}");
        let err = overrides(&["layout.bogus=2"]).unwrap_err().to_string();
        assert!(err.contains("layout.bogus"), "{err}");
    }
}
