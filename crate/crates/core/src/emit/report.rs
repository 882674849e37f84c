//! JSON report of configurations.
//!
//! ```json
//! [
//!   [ { "path": "pvx", "implementation": "BoolVar" }, ... ],
//!   ...
//!   { "count": 2 }
//! ]
//! ```
//!
//! One array per configuration, entries sorted by path, then a summary object.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configuration::Configuration;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Entry {
    path: String,
    implementation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Item {
    Configuration(Vec<Entry>),
    Summary { count: usize },
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("report must end with a summary object")]
    MissingSummary,
    #[error("summary count {stated} does not match {actual} configurations")]
    CountMismatch { stated: usize, actual: usize },
    #[error("duplicate path '{0}' in a configuration")]
    DuplicatePath(String),
}

pub fn emit_report(configurations: &[Configuration]) -> String {
    let mut items: Vec<Item> = configurations
        .iter()
        .map(|c| {
            Item::Configuration(
                c.iter()
                    .map(|(path, implementation)| Entry {
                        path: path.to_string(),
                        implementation: implementation.to_string(),
                    })
                    .collect(),
            )
        })
        .collect();
    items.push(Item::Summary {
        count: configurations.len(),
    });
    let mut text = serde_json::to_string_pretty(&items).expect("report serializes");
    text.push('\n');
    text
}

pub fn parse_report(text: &str) -> Result<Vec<Configuration>, ReportError> {
    let mut items: Vec<Item> = serde_json::from_str(text)?;
    let Some(Item::Summary { count }) = items.pop() else {
        return Err(ReportError::MissingSummary);
    };
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let Item::Configuration(entries) = item else {
            return Err(ReportError::MissingSummary);
        };
        let mut config = Configuration::default();
        for e in entries {
            if config.get(&e.path).is_some() {
                return Err(ReportError::DuplicatePath(e.path));
            }
            config.insert(e.path, e.implementation);
        }
        out.push(config);
    }
    if out.len() != count {
        return Err(ReportError::CountMismatch {
            stated: count,
            actual: out.len(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty() {
        let text = emit_report(&[]);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v, serde_json::json!([{ "count": 0 }]));
        assert!(parse_report(&text).unwrap().is_empty());
    }

    #[test]
    fn singleton_has_one_object_per_path() {
        let config: Configuration = [("b", "B"), ("a", "A")]
            .iter()
            .map(|(p, i)| (p.to_string(), i.to_string()))
            .collect();
        let text = emit_report(&[config]);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(
            v,
            serde_json::json!([
                [{ "path": "a", "implementation": "A" }, { "path": "b", "implementation": "B" }],
                { "count": 1 }
            ])
        );
        // key order within an entry is stable: path first
        assert!(text.find("\"path\"").unwrap() < text.find("\"implementation\"").unwrap());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse_report("[]"), Err(ReportError::MissingSummary)));
        assert!(matches!(
            parse_report("[{\"count\": 3}]"),
            Err(ReportError::CountMismatch { .. })
        ));
        assert!(parse_report("{").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(configs in proptest::collection::vec(
            proptest::collection::btree_map("[a-z][a-z0-9=/_]{0,12}", "[A-Z][A-Za-z]{0,8}", 0..6), 0..5)) {
            let configs: Vec<Configuration> = configs.into_iter().map(Configuration).collect();
            let text = emit_report(&configs);
            prop_assert_eq!(parse_report(&text).unwrap(), configs.clone());
            prop_assert_eq!(emit_report(&configs), text);
        }
    }
}
