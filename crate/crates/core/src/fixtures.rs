//! Small curated seasons with pinned expected values.
//!
//! Each fixture is a season CSV plus a JSON sidecar. Every number in the
//! sidecar says where it came from: `published` (a printed value from the
//! 2024-25 lacrosse tables), `trivial` (follows directly from the rules), or
//! `derived` (computed by an independent method such as a direct
//! least-squares solve or a hand tally).

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::{parse_dataset, SeasonDataset};

macro_rules! fixture_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name,
            include_str!(concat!("../fixtures/", $name, ".csv")),
            include_str!(concat!("../fixtures/", $name, ".json")))),*]
    };
}

const FIXTURES: &[(&str, &str, &str)] = fixture_files![
    "allocation-2025-top10",
    "virginia-2025-tally",
    "sample-dataset",
    "two-team-neutral",
    "chain-3",
    "cycle-3",
    "round-robin-4",
    "swap-4",
    "rpi-schedule-12",
    "rpi-upset-15",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Published,
    Trivial,
    Derived,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinnedValue {
    pub key: String,
    pub value: f64,
    pub provenance: Provenance,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinnedList {
    pub key: String,
    pub items: Vec<String>,
    pub provenance: Provenance,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    name: String,
    description: String,
    #[serde(default)]
    values: Vec<PinnedValue>,
    #[serde(default)]
    lists: Vec<PinnedList>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub dataset: SeasonDataset,
    /// Raw season CSV as stored.
    pub csv: &'static str,
    pub values: Vec<PinnedValue>,
    pub lists: Vec<PinnedList>,
}

impl Fixture {
    pub fn value(&self, key: &str) -> Result<f64> {
        self.values
            .iter()
            .find(|v| v.key == key)
            .map(|v| v.value)
            .ok_or_else(|| self.missing(key))
    }

    /// `(suffix, value)` for every key of the form `{prefix}/{suffix}`,
    /// in file order.
    pub fn values_under(&self, prefix: &str) -> Vec<(&str, f64)> {
        self.values
            .iter()
            .filter_map(|v| {
                v.key
                    .strip_prefix(prefix)
                    .and_then(|rest| rest.strip_prefix('/'))
                    .map(|suffix| (suffix, v.value))
            })
            .collect()
    }

    pub fn list(&self, key: &str) -> Result<&[String]> {
        self.lists
            .iter()
            .find(|l| l.key == key)
            .map(|l| l.items.as_slice())
            .ok_or_else(|| self.missing(key))
    }

    fn missing(&self, key: &str) -> Error {
        Error::Fixture {
            name: self.name.clone(),
            message: format!("no pinned value {key:?}"),
        }
    }
}

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(name, _, _)| *name)
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let (_, csv, json) = FIXTURES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| Error::Fixture {
            name: name.to_string(),
            message: "no such fixture".into(),
        })?;
    let sidecar: Sidecar = serde_json::from_str(json).map_err(|e| Error::Fixture {
        name: name.to_string(),
        message: format!("sidecar: {e}"),
    })?;
    if sidecar.name != name {
        return Err(Error::Fixture {
            name: name.to_string(),
            message: format!("sidecar names itself {:?}", sidecar.name),
        });
    }
    Ok(Fixture {
        name: sidecar.name,
        description: sidecar.description,
        dataset: parse_dataset(csv.as_bytes())?,
        csv,
        values: sidecar.values,
        lists: sidecar.lists,
    })
}
