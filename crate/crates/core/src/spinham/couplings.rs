use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structio::Nucleus;

const DEFAULT_TABLE: &str = include_str!("../../data/couplings.toml");

/// Scalar couplings `J^k_AB` keyed by unordered species pair, listed by bond
/// separation `k = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    #[serde(rename = "couplings")]
    entries: BTreeMap<String, Vec<f64>>,
}

fn pair_key(a: Nucleus, b: Nucleus) -> String {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    // Stored as e.g. "CH": heavier species first, matching conventional notation.
    format!("{}{}", b.code(), a.code())
}

fn normalize_key(key: &str) -> Result<String> {
    let parse = |c: char| match c.to_ascii_uppercase() {
        'H' => Ok(Nucleus::H1),
        'C' => Ok(Nucleus::C13),
        'N' => Ok(Nucleus::N15),
        other => Err(Error::Config(format!(
            "unknown species {other:?} in coupling key {key:?}"
        ))),
    };
    let chars: Vec<char> = key.trim().chars().filter(|c| *c != '-').collect();
    if chars.len() != 2 {
        return Err(Error::Config(format!(
            "coupling key {key:?} must name two species"
        )));
    }
    Ok(pair_key(parse(chars[0])?, parse(chars[1])?))
}

impl Default for CouplingTable {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TABLE).expect("shipped coupling table parses")
    }
}

impl CouplingTable {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// Parses a `[couplings]` table such as `CH = [125.0, -4.0]`.
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            couplings: BTreeMap<String, Vec<f64>>,
        }
        let raw: Raw = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut table = Self::empty();
        for (key, values) in raw.couplings {
            table.insert_key(&key, values)?;
        }
        Ok(table)
    }

    fn insert_key(&mut self, key: &str, values: Vec<f64>) -> Result<()> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite coupling {v} for {key}")));
        }
        self.entries.insert(normalize_key(key)?, values);
        Ok(())
    }

    /// Replaces the couplings for one species pair.
    pub fn set(&mut self, a: Nucleus, b: Nucleus, by_separation: Vec<f64>) -> Result<()> {
        self.insert_key(&pair_key(a, b), by_separation)
    }

    /// Overlays `other` on top of `self`, pair by pair.
    pub fn merge(&mut self, other: CouplingTable) {
        self.entries.extend(other.entries);
    }

    /// Coupling in Hz for a `bonds`-bond separation. A pair missing from the
    /// table entirely is a configuration error; separations past the end of a
    /// listed pair mean no coupling.
    pub fn lookup(&self, a: Nucleus, b: Nucleus, bonds: u32) -> Result<f64> {
        let key = pair_key(a, b);
        let values = self.entries.get(&key).ok_or_else(|| {
            Error::Config(format!(
                "coupling table has no entry for {key} (needed at {bonds} bonds)"
            ))
        })?;
        if bonds == 0 {
            return Ok(0.0);
        }
        Ok(values.get(bonds as usize - 1).copied().unwrap_or(0.0))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("table serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_symmetric_in_species() {
        let t = CouplingTable::default();
        assert_eq!(t.lookup(Nucleus::C13, Nucleus::H1, 1).unwrap(), 125.0);
        assert_eq!(t.lookup(Nucleus::H1, Nucleus::C13, 1).unwrap(), 125.0);
        assert_eq!(t.lookup(Nucleus::H1, Nucleus::H1, 3).unwrap(), 7.0);
        assert_eq!(t.lookup(Nucleus::H1, Nucleus::N15, 1).unwrap(), -90.0);
        assert_eq!(t.lookup(Nucleus::H1, Nucleus::H1, 9).unwrap(), 0.0);
    }

    #[test]
    fn missing_pair_names_the_key() {
        let t = CouplingTable::from_toml("[couplings]\nHH = [0.0, -12.0]\n").unwrap();
        let err = t.lookup(Nucleus::C13, Nucleus::H1, 1).unwrap_err();
        assert!(err.to_string().contains("CH"), "{err}");
    }

    #[test]
    fn keys_accept_either_order_and_dashes() {
        let t = CouplingTable::from_toml("[couplings]\n\"H-C\" = [140.0]\n").unwrap();
        assert_eq!(t.lookup(Nucleus::C13, Nucleus::H1, 1).unwrap(), 140.0);
        assert!(CouplingTable::from_toml("[couplings]\nHX = [1.0]\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let t = CouplingTable::default();
        assert_eq!(CouplingTable::from_toml(&t.to_toml()).unwrap(), t);
    }
}
