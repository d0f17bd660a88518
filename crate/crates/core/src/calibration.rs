//! Calibration data for representation choices that cannot be derived from
//! the root system alone: root-vector signs, explicit Weyl representatives,
//! torus orientation and the G2 generators.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../calibration/default.json");

/// Environment variable naming an alternative calibration file.
pub const ENV_VAR: &str = "PV_CALIBRATION";

/// 1-based `(row, col, value)` triples.
pub type Entries = Vec<(usize, usize, i64)>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    #[serde(default)]
    pub systems: BTreeMap<String, SystemCalibration>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemCalibration {
    /// Root (as its JSON array text, e.g. "[-1,-1,0]") to ±1; applied to
    /// both X_α and X_{−α}.
    #[serde(default)]
    pub signs: BTreeMap<String, i64>,
    /// t_i(z) = z^{o_i H_i}.
    #[serde(default)]
    pub torus_orientation: Option<Vec<i64>>,
    #[serde(default)]
    pub weyl_overrides: Vec<WeylOverride>,
    #[serde(default)]
    pub generators: Option<Generators>,
    /// Outcome of the h_6 comparison for G2: "exact" or "downgraded".
    #[serde(default)]
    pub h6_acceptance: Option<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylOverride {
    /// Simple reflection indices, 1-based.
    pub word: Vec<usize>,
    pub entries: Entries,
}

/// Simple root vectors X_{ᾱ_i} (`e`) and X_{−ᾱ_i} (`f`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generators {
    pub dim: usize,
    pub e: Vec<Entries>,
    pub f: Vec<Entries>,
}

impl Calibration {
    pub fn embedded() -> Calibration {
        serde_json::from_str(EMBEDDED).expect("embedded calibration is valid JSON")
    }

    pub fn from_path(path: &Path) -> Result<Calibration> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Calibration(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Calibration(format!("{}: {e}", path.display())))
    }

    /// The file named by `PV_CALIBRATION` if set, otherwise the embedded default.
    pub fn load() -> Result<Calibration> {
        match std::env::var_os(ENV_VAR) {
            Some(p) if !p.is_empty() => Calibration::from_path(Path::new(&p)),
            _ => Ok(Calibration::embedded()),
        }
    }

    pub fn system(&self, key: &str) -> Option<&SystemCalibration> {
        self.systems.get(key)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }
}

/// Key used for a root in the sign table.
pub fn root_key(r: &[i64]) -> String {
    serde_json::to_string(r).expect("root serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_parses_and_round_trips() {
        let c = Calibration::embedded();
        assert!(c.system("A3").is_some());
        assert!(c.system("G2").and_then(|s| s.generators.as_ref()).is_some());
        let back: Calibration = serde_json::from_str(&c.to_json_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn root_keys() {
        assert_eq!(root_key(&[-1, -1, 0]), "[-1,-1,0]");
    }
}
