//! TOML run configuration: `[regime]`, `[gyromagnetic]`, `[couplings]`,
//! `[budget]` and `[hardware]`, all optional.

use serde::Deserialize;

use crate::constants::GyromagneticRatios;
use crate::error::{Error, Result};
use crate::lcost::SimulationBudget;
use crate::physest::{HardwareModel, DEFAULT_TARGET_ERROR};
use crate::spinham::CouplingTable;
use crate::structio::RegimeConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub regime: RegimeConfig,
    pub couplings: CouplingTable,
    pub budget: SimulationBudget,
    pub hardware: HardwareModel,
    pub target_error: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            regime: RegimeConfig::default(),
            couplings: CouplingTable::default(),
            budget: SimulationBudget::default(),
            hardware: HardwareModel::default(),
            target_error: DEFAULT_TARGET_ERROR,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHardware {
    #[serde(flatten)]
    model: HardwareModel,
    target_error: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    regime: Option<RegimeConfig>,
    gyromagnetic: Option<GyromagneticRatios>,
    couplings: Option<toml::Table>,
    budget: Option<SimulationBudget>,
    hardware: Option<toml::Table>,
}

impl Config {
    /// Parses a configuration; coupling entries replace the shipped values
    /// pair by pair.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut config = Config::default();
        if let Some(regime) = raw.regime {
            config.regime = regime;
        }
        if let Some(g) = raw.gyromagnetic {
            config.regime.gyromagnetic = g;
        }
        if let Some(table) = raw.couplings {
            let mut wrapped = toml::Table::new();
            wrapped.insert("couplings".into(), toml::Value::Table(table));
            config
                .couplings
                .merge(CouplingTable::from_toml(&wrapped.to_string())?);
        }
        if let Some(budget) = raw.budget {
            config.budget = budget;
        }
        if let Some(table) = raw.hardware {
            let hw: RawHardware = toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| Error::Config(format!("[hardware]: {e}")))?;
            config.hardware = hw.model;
            if let Some(t) = hw.target_error {
                config.target_error = t;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.regime.validate()?;
        self.budget.validate()?;
        self.hardware
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.target_error > 0.0 && self.target_error < 1.0) {
            return Err(Error::Config(format!(
                "target_error must lie in (0, 1), got {}",
                self.target_error
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structio::{DipolarMode, Nucleus, NucleusSet};

    #[test]
    fn empty_is_default() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn sections_override() {
        let text = r#"
            [regime]
            nucleus_set = "heteronuclear"
            dipolar_mode = "rdc"
            kappa = 2e-3

            [gyromagnetic]
            H = 2.0e8
            C = 6.0e7
            N = -2.0e7

            [couplings]
            CH = [140.0]

            [budget]
            n_points = 16

            [hardware]
            p_phys = 1e-3
            target_error = 1e-2
        "#;
        let c = Config::from_toml(text).unwrap();
        assert_eq!(c.regime.nucleus_set, NucleusSet::Heteronuclear);
        assert_eq!(c.regime.dipolar_mode, DipolarMode::Rdc);
        assert_eq!(c.regime.gyromagnetic.h1, 2.0e8);
        assert_eq!(
            c.couplings.lookup(Nucleus::C13, Nucleus::H1, 1).unwrap(),
            140.0
        );
        assert_eq!(
            c.couplings.lookup(Nucleus::C13, Nucleus::H1, 2).unwrap(),
            0.0
        );
        assert_eq!(
            c.couplings.lookup(Nucleus::H1, Nucleus::H1, 3).unwrap(),
            7.0
        );
        assert_eq!(c.budget.n_points, 16);
        assert_eq!(c.budget.t_max, 1.0);
        assert_eq!(c.hardware.p_phys, 1e-3);
        assert_eq!(c.hardware.t_react, 1e-5);
        assert_eq!(c.target_error, 1e-2);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "[regime]\nkappa = 0.0\n",
            "[budget]\nn_points = 0\n",
            "[hardware]\np_phys = 0.5\n",
            "[unknown]\nx = 1\n",
            "[couplings]\nXY = [1.0]\n",
        ] {
            assert!(
                matches!(Config::from_toml(text), Err(Error::Config(_))),
                "{text}"
            );
        }
    }
}
