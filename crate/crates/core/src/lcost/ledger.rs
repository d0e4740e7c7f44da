use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STANDARD_LEDGER: &str = include_str!("../../data/cost_model.toml");

/// Gate-level cost formulas behind the logical estimate. Alternative models
/// can be plugged into every estimator in this module.
pub trait CostModel: Send + Sync {
    fn version(&self) -> &str;
    /// Select over `n_terms` unitaries.
    fn select_t(&self, n_terms: u64) -> u64;
    fn prepare_t(&self, n_terms: u64, index_bits: u32, coeff_bits: u32) -> u64;
    fn unprepare_t(&self, n_terms: u64, index_bits: u32, coeff_bits: u32) -> u64;
    fn reflection_t(&self, index_bits: u32) -> u64;
    /// Axial rotations per SU(2) rotation.
    fn axial_per_rotation(&self) -> u64;
    /// T gates for one axial rotation at synthesis error `eps`.
    fn axial_rotation_t(&self, eps: f64) -> u64;
    /// LCU ancilla qubits excluding the phase qubit.
    fn lcu_ancilla(&self, index_bits: u32, coeff_bits: u32) -> u64;
    fn phase_qubits(&self) -> u64;
    /// Total-spin oracle cost for `n` spins, including uncomputation.
    fn spin_oracles_t(&self, n_spins: u64) -> u64;
    /// Initial-state preparation, including uncomputation.
    fn state_prep_t(&self, coeff_bits: u32) -> u64;
    fn estimator_registers(&self, n_spins: u64) -> u64;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectCosts {
    per_term: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrepareCosts {
    per_term: u64,
    per_coeff_bit: u64,
    per_index_bit: u64,
    constant: i64,
    inverse_factor: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReflectionCosts {
    per_index_bit: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RotationCosts {
    axial_per_su2: u64,
    log2_slope: f64,
    intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimatorCosts {
    oracles: u64,
    per_spin_bit: u64,
    comparator_per_bit: u64,
    uncompute_factor: u64,
    readout_qubits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AncillaCounts {
    phase_qubits: u64,
    comparator_flags: u64,
}

/// The pinned cost model, read from a TOML ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostLedger {
    ledger_version: String,
    select: SelectCosts,
    prepare: PrepareCosts,
    reflection: ReflectionCosts,
    rotation: RotationCosts,
    estimator: EstimatorCosts,
    ancilla: AncillaCounts,
}

impl CostLedger {
    pub fn from_toml(text: &str) -> Result<Self> {
        let ledger: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("cost ledger: {e}")))?;
        if !(ledger.rotation.log2_slope > 0.0) || !ledger.rotation.intercept.is_finite() {
            return Err(Error::Config(
                "cost ledger: invalid rotation synthesis constants".into(),
            ));
        }
        Ok(ledger)
    }

    /// The shipped ledger.
    pub fn standard() -> &'static CostLedger {
        static LEDGER: OnceLock<CostLedger> = OnceLock::new();
        LEDGER.get_or_init(|| Self::from_toml(STANDARD_LEDGER).expect("shipped ledger parses"))
    }

    pub fn standard_text() -> &'static str {
        STANDARD_LEDGER
    }
}

/// `⌈log2 x⌉`, with `0` for `x ≤ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

impl CostModel for CostLedger {
    fn version(&self) -> &str {
        &self.ledger_version
    }

    fn select_t(&self, n_terms: u64) -> u64 {
        self.select.per_term * n_terms.saturating_sub(1)
    }

    fn prepare_t(&self, n_terms: u64, index_bits: u32, coeff_bits: u32) -> u64 {
        let p = &self.prepare;
        let raw = (p.per_term * n_terms
            + p.per_coeff_bit * coeff_bits as u64
            + p.per_index_bit * index_bits as u64) as i64
            + p.constant;
        raw.max(0) as u64
    }

    fn unprepare_t(&self, n_terms: u64, index_bits: u32, coeff_bits: u32) -> u64 {
        self.prepare.inverse_factor * self.prepare_t(n_terms, index_bits, coeff_bits)
    }

    fn reflection_t(&self, index_bits: u32) -> u64 {
        self.reflection.per_index_bit * (index_bits as u64).saturating_sub(1)
    }

    fn axial_per_rotation(&self) -> u64 {
        self.rotation.axial_per_su2
    }

    fn axial_rotation_t(&self, eps: f64) -> u64 {
        let r = &self.rotation;
        (r.log2_slope * (1.0 / eps).log2() + r.intercept)
            .ceil()
            .max(0.0) as u64
    }

    fn lcu_ancilla(&self, index_bits: u32, coeff_bits: u32) -> u64 {
        2 * index_bits as u64 + 2 * coeff_bits as u64 + self.ancilla.comparator_flags
    }

    fn phase_qubits(&self) -> u64 {
        self.ancilla.phase_qubits
    }

    fn spin_oracles_t(&self, n_spins: u64) -> u64 {
        let e = &self.estimator;
        let s = ceil_log2(n_spins) as u64;
        e.uncompute_factor * e.oracles * e.per_spin_bit * n_spins * s.saturating_sub(1)
    }

    fn state_prep_t(&self, coeff_bits: u32) -> u64 {
        let e = &self.estimator;
        e.uncompute_factor * e.comparator_per_bit * coeff_bits as u64
    }

    fn estimator_registers(&self, n_spins: u64) -> u64 {
        self.estimator.readout_qubits + ceil_log2(n_spins) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        let cases = [
            (0, 0),
            (1, 0),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 3),
            (64, 6),
            (100, 7),
            (128, 7),
            (129, 8),
        ];
        for (x, want) in cases {
            assert_eq!(ceil_log2(x), want, "x={x}");
        }
    }

    #[test]
    fn ledger_round_trips_and_rejects_unknown_keys() {
        let ledger = CostLedger::standard();
        let text = toml::to_string(ledger).unwrap();
        assert_eq!(&CostLedger::from_toml(&text).unwrap(), ledger);
        let bad = format!("{}\n[extra]\nx = 1\n", CostLedger::standard_text());
        assert!(CostLedger::from_toml(&bad).is_err());
    }
}
