//! Logical resource counts for GQSP time evolution of a spin Hamiltonian.

mod aggregate;
mod ledger;
mod schedule;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate, AggregateEstimate, ClusterEstimate, DEFAULT_THRESHOLD};
pub use ledger::{ceil_log2, CostLedger, CostModel};
pub use schedule::{log_times, n_shots, schedule, SampleSchedule};

use crate::error::{Error, Result};
use crate::gqsp::degree_for;
use crate::spinham::SpinHamiltonian;

/// Time window, error targets and sampling density of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationBudget {
    /// s.
    pub t_max: f64,
    /// s.
    pub t2: f64,
    pub epsilon_max: f64,
    pub epsilon_meas: f64,
    pub n_points: usize,
    /// Bits of LCU coefficient precision.
    pub coeff_bits: u32,
}

impl Default for SimulationBudget {
    fn default() -> Self {
        Self {
            t_max: 1.0,
            t2: 1.0,
            epsilon_max: 5e-3,
            epsilon_meas: 0.01,
            n_points: 400,
            coeff_bits: 10,
        }
    }
}

impl SimulationBudget {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("t_max", self.t_max)?;
        positive("t2", self.t2)?;
        if !(self.epsilon_max > 0.0 && self.epsilon_max < 1.0) {
            return Err(Error::Config(format!(
                "epsilon_max must lie in (0, 1), got {}",
                self.epsilon_max
            )));
        }
        if !(self.epsilon_meas > 0.0 && self.epsilon_meas < 1.0) {
            return Err(Error::Config(format!(
                "epsilon_meas must lie in (0, 1), got {}",
                self.epsilon_meas
            )));
        }
        if self.n_points == 0 {
            return Err(Error::Config("n_points must be at least 1".into()));
        }
        Ok(())
    }

    /// `ε(t) = min(1 − e^{−t/T2}, ε_max)`; at `t = 0` the cap itself.
    pub fn epsilon_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.epsilon_max;
        }
        (-(-t / self.t2).exp_m1()).min(self.epsilon_max)
    }

    /// Earliest time from which `ε(t)` sits at the cap.
    pub fn cap_time(&self) -> f64 {
        -self.t2 * (-self.epsilon_max).ln_1p()
    }
}

/// Per-query block-encoding cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingCost {
    pub n_terms: u64,
    /// `m = ⌈log2 M⌉`.
    pub index_bits: u32,
    pub coeff_bits: u32,
    pub select_t: u64,
    pub prepare_t: u64,
    pub unprepare_t: u64,
    pub reflection_t: u64,
    /// Selection, keep, alt, alias-index and comparator-flag qubits.
    pub ancilla: u64,
}

impl EncodingCost {
    /// One application of `U_H`.
    pub fn query_t(&self) -> u64 {
        self.select_t + self.prepare_t + self.unprepare_t
    }
}

pub fn encoding_cost(
    h: &SpinHamiltonian,
    coeff_bits: u32,
    model: &dyn CostModel,
) -> Result<EncodingCost> {
    encoding_cost_for_terms(h.n_terms() as u64, coeff_bits, model)
}

pub fn encoding_cost_for_terms(
    n_terms: u64,
    coeff_bits: u32,
    model: &dyn CostModel,
) -> Result<EncodingCost> {
    if n_terms == 0 {
        return Err(Error::domain("block encoding needs at least one term"));
    }
    let m = ceil_log2(n_terms);
    Ok(EncodingCost {
        n_terms,
        index_bits: m,
        coeff_bits,
        select_t: model.select_t(n_terms),
        prepare_t: model.prepare_t(n_terms, m, coeff_bits),
        unprepare_t: model.unprepare_t(n_terms, m, coeff_bits),
        reflection_t: model.reflection_t(m),
        ancilla: model.lcu_ancilla(m, coeff_bits),
    })
}

/// T-count by subcircuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TBreakdown {
    pub select: u64,
    pub prepare: u64,
    pub unprepare: u64,
    pub reflection: u64,
    pub rotations: u64,
    pub spin_oracles: u64,
    pub state_prep: u64,
}

impl TBreakdown {
    pub fn total(&self) -> u64 {
        self.select
            + self.prepare
            + self.unprepare
            + self.reflection
            + self.rotations
            + self.spin_oracles
            + self.state_prep
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalEstimate {
    /// s.
    pub time: f64,
    pub epsilon: f64,
    pub degree: usize,
    pub n_t: u64,
    /// SU(2) rotations, `2d + 1`.
    pub n_rot: u64,
    /// System, LCU ancilla and phase qubits.
    pub n_logical_evolution: u64,
    /// Adds estimator registers when the estimator is included.
    pub n_logical: u64,
    pub breakdown: TBreakdown,
    pub encoding: EncodingCost,
}

impl LogicalEstimate {
    pub fn with_estimator(mut self, overhead: &EstimatorOverhead) -> Self {
        self.breakdown.spin_oracles += overhead.spin_oracles_t;
        self.breakdown.state_prep += overhead.state_prep_t;
        self.n_logical = self.n_logical_evolution + overhead.registers;
        self.n_t = self.breakdown.total();
        self
    }
}

/// Cost of `e^{-iHt}` at an explicit unitary error.
pub fn evolution_cost_at(
    h: &SpinHamiltonian,
    t: f64,
    epsilon: f64,
    coeff_bits: u32,
    model: &dyn CostModel,
) -> Result<LogicalEstimate> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let enc = encoding_cost(h, coeff_bits, model)?;
    let tau = 2.0 * std::f64::consts::PI * h.alpha() * t;
    let d = degree_for(tau, epsilon)? as u64;
    let n_rot = 2 * d + 1;
    let axial = model.axial_per_rotation();
    let eps_rot = epsilon / (axial * n_rot) as f64;
    let breakdown = TBreakdown {
        select: 2 * d * enc.select_t,
        prepare: 2 * d * enc.prepare_t,
        unprepare: 2 * d * enc.unprepare_t,
        reflection: 2 * d * enc.reflection_t,
        rotations: n_rot * axial * model.axial_rotation_t(eps_rot),
        spin_oracles: 0,
        state_prep: 0,
    };
    let n_logical = h.n_spins() as u64 + enc.ancilla + model.phase_qubits();
    Ok(LogicalEstimate {
        time: t,
        epsilon,
        degree: d as usize,
        n_t: breakdown.total(),
        n_rot,
        n_logical_evolution: n_logical,
        n_logical,
        breakdown,
        encoding: enc,
    })
}

/// Cost of `e^{-iHt}` with the budget's error `ε(t)`.
pub fn evolution_cost(
    h: &SpinHamiltonian,
    t: f64,
    budget: &SimulationBudget,
    model: &dyn CostModel,
) -> Result<LogicalEstimate> {
    evolution_cost_at(h, t, budget.epsilon_at(t), budget.coeff_bits, model)
}

/// Extra cost of the correlation-function circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorOverhead {
    /// `s = ⌈log2 n⌉`.
    pub sum_bits: u32,
    pub registers: u64,
    pub spin_oracles_t: u64,
    pub state_prep_t: u64,
}

impl EstimatorOverhead {
    pub fn total_t(&self) -> u64 {
        self.spin_oracles_t + self.state_prep_t
    }
}

pub fn estimator_overhead(
    h: &SpinHamiltonian,
    coeff_bits: u32,
    model: &dyn CostModel,
) -> EstimatorOverhead {
    let n = h.n_spins() as u64;
    EstimatorOverhead {
        sum_bits: ceil_log2(n),
        registers: model.estimator_registers(n),
        spin_oracles_t: model.spin_oracles_t(n),
        state_prep_t: model.state_prep_t(coeff_bits),
    }
}

/// Evolution plus estimator circuit at time `t`.
pub fn single_shot(
    h: &SpinHamiltonian,
    t: f64,
    budget: &SimulationBudget,
    model: &dyn CostModel,
) -> Result<LogicalEstimate> {
    let overhead = estimator_overhead(h, budget.coeff_bits, model);
    Ok(evolution_cost(h, t, budget, model)?.with_estimator(&overhead))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinham::{Axis, PauliTerm};

    fn ledger() -> &'static CostLedger {
        CostLedger::standard()
    }

    fn chain(n: usize, j: f64) -> SpinHamiltonian {
        let terms = (0..n - 1)
            .flat_map(|k| Axis::ALL.map(|a| PauliTerm::two_site(j, (k, a), (k + 1, a))))
            .collect();
        SpinHamiltonian::new(n, terms).unwrap()
    }

    #[test]
    fn encoding_examples() {
        let one = encoding_cost_for_terms(1, 10, ledger()).unwrap();
        assert_eq!((one.select_t, one.index_bits, one.reflection_t), (0, 0, 0));

        let c = encoding_cost_for_terms(128, 10, ledger()).unwrap();
        assert_eq!(c.select_t, 508);
        assert_eq!(c.index_bits, 7);
        assert_eq!(c.reflection_t, 24);
        assert_eq!(c.prepare_t, 612);
        assert_eq!(c.unprepare_t, 612);
        assert_eq!(c.ancilla, 2 * 7 + 2 * 10 + 1);

        let d = encoding_cost_for_terms(256, 10, ledger()).unwrap();
        assert_eq!(d.select_t - c.select_t, 4 * 128);

        assert!(encoding_cost_for_terms(0, 10, ledger()).is_err());
    }

    #[test]
    fn zero_time_cost() {
        let h = chain(4, 10.0);
        let budget = SimulationBudget::default();
        let est = evolution_cost(&h, 0.0, &budget, ledger()).unwrap();
        assert_eq!(est.degree, 3);
        let enc = est.encoding;
        let eps_rot: f64 = 5e-3 / 21.0;
        let rot = 3 * (1.15 * (1.0 / eps_rot).log2() + 9.2).ceil() as u64;
        assert_eq!(est.n_t, 6 * (enc.query_t() + enc.reflection_t) + 7 * rot);
        assert!(est.n_t > 0);
        assert_eq!(est.n_t, est.breakdown.total());
        assert!(est.n_logical > 4 + enc.index_bits as u64);
    }

    #[test]
    fn doubling_time_roughly_doubles_cost() {
        let h = chain(6, 50.0);
        let budget = SimulationBudget::default();
        let a = evolution_cost(&h, 0.5, &budget, ledger()).unwrap();
        let b = evolution_cost(&h, 1.0, &budget, ledger()).unwrap();
        let rd = b.degree as f64 / a.degree as f64;
        assert!((rd - 2.0).abs() < 0.05, "{rd}");
        let rt = b.n_t as f64 / a.n_t as f64;
        assert!((rt - 2.0).abs() < 0.1, "{rt}");
    }

    #[test]
    fn epsilon_curve() {
        let budget = SimulationBudget::default();
        assert_eq!(budget.epsilon_at(0.1), 5e-3);
        assert!((1.0 - (-0.1f64).exp() - 0.0952).abs() < 1e-4);
        assert!((budget.epsilon_at(1e-3) - (1.0 - (-1e-3f64).exp())).abs() < 1e-15);
        let tc = budget.cap_time();
        assert!((budget.epsilon_at(tc) - 5e-3).abs() < 1e-15);
    }

    #[test]
    fn estimator_examples() {
        let model = ledger();
        assert_eq!(model.spin_oracles_t(1), 0);
        assert_eq!(model.spin_oracles_t(64), 5120);
        assert_eq!(model.estimator_registers(100), 8);
        let h = chain(3, 1.0);
        let o = estimator_overhead(&h, 10, model);
        assert_eq!(o.state_prep_t, 80);
        let base = evolution_cost(&h, 1.0, &SimulationBudget::default(), model).unwrap();
        let full = base.with_estimator(&o);
        assert_eq!(full.n_t, base.n_t + o.total_t());
        assert_eq!(full.n_logical, base.n_logical_evolution + o.registers);
    }
}
