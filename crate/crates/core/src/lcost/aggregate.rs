use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schedule::schedule_for_frequency;
use super::{single_shot, CostModel, LogicalEstimate, SampleSchedule, SimulationBudget};
use crate::error::Result;
use crate::spinham::ClusterReport;

/// Minimum cluster size counted in an aggregate by default.
pub const DEFAULT_THRESHOLD: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEstimate {
    /// Position in the cluster report.
    pub index: usize,
    pub n_spins: usize,
    pub n_terms: usize,
    /// Hz.
    pub alpha: f64,
    pub included: bool,
    /// Single shot at `t_max`.
    pub at_t_max: LogicalEstimate,
    /// Σ over the schedule; zero for excluded clusters.
    pub aggregate_t: u64,
    /// Basis states for the classical ensemble alternative, `N²`.
    pub ensemble_states: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateEstimate {
    pub threshold: usize,
    pub schedule: Option<SampleSchedule>,
    pub clusters: Vec<ClusterEstimate>,
    /// No cluster reached the threshold.
    pub empty: bool,
    /// Largest single-shot estimate among included clusters.
    pub single_shot_max: Option<LogicalEstimate>,
    /// `Σ_clusters Σ_t N_T`, one shot per timepoint.
    pub n_t_aggregate: u64,
    /// Logical qubits of the largest included cluster.
    pub n_logical: u64,
    pub n_shots: u64,
    /// `n_t_aggregate · n_shots`.
    pub n_t_with_shots: u128,
}

impl AggregateEstimate {
    /// Aggregate over the single longest-time estimate.
    pub fn ratio(&self) -> Option<f64> {
        self.single_shot_max
            .as_ref()
            .map(|s| self.n_t_aggregate as f64 / s.n_t as f64)
    }
}

/// Sums single-shot T-counts over every cluster with at least `threshold`
/// spins and every scheduled time. One schedule is shared by the molecule,
/// set by its fastest coupling.
pub fn aggregate(
    report: &ClusterReport,
    budget: &SimulationBudget,
    threshold: usize,
    model: &dyn CostModel,
) -> Result<AggregateEstimate> {
    budget.validate()?;
    let threshold = threshold.max(1);
    let included: Vec<bool> = report
        .clusters
        .iter()
        .map(|c| c.sites.len() >= threshold)
        .collect();
    let f_max = report
        .clusters
        .iter()
        .zip(&included)
        .filter(|(_, inc)| **inc)
        .map(|(c, _)| c.hamiltonian.max_coefficient())
        .fold(0.0, f64::max);
    let any = included.iter().any(|&b| b);
    let sched = if any {
        Some(schedule_for_frequency(f_max, budget)?)
    } else {
        None
    };

    let clusters = report
        .clusters
        .par_iter()
        .enumerate()
        .map(|(index, c)| -> Result<ClusterEstimate> {
            let h = &c.hamiltonian;
            let at_t_max = single_shot(h, budget.t_max, budget, model)?;
            let aggregate_t = match (&sched, included[index]) {
                (Some(s), true) => s
                    .timepoints
                    .par_iter()
                    .map(|&t| single_shot(h, t, budget, model).map(|e| e.n_t))
                    .try_reduce(|| 0, |a, b| Ok(a + b))?,
                _ => 0,
            };
            let n = c.sites.len() as u64;
            Ok(ClusterEstimate {
                index,
                n_spins: c.sites.len(),
                n_terms: h.n_terms(),
                alpha: h.alpha(),
                included: included[index],
                at_t_max,
                aggregate_t,
                ensemble_states: n * n,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let single_shot_max = clusters
        .iter()
        .filter(|c| c.included)
        .map(|c| c.at_t_max)
        .max_by_key(|e| e.n_t);
    let n_logical = clusters
        .iter()
        .filter(|c| c.included)
        .map(|c| c.at_t_max.n_logical)
        .max()
        .unwrap_or(0);
    let n_t_aggregate: u64 = clusters.iter().map(|c| c.aggregate_t).sum();
    let n_shots = sched.as_ref().map_or(0, |s| s.n_shots);
    Ok(AggregateEstimate {
        threshold,
        schedule: sched,
        clusters,
        empty: !any,
        single_shot_max,
        n_t_aggregate,
        n_logical,
        n_shots,
        n_t_with_shots: n_t_aggregate as u128 * n_shots as u128,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcost::CostLedger;
    use crate::spinham::{decompose_clusters, Axis, PauliTerm, SpinHamiltonian};

    fn chains(lengths: &[usize]) -> ClusterReport {
        let mut terms = Vec::new();
        let mut offset = 0;
        for &len in lengths {
            for k in offset..offset + len - 1 {
                for a in Axis::ALL {
                    terms.push(PauliTerm::two_site(30.0, (k, a), (k + 1, a)));
                }
            }
            offset += len;
        }
        decompose_clusters(&SpinHamiltonian::new(offset, terms).unwrap())
    }

    #[test]
    fn single_point_equals_single_shot() {
        let report = chains(&[5]);
        let budget = SimulationBudget {
            n_points: 1,
            ..Default::default()
        };
        let agg = aggregate(&report, &budget, 1, CostLedger::standard()).unwrap();
        assert_eq!(agg.n_t_aggregate, agg.single_shot_max.unwrap().n_t);
    }

    #[test]
    fn identical_clusters_double() {
        let budget = SimulationBudget {
            n_points: 17,
            ..Default::default()
        };
        let one = aggregate(&chains(&[4]), &budget, 2, CostLedger::standard()).unwrap();
        let two = aggregate(&chains(&[4, 4]), &budget, 2, CostLedger::standard()).unwrap();
        assert_eq!(two.n_t_aggregate, 2 * one.n_t_aggregate);
    }

    #[test]
    fn below_threshold_is_empty_and_ignored() {
        let budget = SimulationBudget::default();
        let agg = aggregate(&chains(&[3]), &budget, 20, CostLedger::standard()).unwrap();
        assert!(agg.empty);
        assert_eq!(agg.n_t_aggregate, 0);
        assert!(agg.schedule.is_none());

        let small = SimulationBudget {
            n_points: 9,
            ..budget
        };
        let a = aggregate(&chains(&[6]), &small, 5, CostLedger::standard()).unwrap();
        let b = aggregate(&chains(&[6, 2]), &small, 5, CostLedger::standard()).unwrap();
        assert_eq!(a.n_t_aggregate, b.n_t_aggregate);
    }
}
