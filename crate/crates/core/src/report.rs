//! End-to-end pipeline from a parsed structure to the molecule report.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::lcost::{aggregate, CostModel, LogicalEstimate, SampleSchedule};
use crate::physest::{optimize, runtime, Job, Machine, MachineRuntime, PhysicalEstimate};
use crate::spinham::{
    build_hamiltonian, decompose_clusters, ClusterReport, RegisterMetrics, SpinHamiltonian,
};
use crate::structio::{select_spin_sites, MolecularGraph, SpinSite};

/// Version tag carried by every serialized report.
pub const REPORT_SCHEMA: &str = "zulf-report-1";

/// Cluster sizes at which classical simulation is flagged as hard.
pub const HARDNESS_THRESHOLDS: [usize; 3] = [16, 20, 32];

/// Single-shot T-count band for small scalar-coupled molecules.
pub const SMALL_MOLECULE_T_BAND: u64 = 10_000_000_000;

/// A structure with its spin register, Hamiltonian and cluster split.
#[derive(Debug, Clone)]
pub struct Molecule {
    pub name: String,
    pub graph: MolecularGraph,
    pub sites: Vec<SpinSite>,
    pub hamiltonian: SpinHamiltonian,
    pub clusters: ClusterReport,
}

impl Molecule {
    pub fn analyze(graph: MolecularGraph, config: &Config) -> Result<Self> {
        let sites = select_spin_sites(&graph, &config.regime);
        let hamiltonian = build_hamiltonian(&graph, &sites, &config.regime, &config.couplings)?;
        let clusters = decompose_clusters(&hamiltonian);
        Ok(Self {
            name: graph.name.clone(),
            graph,
            sites,
            hamiltonian,
            clusters,
        })
    }

    /// Gyromagnetic ratios of the register qubits of cluster `index`.
    pub fn cluster_gammas(&self, index: usize) -> Option<Vec<f64>> {
        let c = self.clusters.clusters.get(index)?;
        Some(c.sites.iter().map(|&r| self.sites[r].gamma).collect())
    }

    fn cluster_atoms(&self, index: usize) -> Vec<usize> {
        self.clusters.clusters[index]
            .sites
            .iter()
            .map(|&r| self.sites[r].atom_index)
            .collect()
    }

    pub fn inspect(&self, config: &Config) -> InspectReport {
        let clusters = self
            .clusters
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| ClusterSummary {
                index: i,
                atoms: self.cluster_atoms(i),
                metrics: c.metrics.clone(),
                alpha: c.hamiltonian.alpha(),
                f_max: c.hamiltonian.max_coefficient(),
                hardness: Hardness::of(c.sites.len()),
            })
            .collect();
        InspectReport {
            schema: REPORT_SCHEMA.into(),
            molecule: self.name.clone(),
            regime: config.regime.label(),
            n_atoms: self.graph.atoms.len(),
            n_spins: self.sites.len(),
            clusters,
        }
    }

    /// Logical estimate for every cluster plus the molecule aggregate.
    pub fn estimate(
        &self,
        config: &Config,
        threshold: usize,
        model: &dyn CostModel,
    ) -> Result<MoleculeReport> {
        let agg = aggregate(&self.clusters, &config.budget, threshold, model)?;
        let inspect = self.inspect(config);
        let clusters = inspect
            .clusters
            .into_iter()
            .zip(&agg.clusters)
            .map(|(summary, est)| ClusterRow {
                summary,
                included: est.included,
                at_t_max: est.at_t_max,
                aggregate_t: est.aggregate_t,
                ensemble_states: est.ensemble_states,
            })
            .collect();
        let ratio = agg.ratio();
        Ok(MoleculeReport {
            schema: REPORT_SCHEMA.into(),
            molecule: self.name.clone(),
            regime: inspect.regime,
            n_atoms: inspect.n_atoms,
            n_spins: inspect.n_spins,
            clusters,
            schedule: agg.schedule,
            single_shot_max: agg.single_shot_max,
            aggregate: AggregateSummary {
                threshold: agg.threshold,
                empty: agg.empty,
                n_t: agg.n_t_aggregate,
                n_logical: agg.n_logical,
                n_shots: agg.n_shots,
                n_t_with_shots: agg.n_t_with_shots,
                ratio,
                below_t_band: agg.single_shot_max.map(|s| s.n_t < SMALL_MOLECULE_T_BAND),
            },
            ledger_version: model.version().to_string(),
            physical: None,
        })
    }
}

/// Flags for each entry of [`HARDNESS_THRESHOLDS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hardness {
    pub n_ge_16: bool,
    pub n_ge_20: bool,
    pub n_ge_32: bool,
}

impl Hardness {
    pub fn of(n_spins: usize) -> Self {
        let [a, b, c] = HARDNESS_THRESHOLDS.map(|t| n_spins >= t);
        Self {
            n_ge_16: a,
            n_ge_20: b,
            n_ge_32: c,
        }
    }

    pub fn any(&self) -> bool {
        self.n_ge_16 || self.n_ge_20 || self.n_ge_32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub index: usize,
    /// Atom indices in the input structure.
    pub atoms: Vec<usize>,
    pub metrics: RegisterMetrics,
    /// Hz.
    pub alpha: f64,
    /// Largest coefficient magnitude, Hz.
    pub f_max: f64,
    pub hardness: Hardness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectReport {
    pub schema: String,
    pub molecule: String,
    pub regime: String,
    pub n_atoms: usize,
    pub n_spins: usize,
    pub clusters: Vec<ClusterSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    #[serde(flatten)]
    pub summary: ClusterSummary,
    pub included: bool,
    pub at_t_max: LogicalEstimate,
    pub aggregate_t: u64,
    pub ensemble_states: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub threshold: usize,
    pub empty: bool,
    /// Σ over included clusters and timepoints, one shot each.
    pub n_t: u64,
    pub n_logical: u64,
    pub n_shots: u64,
    pub n_t_with_shots: u128,
    /// `n_t` over the longest single shot.
    pub ratio: Option<f64>,
    /// Single-shot maximum below 10¹⁰ T gates.
    pub below_t_band: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeReport {
    pub schema: String,
    pub molecule: String,
    pub regime: String,
    pub n_atoms: usize,
    pub n_spins: usize,
    pub clusters: Vec<ClusterRow>,
    pub schedule: Option<SampleSchedule>,
    pub single_shot_max: Option<LogicalEstimate>,
    pub aggregate: AggregateSummary,
    pub ledger_version: String,
    pub physical: Option<PhysicalReport>,
}

impl MoleculeReport {
    /// Maps the longest single shot onto hardware. `None` when no cluster
    /// reached the threshold.
    pub fn attach_physical(&mut self, config: &Config, machines: &[Machine]) -> Result<()> {
        let Some(shot) = self.single_shot_max else {
            self.physical = None;
            return Ok(());
        };
        let job = Job::from(&shot);
        let (estimate, feasible) = match optimize(job, &config.hardware, config.target_error) {
            Ok(e) => (e, true),
            Err(Error::Infeasible { best, .. }) => (*best, false),
            Err(e) => return Err(e),
        };
        let total_shots = equivalent_shots(self.aggregate.n_t_with_shots, shot.n_t);
        let machines = machines
            .iter()
            .map(|m| runtime(&estimate, m, total_shots))
            .collect();
        self.physical = Some(PhysicalReport {
            feasible,
            total_shots,
            estimate,
            machines,
        });
        Ok(())
    }

    pub fn is_infeasible(&self) -> bool {
        self.physical.as_ref().is_some_and(|p| !p.feasible)
    }
}

/// Aggregate work expressed as a count of longest shots, rounded up.
pub fn equivalent_shots(n_t_with_shots: u128, n_t_shot: u64) -> u64 {
    if n_t_shot == 0 {
        return 0;
    }
    let q = n_t_with_shots.div_ceil(n_t_shot as u128);
    u64::try_from(q).unwrap_or(u64::MAX)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalReport {
    pub feasible: bool,
    /// Longest-shot equivalents of the whole schedule.
    pub total_shots: u64,
    pub estimate: PhysicalEstimate,
    pub machines: Vec<MachineRuntime>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcost::CostLedger;
    use crate::physest::reference_machines;
    use crate::structio::{
        parse_structure, DipolarMode, NucleusSet, RegimeConfig, StructureFormat,
    };

    fn load(name: &str) -> MolecularGraph {
        let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        let bytes = std::fs::read(&path).unwrap();
        let fmt = StructureFormat::sniff(std::path::Path::new(&path)).unwrap();
        parse_structure(&bytes, fmt).unwrap()
    }

    #[test]
    fn methane_proton_is_one_small_cluster() {
        let m = Molecule::analyze(load("methane.mol"), &Config::default()).unwrap();
        let r = m.inspect(&Config::default());
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].metrics.n_spins, 4);
        assert!(!r.clusters[0].hardness.any());
        assert_eq!(r.clusters[0].atoms, vec![1, 2, 3, 4]);
    }

    #[test]
    fn dipolar_regime_spans_the_molecule() {
        let config = Config {
            regime: RegimeConfig::new(NucleusSet::Heteronuclear, DipolarMode::Full),
            ..Config::default()
        };
        for name in ["ethanol.mol", "menthol.mol", "caffeine.mol"] {
            let m = Molecule::analyze(load(name), &config).unwrap();
            assert_eq!(m.clusters.clusters.len(), 1, "{name}");
            assert_eq!(m.clusters.coupled_sites(), m.sites.len(), "{name}");
        }
    }

    #[test]
    fn hardness_flags() {
        assert_eq!(
            Hardness::of(15),
            Hardness {
                n_ge_16: false,
                n_ge_20: false,
                n_ge_32: false
            }
        );
        assert_eq!(
            Hardness::of(20),
            Hardness {
                n_ge_16: true,
                n_ge_20: true,
                n_ge_32: false
            }
        );
        assert!(Hardness::of(32).n_ge_32);
    }

    #[test]
    fn estimate_and_physical() {
        let config = Config::default();
        let m = Molecule::analyze(load("menthol.mol"), &config).unwrap();
        let mut r = m.estimate(&config, 1, CostLedger::standard()).unwrap();
        assert_eq!(r.clusters.len(), m.clusters.clusters.len());
        assert!(r.aggregate.below_t_band.unwrap());
        r.attach_physical(&config, &reference_machines()).unwrap();
        let p = r.physical.as_ref().unwrap();
        assert!(p.feasible);
        assert_eq!(p.machines.len(), 3);
        assert!(p.total_shots >= r.aggregate.n_shots);
    }

    #[test]
    fn below_threshold_has_no_physical_mapping() {
        let config = Config::default();
        let m = Molecule::analyze(load("methane.mol"), &config).unwrap();
        let mut r = m.estimate(&config, 20, CostLedger::standard()).unwrap();
        assert!(r.aggregate.empty);
        r.attach_physical(&config, &reference_machines()).unwrap();
        assert!(r.physical.is_none());
    }

    #[test]
    fn shot_equivalents_round_up() {
        assert_eq!(equivalent_shots(10, 3), 4);
        assert_eq!(equivalent_shots(9, 3), 3);
        assert_eq!(equivalent_shots(9, 0), 0);
    }
}
