use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::{PauliTerm, SpinHamiltonian};

/// Register-layout statistics of one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterMetrics {
    pub n_spins: usize,
    /// `N_c`, the number of Pauli terms.
    pub n_terms: usize,
    /// Distinct coupled pairs.
    pub n_pairs: usize,
    /// `N_c / N`.
    pub degree: f64,
    pub mean_distance: f64,
    pub max_distance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Register indices in the parent Hamiltonian, ascending.
    pub sites: Vec<usize>,
    /// Induced Hamiltonian re-indexed to `0..sites.len()`.
    pub hamiltonian: SpinHamiltonian,
    pub metrics: RegisterMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub clusters: Vec<Cluster>,
}

impl ClusterReport {
    pub fn largest(&self) -> Option<&Cluster> {
        self.clusters.first()
    }

    pub fn coupled_sites(&self) -> usize {
        self.clusters.iter().map(|c| c.sites.len()).sum()
    }
}

/// Splits `h` into connected components of its term-support graph, largest
/// first (ties broken by lowest original site). Sites touched by no term are
/// left out.
pub fn decompose_clusters(h: &SpinHamiltonian) -> ClusterReport {
    let n = h.n_spins();
    let mut uf = UnionFind::<usize>::new(n);
    let mut touched = vec![false; n];
    for term in h.terms() {
        let mut sites = term.sites();
        if let Some(first) = sites.next() {
            touched[first] = true;
            for s in sites {
                touched[s] = true;
                uf.union(first, s);
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for site in (0..n).filter(|&s| touched[s]) {
        groups.entry(uf.find(site)).or_default().push(site);
    }
    let mut members: Vec<Vec<usize>> = groups.into_values().collect();
    members.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let mut owner = vec![usize::MAX; n];
    for (c, sites) in members.iter().enumerate() {
        for &s in sites {
            owner[s] = c;
        }
    }
    let mut cluster_terms: Vec<Vec<PauliTerm>> = vec![Vec::new(); members.len()];
    for term in h.terms() {
        let c = owner[term.factors[0].0];
        let sites = &members[c];
        let factors = term
            .factors
            .iter()
            .map(|&(s, axis)| {
                (
                    sites.binary_search(&s).expect("site in its own cluster"),
                    axis,
                )
            })
            .collect();
        cluster_terms[c].push(PauliTerm::new(term.coefficient, factors));
    }

    let clusters = members
        .into_iter()
        .zip(cluster_terms)
        .map(|(sites, terms)| {
            let hamiltonian =
                SpinHamiltonian::new(sites.len(), terms).expect("induced terms stay valid");
            let metrics = register_metrics(&hamiltonian);
            Cluster {
                sites,
                hamiltonian,
                metrics,
            }
        })
        .collect();
    ClusterReport { clusters }
}

/// Distances `|i - j|` between coupled register positions, counting each
/// coupled pair once. Multi-site strings count their two end points.
pub fn register_metrics(h: &SpinHamiltonian) -> RegisterMetrics {
    let pairs: BTreeSet<(usize, usize)> = h
        .terms()
        .iter()
        .filter(|t| t.factors.len() >= 2)
        .map(|t| (t.factors[0].0, t.factors[t.factors.len() - 1].0))
        .collect();
    let n_pairs = pairs.len();
    let total: usize = pairs.iter().map(|(a, b)| b - a).sum();
    let max_distance = pairs.iter().map(|(a, b)| b - a).max().unwrap_or(0);
    let n = h.n_spins();
    RegisterMetrics {
        n_spins: n,
        n_terms: h.n_terms(),
        n_pairs,
        degree: if n == 0 {
            0.0
        } else {
            h.n_terms() as f64 / n as f64
        },
        mean_distance: if n_pairs == 0 {
            0.0
        } else {
            total as f64 / n_pairs as f64
        },
        max_distance,
    }
}
