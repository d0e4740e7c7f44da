//! Molecular structure input and spin-site selection.

mod elements;
mod mol;
mod xyz;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

pub use elements::Element;
pub use xyz::{infer_bonds, BOND_TOLERANCE};

use crate::constants::GyromagneticRatios;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub element: Element,
    /// Mass number when the input pins one; `None` means "most abundant
    /// spin-½ isotope" for the active species.
    pub isotope: Option<u16>,
    /// Cartesian position in Å.
    pub position: [f64; 3],
}

impl Atom {
    pub fn new(element: Element, position: [f64; 3]) -> Self {
        Self {
            element,
            isotope: None,
            position,
        }
    }

    pub fn distance(&self, other: &Atom) -> f64 {
        let d = displacement(self.position, other.position);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

pub(crate) fn displacement(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
}

/// An undirected bond; the atom pair is stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub atoms: (usize, usize),
    pub order: u8,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: u8) -> Self {
        Self {
            atoms: (a.min(b), a.max(b)),
            order,
        }
    }
}

/// Atoms plus a simple bond graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolecularGraph {
    pub name: String,
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
}

impl MolecularGraph {
    pub fn new(name: impl Into<String>, atoms: Vec<Atom>) -> Self {
        Self {
            name: name.into(),
            atoms,
            bonds: Vec::new(),
        }
    }

    /// Adds a bond, rejecting out-of-range indices, self-bonds and duplicates.
    pub fn add_bond(&mut self, bond: Bond) -> Result<()> {
        let (a, b) = bond.atoms;
        if b >= self.atoms.len() {
            return Err(Error::Config(format!(
                "bond {}-{} references a missing atom",
                a + 1,
                b + 1
            )));
        }
        if a == b {
            return Err(Error::Config(format!("self-bond on atom {}", a + 1)));
        }
        if self.bonds.iter().any(|x| x.atoms == bond.atoms) {
            return Err(Error::Config(format!("duplicate bond {}-{}", a + 1, b + 1)));
        }
        self.bonds.push(bond);
        Ok(())
    }

    pub fn to_molfile(&self) -> String {
        mol::write(self)
    }

    fn petgraph(&self) -> (UnGraph<(), ()>, Vec<NodeIndex>) {
        let mut g = UnGraph::<(), ()>::with_capacity(self.atoms.len(), self.bonds.len());
        let nodes: Vec<NodeIndex> = (0..self.atoms.len()).map(|_| g.add_node(())).collect();
        for bond in &self.bonds {
            g.add_edge(nodes[bond.atoms.0], nodes[bond.atoms.1], ());
        }
        (g, nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureFormat {
    MolV2000,
    Xyz,
}

impl StructureFormat {
    /// Guesses the format from a file extension.
    pub fn sniff(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "mol" | "mdl" | "sdf" => Some(Self::MolV2000),
            "xyz" => Some(Self::Xyz),
            _ => None,
        }
    }
}

impl FromStr for StructureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mol" | "molv2000" | "v2000" => Ok(Self::MolV2000),
            "xyz" => Ok(Self::Xyz),
            other => Err(Error::Config(format!("unknown structure format {other:?}"))),
        }
    }
}

/// Parses a structure file held in memory.
pub fn parse_structure(bytes: &[u8], format: StructureFormat) -> Result<MolecularGraph> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::parse(1, format!("not UTF-8: {e}")))?;
    match format {
        StructureFormat::MolV2000 => mol::parse(text),
        StructureFormat::Xyz => xyz::parse(text),
    }
}

/// The three spin-½ species handled by the Hamiltonian builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Nucleus {
    #[serde(rename = "1H")]
    H1,
    #[serde(rename = "13C")]
    C13,
    #[serde(rename = "15N")]
    N15,
}

impl Nucleus {
    pub fn element(self) -> Element {
        match self {
            Nucleus::H1 => Element::H,
            Nucleus::C13 => Element::C,
            Nucleus::N15 => Element::N,
        }
    }

    pub fn mass_number(self) -> u16 {
        match self {
            Nucleus::H1 => 1,
            Nucleus::C13 => 13,
            Nucleus::N15 => 15,
        }
    }

    /// Element symbol used as the key in coupling tables.
    pub fn code(self) -> &'static str {
        self.element().symbol()
    }

    pub fn gamma(self, ratios: &GyromagneticRatios) -> f64 {
        match self {
            Nucleus::H1 => ratios.h1,
            Nucleus::C13 => ratios.c13,
            Nucleus::N15 => ratios.n15,
        }
    }

    fn from_element(element: Element) -> Option<Self> {
        [Nucleus::H1, Nucleus::C13, Nucleus::N15]
            .into_iter()
            .find(|n| n.element() == element)
    }
}

impl fmt::Display for Nucleus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.mass_number(), self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NucleusSet {
    /// ¹H only.
    Proton,
    /// ¹H, ¹³C and ¹⁵N.
    #[serde(alias = "hetero")]
    Heteronuclear,
}

impl NucleusSet {
    pub fn contains(self, nucleus: Nucleus) -> bool {
        match self {
            NucleusSet::Proton => nucleus == Nucleus::H1,
            NucleusSet::Heteronuclear => true,
        }
    }
}

impl FromStr for NucleusSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "proton" | "h" => Ok(Self::Proton),
            "hetero" | "heteronuclear" => Ok(Self::Heteronuclear),
            other => Err(Error::Config(format!("unknown nucleus set {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipolarMode {
    None,
    /// Residual dipolar couplings, scaled by `kappa`.
    Rdc,
    Full,
}

impl FromStr for DipolarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "rdc" => Ok(Self::Rdc),
            "full" | "dipolar" => Ok(Self::Full),
            other => Err(Error::Config(format!("unknown dipolar mode {other:?}"))),
        }
    }
}

/// Which nuclei are active and which couplings are switched on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeConfig {
    pub nucleus_set: NucleusSet,
    pub dipolar_mode: DipolarMode,
    /// RDC scale; ignored (treated as 1) in `Full` mode.
    pub kappa: f64,
    /// Through-space cutoff for dipolar terms, Å.
    pub r_cut: f64,
    pub max_bond_separation: u32,
    /// Drop protons bonded to O, N or S.
    pub exclude_exchangeable: bool,
    pub gyromagnetic: GyromagneticRatios,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self {
            nucleus_set: NucleusSet::Proton,
            dipolar_mode: DipolarMode::None,
            kappa: 1.0e-3,
            r_cut: 4.0,
            max_bond_separation: 4,
            exclude_exchangeable: false,
            gyromagnetic: GyromagneticRatios::default(),
        }
    }
}

impl RegimeConfig {
    pub fn new(nucleus_set: NucleusSet, dipolar_mode: DipolarMode) -> Self {
        Self {
            nucleus_set,
            dipolar_mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::Config(format!(
                "kappa must lie in (0, 1], got {}",
                self.kappa
            )));
        }
        if !(self.r_cut > 0.0 && self.r_cut.is_finite()) {
            return Err(Error::Config(format!(
                "r_cut must be positive, got {}",
                self.r_cut
            )));
        }
        if self.max_bond_separation < 1 {
            return Err(Error::Config(
                "max_bond_separation must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// The dipolar scale actually applied: `kappa` for RDCs, 1 for full
    /// dipolar couplings and 0 when dipolar terms are off.
    pub fn dipolar_scale(&self) -> f64 {
        match self.dipolar_mode {
            DipolarMode::None => 0.0,
            DipolarMode::Rdc => self.kappa,
            DipolarMode::Full => 1.0,
        }
    }

    /// Short label such as `proton+rdc`.
    pub fn label(&self) -> String {
        let base = match self.nucleus_set {
            NucleusSet::Proton => "proton",
            NucleusSet::Heteronuclear => "hetero",
        };
        match self.dipolar_mode {
            DipolarMode::None => base.to_string(),
            DipolarMode::Rdc => format!("{base}+rdc"),
            DipolarMode::Full => format!("{base}+dipolar"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinSite {
    pub atom_index: usize,
    pub species: Nucleus,
    /// rad·s⁻¹·T⁻¹
    pub gamma: f64,
}

/// Picks every atom whose element belongs to the regime's nucleus set, in
/// atom-index order.
pub fn select_spin_sites(graph: &MolecularGraph, regime: &RegimeConfig) -> Vec<SpinSite> {
    graph
        .atoms
        .iter()
        .enumerate()
        .filter_map(|(i, atom)| {
            let species = Nucleus::from_element(atom.element)?;
            if !regime.nucleus_set.contains(species) {
                return None;
            }
            if atom.isotope.is_some_and(|m| m != species.mass_number()) {
                return None;
            }
            if regime.exclude_exchangeable && species == Nucleus::H1 && is_exchangeable(graph, i) {
                return None;
            }
            Some(SpinSite {
                atom_index: i,
                species,
                gamma: species.gamma(&regime.gyromagnetic),
            })
        })
        .collect()
}

fn is_exchangeable(graph: &MolecularGraph, atom: usize) -> bool {
    graph.bonds.iter().any(|b| {
        let other = match b.atoms {
            (a, o) if a == atom => o,
            (o, a) if a == atom => o,
            _ => return false,
        };
        matches!(graph.atoms[other].element, e if e == Element::O || e == Element::N || e == Element::S)
    })
}

/// Shortest-path bond counts between all atom pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondDistances {
    n: usize,
    hops: Vec<Option<u32>>,
}

impl BondDistances {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `None` when the atoms sit in disconnected fragments.
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        self.hops[i * self.n + j]
    }
}

pub fn bond_distance_matrix(graph: &MolecularGraph) -> BondDistances {
    let n = graph.atoms.len();
    let (g, nodes) = graph.petgraph();
    let mut hops = vec![None; n * n];
    for (i, &source) in nodes.iter().enumerate() {
        let dist = petgraph::algo::dijkstra(&g, source, None, |_| 1u32);
        for (node, d) in dist {
            hops[i * n + node.index()] = Some(d);
        }
    }
    BondDistances { n, hops }
}
