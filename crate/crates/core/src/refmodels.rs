//! Pauli Hamiltonians for two condensed-matter reference problems.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcost::SimulationBudget;
use crate::spinham::{Axis, PauliTerm, SpinHamiltonian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    J1J2Triangular,
    FermiHubbardSquare,
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "j1j2" | "j1j2_triangular" => Ok(Self::J1J2Triangular),
            "fh" | "fermi_hubbard" | "fermi_hubbard_square" => Ok(Self::FermiHubbardSquare),
            other => Err(Error::Config(format!(
                "unknown lattice kind {other:?}; expected j1j2 or fh"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub lx: usize,
    pub ly: usize,
    /// `(J1, J2)` in Hz, or `(J, U)` in units of a 1 Hz hopping.
    pub couplings: (f64, f64),
    pub boundary: Boundary,
}

impl LatticeSpec {
    /// `J1 = 1 Hz`, `J2 = 0.5 Hz`.
    pub fn j1j2(lx: usize, ly: usize) -> Self {
        Self {
            kind: LatticeKind::J1J2Triangular,
            lx,
            ly,
            couplings: (1.0, 0.5),
            boundary: Boundary::Open,
        }
    }

    /// `J = 1`, `U/J = −4`.
    pub fn fermi_hubbard(lx: usize, ly: usize) -> Self {
        Self {
            kind: LatticeKind::FermiHubbardSquare,
            lx,
            ly,
            couplings: (1.0, -4.0),
            boundary: Boundary::Open,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self.kind {
            LatticeKind::J1J2Triangular => self.lx * self.ly,
            LatticeKind::FermiHubbardSquare => 2 * self.lx * self.ly,
        }
    }

    fn validate(&self, kind: LatticeKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::domain(format!(
                "expected a {kind:?} lattice, got {:?}",
                self.kind
            )));
        }
        if self.lx == 0 || self.ly == 0 {
            return Err(Error::domain("lattice extents must be at least 1"));
        }
        if !(self.couplings.0.is_finite() && self.couplings.1.is_finite()) {
            return Err(Error::domain("lattice couplings must be finite"));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<SpinHamiltonian> {
        match self.kind {
            LatticeKind::J1J2Triangular => build_j1j2(self),
            LatticeKind::FermiHubbardSquare => build_fermi_hubbard(self),
        }
    }
}

const NN: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, 1)];
const NNN: [(i64, i64); 3] = [(1, 1), (2, -1), (-1, 2)];

fn lattice_edges(lx: usize, ly: usize, offsets: &[(i64, i64)]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for y in 0..ly as i64 {
        for x in 0..lx as i64 {
            for &(dx, dy) in offsets {
                let (u, v) = (x + dx, y + dy);
                if (0..lx as i64).contains(&u) && (0..ly as i64).contains(&v) {
                    let a = (y * lx as i64 + x) as usize;
                    let b = (v * lx as i64 + u) as usize;
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    edges.sort_unstable();
    edges
}

pub type EdgeList = Vec<(usize, usize)>;

/// Nearest and next-nearest neighbour pairs of an open `lx × ly` triangular
/// parallelogram, site `(x, y)` at index `y·lx + x`.
pub fn triangular_edges(lx: usize, ly: usize) -> (EdgeList, EdgeList) {
    (lattice_edges(lx, ly, &NN), lattice_edges(lx, ly, &NNN))
}

fn heisenberg_terms(edges: &[(usize, usize)], j: f64) -> impl Iterator<Item = PauliTerm> + '_ {
    edges
        .iter()
        .flat_map(move |&(a, b)| Axis::ALL.map(|ax| PauliTerm::two_site(j, (a, ax), (b, ax))))
}

pub fn build_j1j2(spec: &LatticeSpec) -> Result<SpinHamiltonian> {
    spec.validate(LatticeKind::J1J2Triangular)?;
    let (nn, nnn) = triangular_edges(spec.lx, spec.ly);
    let (j1, j2) = spec.couplings;
    let terms = heisenberg_terms(&nn, j1)
        .chain(heisenberg_terms(&nnn, j2))
        .collect();
    SpinHamiltonian::new(spec.n_qubits(), terms)
}

/// `P_a Z…Z P_b` with Z on every qubit strictly between `a < b`.
fn jw_string(a: usize, b: usize, axis: Axis, coefficient: f64) -> PauliTerm {
    let mut factors = vec![(a, axis)];
    factors.extend((a + 1..b).map(|q| (q, Axis::Z)));
    factors.push((b, axis));
    PauliTerm::new(coefficient, factors)
}

/// Jordan–Wigner Fermi–Hubbard model with rows of `2·lx` spin orbitals
/// (odd positions spin-up, even spin-down) and qubit `(j, k) = 2·lx·(j−1) + k`
/// counted from one. The identity part of the on-site term is kept as the
/// Hamiltonian offset.
pub fn build_fermi_hubbard(spec: &LatticeSpec) -> Result<SpinHamiltonian> {
    spec.validate(LatticeKind::FermiHubbardSquare)?;
    let (nx, ny) = (spec.lx, spec.ly);
    let (j, u) = spec.couplings;
    let q = |row: usize, k: usize| 2 * nx * (row - 1) + k - 1;
    let mut terms = Vec::new();

    for row in 1..=ny {
        for k in 1..nx {
            for (a, b) in [(2 * k - 1, 2 * k + 1), (2 * k, 2 * k + 2)] {
                for axis in [Axis::X, Axis::Y] {
                    terms.push(jw_string(q(row, a), q(row, b), axis, j / 2.0));
                }
            }
        }
    }
    let vertical = if nx % 2 == 0 { j / 2.0 } else { -j / 2.0 };
    for row in 1..ny {
        for k in 1..=2 * nx {
            for axis in [Axis::X, Axis::Y] {
                terms.push(jw_string(q(row, k), q(row + 1, k), axis, vertical));
            }
        }
    }
    for row in 1..=ny {
        for k in 1..=nx {
            let (a, b) = (q(row, 2 * k - 1), q(row, 2 * k));
            terms.push(PauliTerm::new(u / 4.0, vec![(a, Axis::Z)]));
            terms.push(PauliTerm::new(u / 4.0, vec![(b, Axis::Z)]));
            terms.push(PauliTerm::two_site(u / 4.0, (a, Axis::Z), (b, Axis::Z)));
        }
    }
    Ok(SpinHamiltonian::new(spec.n_qubits(), terms)?.with_offset(u * (nx * ny) as f64 / 4.0))
}

/// `t_max` for Fermi–Hubbard in units of `1/J`. With `J = 1 Hz` and phases
/// `2π·(Hz)·t` this is 200 s.
pub const FH_T_MAX_DIMENSIONLESS: f64 = 2.0 * std::f64::consts::PI * 200.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePreset {
    pub name: String,
    pub kind: LatticeKind,
    pub couplings: (f64, f64),
    /// Unitary error fixed at `epsilon_max`; `t2 = t_max` keeps ε(t_max) at the cap.
    pub budget: SimulationBudget,
}

/// Budgets for the two reference models: ε = 10⁻³ and μ = 10 bits.
pub fn reference_budgets() -> Vec<ReferencePreset> {
    let budget = |t_max: f64| SimulationBudget {
        t_max,
        t2: t_max,
        epsilon_max: 1e-3,
        coeff_bits: 10,
        ..Default::default()
    };
    vec![
        ReferencePreset {
            name: "j1j2".into(),
            kind: LatticeKind::J1J2Triangular,
            couplings: (1.0, 0.5),
            budget: budget(1.0),
        },
        ReferencePreset {
            name: "fh".into(),
            kind: LatticeKind::FermiHubbardSquare,
            couplings: (1.0, -4.0),
            budget: budget(FH_T_MAX_DIMENSIONLESS / (2.0 * std::f64::consts::PI)),
        },
    ]
}
