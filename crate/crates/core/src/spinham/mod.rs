//! Zero-field spin Hamiltonians as linear combinations of Pauli strings.

mod build;
mod clusters;
mod couplings;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use build::build_hamiltonian;
pub use clusters::{decompose_clusters, register_metrics, Cluster, ClusterReport, RegisterMetrics};
pub use couplings::CouplingTable;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(Error::Config(format!("unknown Pauli axis {other:?}"))),
        }
    }
}

/// `coefficient · ⊗ σ^axis_site` with identity on every unlisted site.
///
/// NMR couplings produce one- and two-site strings; Jordan-Wigner mapped
/// lattice models also carry Z strings between the end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    /// Hz.
    pub coefficient: f64,
    pub factors: Vec<(usize, Axis)>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, factors: Vec<(usize, Axis)>) -> Self {
        Self {
            coefficient,
            factors,
        }
    }

    pub fn two_site(coefficient: f64, a: (usize, Axis), b: (usize, Axis)) -> Self {
        Self::new(coefficient, vec![a, b])
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|(s, _)| *s)
    }
}

/// A canonical LCU: terms sorted by support with duplicate supports merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinHamiltonian {
    n_spins: usize,
    terms: Vec<PauliTerm>,
    alpha: f64,
    /// Identity component dropped from the LCU (tracked, never encoded).
    offset: f64,
    zeeman: Option<Vec<[f64; 3]>>,
}

impl SpinHamiltonian {
    /// Validates and canonicalizes a term list.
    pub fn new(n_spins: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<(usize, Axis)>, f64> = BTreeMap::new();
        for mut term in terms {
            if !term.coefficient.is_finite() {
                return Err(Error::domain(format!(
                    "non-finite coefficient {}",
                    term.coefficient
                )));
            }
            term.factors.sort();
            if term.factors.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::domain(format!(
                    "repeated site in Pauli term {:?}",
                    term.factors
                )));
            }
            if let Some((s, _)) = term.factors.iter().find(|(s, _)| *s >= n_spins) {
                return Err(Error::domain(format!(
                    "site {s} out of range for {n_spins} spins"
                )));
            }
            if term.factors.is_empty() {
                return Err(Error::domain("identity terms belong in the offset"));
            }
            *merged.entry(term.factors).or_insert(0.0) += term.coefficient;
        }
        let terms: Vec<PauliTerm> = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(factors, coefficient)| PauliTerm {
                coefficient,
                factors,
            })
            .collect();
        let alpha = terms.iter().map(|t| t.coefficient.abs()).sum();
        Ok(Self {
            n_spins,
            terms,
            alpha,
            offset: 0.0,
            zeeman: None,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// Adds `-h_k · σ_k` for every site.
    pub fn with_zeeman(self, fields: Vec<[f64; 3]>) -> Result<Self> {
        if fields.len() != self.n_spins {
            return Err(Error::domain(format!(
                "expected {} Zeeman vectors, got {}",
                self.n_spins,
                fields.len()
            )));
        }
        let offset = self.offset;
        let mut terms = self.terms;
        for (site, h) in fields.iter().enumerate() {
            for axis in Axis::ALL {
                if h[axis.index()] != 0.0 {
                    terms.push(PauliTerm::new(-h[axis.index()], vec![(site, axis)]));
                }
            }
        }
        let mut out = Self::new(self.n_spins, terms)?.with_offset(offset);
        out.zeeman = Some(fields);
        Ok(out)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Number of LCU terms, `M`.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// 1-norm of the coefficients, Hz.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn zeeman(&self) -> Option<&[[f64; 3]]> {
        self.zeeman.as_deref()
    }

    /// Largest coefficient magnitude, an upper bound on the fastest coupling.
    pub fn max_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.abs())
            .fold(0.0, f64::max)
    }

    /// Line-oriented text form: a header with `n_spins`, `alpha` and `offset`,
    /// then one `coeff site:axis [site:axis ...]` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# zulf spin hamiltonian v1\n");
        let _ = writeln!(out, "n_spins {}", self.n_spins);
        let _ = writeln!(out, "alpha {}", self.alpha);
        let _ = writeln!(out, "offset {}", self.offset);
        for term in &self.terms {
            let _ = write!(out, "{}", term.coefficient);
            for (site, axis) in &term.factors {
                let _ = write!(out, " {site}:{axis}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_spins = None;
        let mut alpha = None;
        let mut offset = 0.0;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap_or_default();
            let number = |tok: Option<&str>| -> Result<f64> {
                tok.and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| Error::parse(line_no, format!("expected a number after {head}")))
            };
            match head {
                "n_spins" => {
                    n_spins = Some(
                        tokens
                            .next()
                            .and_then(|t| t.parse::<usize>().ok())
                            .ok_or_else(|| Error::parse(line_no, "invalid n_spins"))?,
                    )
                }
                "alpha" => alpha = Some(number(tokens.next())?),
                "offset" => offset = number(tokens.next())?,
                _ => {
                    let coefficient = head.parse::<f64>().map_err(|_| {
                        Error::parse(line_no, format!("invalid coefficient {head:?}"))
                    })?;
                    let mut factors = Vec::new();
                    for tok in tokens {
                        let (site, axis) = tok.split_once(':').ok_or_else(|| {
                            Error::parse(line_no, format!("expected site:axis, got {tok:?}"))
                        })?;
                        let site = site
                            .parse::<usize>()
                            .map_err(|_| Error::parse(line_no, format!("invalid site {site:?}")))?;
                        let axis = axis
                            .parse::<Axis>()
                            .map_err(|e| Error::parse(line_no, e.to_string()))?;
                        factors.push((site, axis));
                    }
                    if factors.is_empty() {
                        return Err(Error::parse(line_no, "term without Pauli factors"));
                    }
                    terms.push(PauliTerm::new(coefficient, factors));
                }
            }
        }
        let n_spins = n_spins.ok_or_else(|| Error::parse(1, "missing n_spins header"))?;
        let h = Self::new(n_spins, terms)?.with_offset(offset);
        if let Some(a) = alpha {
            if (a - h.alpha).abs() > 1e-9 * h.alpha.max(1.0) {
                return Err(Error::Config(format!(
                    "header alpha {a} disagrees with the term 1-norm {}",
                    h.alpha
                )));
            }
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_merge_and_cancel() {
        let h = SpinHamiltonian::new(
            3,
            vec![
                PauliTerm::two_site(1.0, (1, Axis::X), (0, Axis::X)),
                PauliTerm::two_site(2.0, (0, Axis::X), (1, Axis::X)),
                PauliTerm::two_site(1.5, (0, Axis::Z), (2, Axis::Z)),
                PauliTerm::two_site(-1.5, (2, Axis::Z), (0, Axis::Z)),
            ],
        )
        .unwrap();
        assert_eq!(h.n_terms(), 1);
        assert_eq!(h.terms()[0].coefficient, 3.0);
        assert_eq!(h.terms()[0].factors, vec![(0, Axis::X), (1, Axis::X)]);
        assert_eq!(h.alpha(), 3.0);
    }

    #[test]
    fn invalid_terms_are_rejected() {
        assert!(SpinHamiltonian::new(
            2,
            vec![PauliTerm::two_site(1.0, (0, Axis::X), (2, Axis::X))]
        )
        .is_err());
        assert!(SpinHamiltonian::new(
            2,
            vec![PauliTerm::two_site(1.0, (0, Axis::X), (0, Axis::Y))]
        )
        .is_err());
        assert!(
            SpinHamiltonian::new(2, vec![PauliTerm::new(f64::NAN, vec![(0, Axis::X)])]).is_err()
        );
    }

    #[test]
    fn text_round_trip_is_exact() {
        let h = SpinHamiltonian::new(
            4,
            vec![
                PauliTerm::two_site(0.1 + 0.2, (0, Axis::X), (3, Axis::Y)),
                PauliTerm::new(-7.25, vec![(1, Axis::Z)]),
                PauliTerm::new(0.5, vec![(0, Axis::X), (1, Axis::Z), (2, Axis::X)]),
            ],
        )
        .unwrap()
        .with_offset(-1.0);
        let text = h.to_text();
        let back = SpinHamiltonian::from_text(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_alpha_mismatch_is_an_error() {
        let text = "n_spins 2\nalpha 5\n1.0 0:X 1:X\n";
        assert!(SpinHamiltonian::from_text(text).is_err());
        let text = "n_spins 2\n1.0 0:X 1:Q\n";
        assert!(matches!(
            SpinHamiltonian::from_text(text),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn zeeman_terms_enter_with_negative_sign() {
        let h = SpinHamiltonian::new(
            2,
            vec![PauliTerm::two_site(1.0, (0, Axis::Z), (1, Axis::Z))],
        )
        .unwrap()
        .with_zeeman(vec![[0.0, 0.0, 2.0], [0.0; 3]])
        .unwrap();
        assert_eq!(h.n_terms(), 2);
        assert!(h
            .terms()
            .iter()
            .any(|t| t.factors == vec![(0, Axis::Z)] && t.coefficient == -2.0));
        assert_eq!(h.alpha(), 3.0);
    }
}
