use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{czero, Eigensystem};
use crate::error::{Error, Result};
use crate::spinham::SpinHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// `Σ σ^z_k / 2`.
    Sz,
    /// `Σ (γ_k/γ_H) σ^z_k / 2`.
    Mz,
}

impl FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sz" | "unweighted" => Ok(Self::Sz),
            "mz" | "weighted" | "gamma" => Ok(Self::Mz),
            other => Err(Error::domain(format!(
                "unknown observable {other:?}; expected sz or mz"
            ))),
        }
    }
}

/// Diagonal z-observable `Σ w_k σ^z_k / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub kind: ObservableKind,
    pub weights: Vec<f64>,
}

impl Observable {
    pub fn sz(n_spins: usize) -> Self {
        Self {
            kind: ObservableKind::Sz,
            weights: vec![1.0; n_spins],
        }
    }

    /// Weights `γ_k / γ_ref`.
    pub fn mz(gammas: &[f64], gamma_ref: f64) -> Self {
        Self {
            kind: ObservableKind::Mz,
            weights: gammas.iter().map(|g| g / gamma_ref).collect(),
        }
    }

    /// Value on computational basis state `b`.
    pub fn diagonal(&self, b: usize) -> f64 {
        let n = self.weights.len();
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| {
                if b >> (n - 1 - k) & 1 == 0 {
                    0.5 * w
                } else {
                    -0.5 * w
                }
            })
            .sum()
    }
}

/// Diagonal initial density matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `I / 2^N`.
    Uniform,
    /// `∝ e^{β S}` for the chosen observable `S`.
    ThermalZ { beta: f64 },
    /// Equal mixture of the listed basis states.
    BasisStates { states: Vec<usize> },
}

impl InitialState {
    /// Up to `N²` distinct basis states drawn with a fixed seed.
    pub fn sampled(n_spins: usize, seed: u64) -> Self {
        let dim = 1usize << n_spins;
        let count = (n_spins * n_spins).clamp(1, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut states = sample(&mut rng, dim, count).into_vec();
        states.sort_unstable();
        Self::BasisStates { states }
    }

    fn diagonal(&self, obs: &Observable, dim: usize) -> Result<Vec<f64>> {
        let mut rho = match self {
            Self::Uniform => vec![1.0; dim],
            Self::ThermalZ { beta } => {
                let s: Vec<f64> = (0..dim).map(|b| beta * obs.diagonal(b)).collect();
                let top = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                s.iter().map(|v| (v - top).exp()).collect()
            }
            Self::BasisStates { states } => {
                if states.is_empty() {
                    return Err(Error::domain("basis-state ensemble is empty"));
                }
                let mut rho = vec![0.0; dim];
                for &b in states {
                    if b >= dim {
                        return Err(Error::domain(format!(
                            "basis state {b} outside dimension {dim}"
                        )));
                    }
                    rho[b] += 1.0;
                }
                rho
            }
        };
        let total: f64 = rho.iter().sum();
        rho.iter_mut().for_each(|v| *v /= total);
        Ok(rho)
    }
}

/// Samples of `tr[e^{iHt} S e^{−iHt} S ρ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    /// s.
    pub timepoints: Vec<f64>,
    pub values: Vec<Complex64>,
    pub observable: ObservableKind,
}

impl CorrelationTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re,im\n");
        for (t, v) in self.timepoints.iter().zip(&self.values) {
            let _ = writeln!(out, "{t:.12e},{:.12e},{:.12e}", v.re, v.im);
        }
        out
    }

    /// Largest deviation from the first sample.
    pub fn variation(&self) -> f64 {
        let first = self.values.first().copied().unwrap_or_default();
        self.values
            .iter()
            .map(|v| (v - first).norm())
            .fold(0.0, f64::max)
    }
}

pub fn correlator(
    h: &SpinHamiltonian,
    rho0: &InitialState,
    observable: &Observable,
    times: &[f64],
) -> Result<CorrelationTrace> {
    let n = h.n_spins();
    if observable.weights.len() != n {
        return Err(Error::domain(format!(
            "observable has {} weights for {n} spins",
            observable.weights.len()
        )));
    }
    let eig = Eigensystem::of(h)?;
    let dim = 1usize << n;
    let s: Vec<f64> = (0..dim).map(|b| observable.diagonal(b)).collect();
    let rho = rho0.diagonal(observable, dim)?;
    let v = &eig.vectors;
    let vs = DMatrix::from_fn(dim, dim, |r, c| v[(r, c)] * s[r]);
    let vsr = DMatrix::from_fn(dim, dim, |r, c| v[(r, c)] * (s[r] * rho[r]));
    let s_eig = v.adjoint() * vs;
    let b_eig = v.adjoint() * vsr;
    // C(t) = Σ_ab S_ab B_ba e^{i2π(E_a − E_b)t}
    let weights = DMatrix::from_fn(dim, dim, |a, b| s_eig[(a, b)] * b_eig[(b, a)]);
    let energies: Vec<f64> = eig.values.iter().copied().collect();

    let values = times
        .par_iter()
        .map(|&t| {
            let w = 2.0 * PI * t;
            let left: Vec<Complex64> = energies
                .iter()
                .map(|e| Complex64::from_polar(1.0, w * e))
                .collect();
            let right: Vec<Complex64> = energies
                .iter()
                .map(|e| Complex64::from_polar(1.0, -w * e))
                .collect();
            let mut acc = czero();
            for b in 0..dim {
                let mut col = czero();
                for a in 0..dim {
                    col += left[a] * weights[(a, b)];
                }
                acc += col * right[b];
            }
            acc
        })
        .collect();
    Ok(CorrelationTrace {
        timepoints: times.to_vec(),
        values,
        observable: observable.kind,
    })
}
