//! Exact dense simulation of small spin systems.

mod block;
mod correlator;
mod spectrum;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub use block::{
    gqsp_crosscheck, verify_block_encoding, BlockEncodingReport, BLOCK_MAX_SPINS, BLOCK_MAX_TERMS,
};
pub use correlator::{correlator, CorrelationTrace, InitialState, Observable, ObservableKind};
pub use spectrum::{find_peaks, pchip, spectrum, Peak, Spectrum};

use crate::error::{Error, Result};
use crate::spinham::{Axis, PauliTerm, SpinHamiltonian};

/// Largest register the dense oracle accepts.
pub const MAX_DENSE_SPINS: usize = 14;

pub(crate) fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `(x mask, z mask, number of Y factors)`; site 0 is the most significant bit.
fn masks(term: &PauliTerm, n: usize) -> (usize, usize, u32) {
    let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
    for &(site, axis) in &term.factors {
        let bit = 1usize << (n - 1 - site);
        match axis {
            Axis::X => x |= bit,
            Axis::Z => z |= bit,
            Axis::Y => {
                x |= bit;
                z |= bit;
                ny += 1;
            }
        }
    }
    (x, z, ny)
}

fn i_pow(k: u32) -> Complex64 {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][(k % 4) as usize]
}

/// Adds `scale · Λ` to `m` for one Pauli string.
pub(crate) fn add_pauli(m: &mut DMatrix<Complex64>, term: &PauliTerm, n: usize, scale: f64) {
    let (x, z, ny) = masks(term, n);
    let phase = i_pow(ny) * scale;
    for b in 0..(1usize << n) {
        let sign = if (b & z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        m[(b ^ x, b)] += phase * sign;
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_SPINS {
        return Err(Error::Refused(format!(
            "{n} spins exceed the dense oracle cap of {MAX_DENSE_SPINS}"
        )));
    }
    Ok(())
}

/// Dense matrix of a single Pauli string.
pub fn pauli_matrix(term: &PauliTerm, n: usize) -> Result<DMatrix<Complex64>> {
    check_size(n)?;
    let mut m = DMatrix::zeros(1 << n, 1 << n);
    add_pauli(&mut m, &PauliTerm::new(1.0, term.factors.clone()), n, 1.0);
    Ok(m)
}

/// `Σ c_i Λ_i` in Hz (the identity offset is not included).
pub fn dense_matrix(h: &SpinHamiltonian) -> Result<DMatrix<Complex64>> {
    let n = h.n_spins();
    check_size(n)?;
    let mut m = DMatrix::zeros(1 << n, 1 << n);
    for term in h.terms() {
        add_pauli(&mut m, term, n, term.coefficient);
    }
    Ok(m)
}

/// Eigenvalues (Hz, ascending order not guaranteed) and eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigensystem {
    pub fn of_matrix(m: DMatrix<Complex64>) -> Self {
        let eig = SymmetricEigen::new(m);
        Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn of(h: &SpinHamiltonian) -> Result<Self> {
        Ok(Self::of_matrix(dense_matrix(h)?))
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `e^{−i2πHt} ψ` with `H` in Hz and `t` in s.
    pub fn evolve(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let mut coeffs = self.vectors.adjoint() * psi;
        for (c, e) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * e * t);
        }
        &self.vectors * coeffs
    }

    /// `e^{−i2πHt}` as a matrix.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let phases = DVector::from_iterator(
            self.values.len(),
            self.values
                .iter()
                .map(|e| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * e * t)),
        );
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| {
            self.vectors[(r, c)] * phases[c]
        });
        scaled * self.vectors.adjoint()
    }
}

/// `e^{−i2πHt} ψ`.
pub fn evolve(h: &SpinHamiltonian, psi: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
    if psi.len() != 1 << h.n_spins() {
        return Err(Error::domain("state dimension does not match the register"));
    }
    Ok(Eigensystem::of(h)?.evolve(psi, t))
}
