use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{add_pauli, dense_matrix, Eigensystem};
use crate::error::{Error, Result};
use crate::gqsp::GqspPlan;
use crate::lcost::ceil_log2;
use crate::spinham::{PauliTerm, SpinHamiltonian};

pub const BLOCK_MAX_SPINS: usize = 6;
pub const BLOCK_MAX_TERMS: usize = 64;
const CROSSCHECK_MAX_SPINS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEncodingReport {
    pub n_spins: usize,
    pub n_terms: usize,
    pub index_bits: u32,
    /// Dimension of `U_H`.
    pub dimension: usize,
    /// `max |(⟨0|⊗I) U_H (|0⟩⊗I) − H/α|` with Prepare folded into `U_H`.
    pub block_error: f64,
    /// `max |U_H U_H − I|`.
    pub unitarity_error: f64,
    /// Worst distance from `e^{±i arccos λ}` to the nearest walk eigenvalue,
    /// or the residual of the invariant-subspace restriction if larger.
    pub walk_error: f64,
    pub eigenvalues_checked: usize,
}

/// Real Householder reflection taking `e_0` to the unit vector `g`.
fn householder_prepare(g: &[f64]) -> DMatrix<f64> {
    let l = g.len();
    let mut v: Vec<f64> = g.iter().map(|x| -x).collect();
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    if vv < 1e-30 {
        return DMatrix::identity(l, l);
    }
    DMatrix::from_fn(l, l, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        id - 2.0 * v[r] * v[c] / vv
    })
}

/// Builds Prepare, Select and `U_H = Prepare† · Select · Prepare`
/// explicitly and checks the encoded block and the walk-operator spectrum.
pub fn verify_block_encoding(h: &SpinHamiltonian) -> Result<BlockEncodingReport> {
    let n = h.n_spins();
    let m_terms = h.n_terms();
    if m_terms == 0 {
        return Err(Error::domain("block encoding needs at least one term"));
    }
    if n > BLOCK_MAX_SPINS || m_terms > BLOCK_MAX_TERMS {
        return Err(Error::Refused(format!(
            "block-encoding check limited to {BLOCK_MAX_SPINS} spins and {BLOCK_MAX_TERMS} terms, \
             got {n} spins and {m_terms} terms"
        )));
    }
    let alpha = h.alpha();
    let m = ceil_log2(m_terms as u64);
    let l = 1usize << m;
    let d = 1usize << n;

    let mut g = vec![0.0; l];
    for (k, t) in h.terms().iter().enumerate() {
        g[k] = (t.coefficient.abs() / alpha).sqrt();
    }
    let prep = householder_prepare(&g);

    let select: Vec<DMatrix<Complex64>> = (0..l)
        .map(|k| match h.terms().get(k) {
            Some(t) => {
                let mut s = DMatrix::zeros(d, d);
                add_pauli(
                    &mut s,
                    &PauliTerm::new(1.0, t.factors.clone()),
                    n,
                    t.coefficient.signum(),
                );
                s
            }
            None => DMatrix::identity(d, d),
        })
        .collect();

    let dim = l * d;
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..l {
        for j in 0..l {
            let mut block = DMatrix::<Complex64>::zeros(d, d);
            for (k, s) in select.iter().enumerate() {
                let w = prep[(i, k)] * prep[(k, j)];
                if w != 0.0 {
                    block += s * Complex64::new(w, 0.0);
                }
            }
            u.view_mut((i * d, j * d), (d, d)).copy_from(&block);
        }
    }

    let h_dense = dense_matrix(h)?;
    let target = &h_dense / Complex64::new(alpha, 0.0);
    let block_error = (u.view((0, 0), (d, d)) - &target)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let unitarity_error = (&u * &u - DMatrix::<Complex64>::identity(dim, dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    // W = Z_Π U_H with Z_Π = (2|0⟩⟨0| − I) ⊗ I. Its qubitized eigenspaces
    // lie in K = span{|0⟩|ψ⟩, U_H|0⟩|ψ⟩}, which W leaves invariant.
    let mut krylov = DMatrix::<Complex64>::zeros(dim, 2 * d);
    krylov
        .view_mut((0, 0), (d, d))
        .copy_from(&DMatrix::identity(d, d));
    krylov
        .view_mut((0, d), (dim, d))
        .copy_from(&u.columns(0, d));
    let mut w = u;
    for r in d..dim {
        for c in 0..dim {
            w[(r, c)] = -w[(r, c)];
        }
    }
    let svd = krylov.clone().svd(true, false);
    let u_left = svd
        .u
        .ok_or_else(|| Error::Numerical("subspace basis did not converge".into()))?;
    let s_max = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-8 * s_max)
        .collect();
    let q = u_left.select_columns(&keep);
    let wq = &w * &q;
    let restricted = q.adjoint() * &wq;
    let invariance = (wq - &q * &restricted)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let walk = restricted
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("walk operator eigenvalues did not converge".into()))?;

    // θ = atan2(‖Π⊥ U_H|0,ψ⟩‖, λ) stays accurate where arccos λ does not.
    let eig = Eigensystem::of_matrix(target);
    let lambdas = &eig.values;
    let leak = krylov.view((d, d), (dim - d, d)) * &eig.vectors;
    let mut walk_error = invariance;
    for (k, lam) in lambdas.iter().enumerate() {
        let theta = leak.column(k).norm().atan2(*lam);
        for sign in [1.0, -1.0] {
            let want = Complex64::from_polar(1.0, sign * theta);
            let nearest = walk
                .iter()
                .map(|z| (z - want).norm())
                .fold(f64::INFINITY, f64::min);
            walk_error = walk_error.max(nearest);
        }
    }
    Ok(BlockEncodingReport {
        n_spins: n,
        n_terms: m_terms,
        index_bits: m,
        dimension: dim,
        block_error,
        unitarity_error,
        walk_error,
        eigenvalues_checked: lambdas.len(),
    })
}

/// Applies the truncated Jacobi–Anger series for `e^{−i2παt·(H/α)}` to the
/// dense `H/α` by Chebyshev recursion and returns the operator-norm distance
/// to the exact propagator.
pub fn gqsp_crosscheck(h: &SpinHamiltonian, t: f64, epsilon: f64) -> Result<f64> {
    let n = h.n_spins();
    if n > CROSSCHECK_MAX_SPINS {
        return Err(Error::Refused(format!(
            "GQSP cross-check limited to {CROSSCHECK_MAX_SPINS} spins, got {n}"
        )));
    }
    let alpha = h.alpha();
    if !(alpha > 0.0) {
        return Err(Error::domain("cross-check needs a nonzero Hamiltonian"));
    }
    let plan = GqspPlan::for_tau(-2.0 * PI * alpha * t, epsilon)?;
    let dim = 1usize << n;
    let a = dense_matrix(h)? / Complex64::new(alpha, 0.0);
    let eig = Eigensystem::of_matrix(a.clone());

    // Σ_n c_n e^{inθ} = c_0 + 2 Σ_{n≥1} c_n T_n(cos θ) since c_{−n} = c_n.
    let basis = eig.vectors.clone();
    let mut t_prev = basis.clone();
    let mut t_cur = &a * &basis;
    let mut f = &t_prev * plan.coefficient(0);
    for k in 1..=plan.degree as i64 {
        f += &t_cur * (plan.coefficient(k) * 2.0);
        let next = (&a * &t_cur) * Complex64::new(2.0, 0.0) - &t_prev;
        t_prev = t_cur;
        t_cur = next;
    }
    let mut worst: f64 = 0.0;
    for c in 0..dim {
        let phase = Complex64::from_polar(1.0, -2.0 * PI * alpha * eig.values[c] * t);
        let exact: DVector<Complex64> = basis.column(c) * phase;
        let diff = (f.column(c) - exact)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(diff);
    }
    Ok(worst)
}
