use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::GqspPlan;
use crate::error::{Error, Result};

/// Applied before completion so that `1 − |P|²` stays strictly positive.
pub const PRESCALE: f64 = 1.0 - 1e-12;
/// Allowed excess of `max |P|` over one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Required `max | |P|² + |Q|² − 1 |` on the factorization grid.
pub const COMPLETION_TOLERANCE: f64 = 1e-10;
const MAX_GRID: usize = 1 << 24;
const MIN_GRID: usize = 1 << 12;

/// One `R(λ, φ, θ)`; only the first tuple carries a nonzero `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTuple {
    pub lambda: f64,
    pub phi: f64,
    pub theta: f64,
}

/// `2D + 1` rotations realising `scale · P` for a degree-`D` polynomial `P`
/// in `z` (the Laurent series shifted by `z^d`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSequence {
    pub scale: f64,
    pub tuples: Vec<PhaseTuple>,
    /// Complement `Q` coefficients, same degree as `P`.
    pub complement: Vec<Complex64>,
    pub completion_residual: f64,
    pub fft_grid: usize,
}

impl PhaseSequence {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,lambda,phi,theta\n");
        for (k, t) in self.tuples.iter().enumerate() {
            let _ = writeln!(out, "{k},{:.17e},{:.17e},{:.17e}", t.lambda, t.phi, t.theta);
        }
        out
    }
}

/// `R(λ, φ, θ) = [[e^{i(λ+φ)} cos θ, e^{iφ} sin θ], [e^{iλ} sin θ, −cos θ]]`.
pub fn rotation(t: &PhaseTuple) -> [[Complex64; 2]; 2] {
    let (s, c) = t.theta.sin_cos();
    [
        [
            Complex64::from_polar(c, t.lambda + t.phi),
            Complex64::from_polar(s, t.phi),
        ],
        [Complex64::from_polar(s, t.lambda), Complex64::new(-c, 0.0)],
    ]
}

struct Grid {
    n: usize,
    planner: FftPlanner<f64>,
}

impl Grid {
    fn new(n: usize) -> Self {
        Self {
            n,
            planner: FftPlanner::new(),
        }
    }

    /// Values `Σ_k c_k z_j^k` at `z_j = e^{2πij/n}`.
    fn evaluate(&mut self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for (k, c) in coeffs.iter().enumerate() {
            buf[k % self.n] += c;
        }
        self.planner.plan_fft_inverse(self.n).process(&mut buf);
        buf
    }

    /// Inverse of [`Grid::evaluate`].
    fn coefficients(&mut self, mut values: Vec<Complex64>) -> Vec<Complex64> {
        self.planner.plan_fft_forward(self.n).process(&mut values);
        let inv = 1.0 / self.n as f64;
        values.iter_mut().for_each(|v| *v *= inv);
        values
    }
}

fn grid_size(degree: usize) -> usize {
    (8 * (degree + 1)).next_power_of_two().max(MIN_GRID)
}

/// `max |P|` on the unit circle: dense sampling, then Newton refinement of
/// `|P(e^{iθ})|²` around every near-maximal sample.
pub(crate) fn max_modulus(p: &[Complex64]) -> f64 {
    let degree = p.len().saturating_sub(1);
    let n = (16 * (degree + 1)).next_power_of_two().max(MIN_GRID);
    let f: Vec<f64> = Grid::new(n)
        .evaluate(p)
        .iter()
        .map(|v| v.norm_sqr())
        .collect();
    let grid_max = f.iter().copied().fold(0.0, f64::max);
    if degree == 0 || grid_max == 0.0 {
        return grid_max.sqrt();
    }
    let h = 2.0 * PI / n as f64;
    let candidates: Vec<usize> = (0..n)
        .filter(|&j| {
            let (l, r) = (f[(j + n - 1) % n], f[(j + 1) % n]);
            f[j] >= l && f[j] >= r && f[j] >= grid_max * (1.0 - 1e-3)
        })
        .collect();
    let refined = candidates
        .par_iter()
        .map(|&j| refine_peak(p, j as f64 * h, h))
        .reduce(|| 0.0, f64::max);
    grid_max.max(refined).sqrt()
}

fn refine_peak(p: &[Complex64], theta0: f64, h: f64) -> f64 {
    let eval = |theta: f64| {
        let z = Complex64::from_polar(1.0, theta);
        let (mut v, mut d1, mut d2) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let mut zk = Complex64::new(1.0, 0.0);
        for (k, c) in p.iter().enumerate() {
            let term = c * zk;
            let kf = k as f64;
            v += term;
            d1 += term * Complex64::new(0.0, kf);
            d2 -= term * (kf * kf);
            zk *= z;
        }
        let f = v.norm_sqr();
        let f1 = 2.0 * (v.conj() * d1).re;
        let f2 = 2.0 * (d1.norm_sqr() + (v.conj() * d2).re);
        (f, f1, f2)
    };
    let (lo, hi) = (theta0 - h, theta0 + h);
    let mut theta = theta0;
    let (mut best, _, _) = eval(theta);
    for _ in 0..30 {
        let (f, f1, f2) = eval(theta);
        best = best.max(f);
        if f2 >= 0.0 || f1.abs() < 1e-300 {
            break;
        }
        let next = (theta - f1 / f2).clamp(lo, hi);
        if (next - theta).abs() < 1e-15 {
            break;
        }
        theta = next;
    }
    best.max(eval(theta).0)
}

fn factor_on_grid(p: &[Complex64], n: usize) -> Result<(Vec<Complex64>, f64)> {
    let degree = p.len() - 1;
    let mut grid = Grid::new(n);
    let pv = grid.evaluate(p);
    let mut log_g = Vec::with_capacity(n);
    for (j, v) in pv.iter().enumerate() {
        let g = 1.0 - v.norm_sqr();
        if !(g > 0.0) {
            return Err(Error::Numerical(format!(
                "1 - |P|^2 = {g:e} is not positive at grid point {j} of {n}; \
                 spectral factorization needs |P| < 1"
            )));
        }
        log_g.push(Complex64::new(g.ln(), 0.0));
    }
    // log g = Σ a_k z^k; the analytic half h with 2 Re h = log g gives Q = e^h.
    let a = grid.coefficients(log_g);
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    h[0] = a[0] * 0.5;
    h[1..n / 2].copy_from_slice(&a[1..n / 2]);
    h[n / 2] = a[n / 2] * 0.5;
    let qv: Vec<Complex64> = grid.evaluate(&h).into_iter().map(|v| v.exp()).collect();
    let mut q = grid.coefficients(qv);
    q.truncate(degree + 1);

    let qt = grid.evaluate(&q);
    let residual = pv
        .iter()
        .zip(&qt)
        .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((q, residual))
}

/// Degree-`D` `Q` with `|P|² + |Q|² = 1` on the unit circle, by cepstral
/// minimum-phase factorization of `1 − |P|²`. Returns `(Q, residual, grid)`.
pub fn complete_polynomial(p: &[Complex64]) -> Result<(Vec<Complex64>, f64, usize)> {
    if p.is_empty() {
        return Err(Error::domain("empty polynomial"));
    }
    let mut n = grid_size(p.len() - 1);
    loop {
        let (q, residual) = factor_on_grid(p, n)?;
        if residual <= COMPLETION_TOLERANCE {
            return Ok((q, residual, n));
        }
        if n >= MAX_GRID {
            return Err(Error::Numerical(format!(
                "complementary polynomial residual {residual:e} above {COMPLETION_TOLERANCE:e} \
                 at the largest grid ({n} points)"
            )));
        }
        n *= 2;
    }
}

fn strip_layers(mut p: Vec<Complex64>, mut q: Vec<Complex64>) -> Vec<PhaseTuple> {
    let degree = p.len() - 1;
    let mut layers = Vec::with_capacity(degree);
    for j in (1..=degree).rev() {
        let (a, b, a0, b0) = (p[j], q[j], p[0], q[0]);
        let (theta, phi) = if a.norm_sqr() + b.norm_sqr() >= a0.norm_sqr() + b0.norm_sqr() {
            (b.norm().atan2(a.norm()), a.arg() - b.arg())
        } else {
            (a0.norm().atan2(b0.norm()), a0.arg() - b0.arg() + PI)
        };
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, -phi);
        // Apply R(0, φ, θ)† then A(z)†: the new P loses its constant term,
        // the new Q its leading term.
        let np: Vec<Complex64> = (1..=j).map(|k| e * c * p[k] + s * q[k]).collect();
        let nq: Vec<Complex64> = (0..j).map(|k| e * s * p[k] - c * q[k]).collect();
        p = np;
        q = nq;
        layers.push(PhaseTuple {
            lambda: 0.0,
            phi,
            theta,
        });
    }
    let (a, b) = (p[0], q[0]);
    let lambda = b.arg();
    let first = PhaseTuple {
        lambda,
        phi: a.arg() - lambda,
        theta: b.norm().atan2(a.norm()),
    };
    std::iter::once(first)
        .chain(layers.into_iter().rev())
        .collect()
}

/// Phases for a polynomial `P(z) = Σ p_k z^k` with `max |P| ≤ 1` on the circle.
pub fn phases_for_polynomial(p: &[Complex64]) -> Result<PhaseSequence> {
    if p.is_empty() {
        return Err(Error::domain("empty polynomial"));
    }
    let max_modulus = max_modulus(p);
    if max_modulus > 1.0 + NORMALIZATION_TOLERANCE {
        return Err(Error::Normalization { max_modulus });
    }
    let scale = PRESCALE / max_modulus.max(1.0);
    let scaled: Vec<Complex64> = p.iter().map(|c| c * scale).collect();
    let (q, completion_residual, fft_grid) = complete_polynomial(&scaled)?;
    let tuples = strip_layers(scaled, q.clone());
    Ok(PhaseSequence {
        scale,
        tuples,
        complement: q,
        completion_residual,
        fft_grid,
    })
}

/// Phases for `z^d · P(z)`, with `P` first normalized to unit maximum
/// modulus (the truncated series overshoots one by at most ε).
pub fn generate_phases(plan: &GqspPlan) -> Result<PhaseSequence> {
    let norm = max_modulus(&plan.coefficients);
    if !(norm > 0.0) {
        return Err(Error::Numerical(
            "polynomial vanishes on the unit circle".into(),
        ));
    }
    let normalized: Vec<Complex64> = plan.coefficients.iter().map(|c| c / norm).collect();
    let mut seq = phases_for_polynomial(&normalized)?;
    seq.scale /= norm;
    Ok(seq)
}

/// `(P(z), Q(z))` from the rotation product acting on `|0⟩`.
pub fn reconstruct(seq: &PhaseSequence, z: Complex64) -> (Complex64, Complex64) {
    let r0 = rotation(&seq.tuples[0]);
    let mut v = [r0[0][0], r0[1][0]];
    for t in &seq.tuples[1..] {
        let r = rotation(t);
        let w = [z * v[0], v[1]];
        v = [
            r[0][0] * w[0] + r[0][1] * w[1],
            r[1][0] * w[0] + r[1][1] * w[1],
        ];
    }
    (v[0], v[1])
}

/// Max over `grid` points of `|reconstructed P − scale · Σ p_k z^k|`.
pub fn reconstruction_error(seq: &PhaseSequence, p: &[Complex64], grid: usize) -> f64 {
    (0..grid)
        .into_par_iter()
        .map(|j| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / grid as f64);
            let target = p
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
            (reconstruct(seq, z).0 - target * seq.scale).norm()
        })
        .reduce(|| 0.0, f64::max)
}
