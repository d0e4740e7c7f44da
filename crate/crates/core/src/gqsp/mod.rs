//! Generalized quantum signal processing for `e^{iτ cos θ}`: Jacobi–Anger
//! truncation, complementary polynomial, and SU(2) phase sequences.

mod bessel;
mod phases;

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bessel::bessel_j_sequence;
pub use phases::{
    complete_polynomial, generate_phases, phases_for_polynomial, reconstruct, reconstruction_error,
    rotation, PhaseSequence, PhaseTuple, COMPLETION_TOLERANCE, NORMALIZATION_TOLERANCE, PRESCALE,
};

use crate::error::{Error, Result};

/// Truncated Jacobi–Anger expansion of `e^{iτ cos θ}` to Laurent degree `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GqspPlan {
    pub tau: f64,
    /// Target error; `None` for a plan built at an explicit degree.
    pub epsilon: Option<f64>,
    pub degree: usize,
    /// `i^n J_n(τ)` for `n = -d..=d`.
    pub coefficients: Vec<Complex64>,
    pub phases: Option<PhaseSequence>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )))
    }
}

/// `d = ⌈e|τ|/2 + log10(1/ε)⌉`.
pub fn degree_for(tau: f64, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    if !tau.is_finite() {
        return Err(Error::domain(format!("tau must be finite, got {tau}")));
    }
    let raw = E * tau.abs() / 2.0 - epsilon.log10();
    // Snap values that are integral up to rounding so that e.g. ε = 1e-3 at
    // τ = 0 gives exactly 3.
    let snapped = if (raw - raw.round()).abs() <= 1e-12 * raw.abs().max(1.0) {
        raw.round()
    } else {
        raw.ceil()
    };
    Ok(snapped as usize)
}

fn jacobi_anger(tau: f64, degree: usize) -> Vec<Complex64> {
    let j = bessel_j_sequence(degree, tau);
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    // i^{-n} J_{-n} = i^{-n} (-1)^n J_n = i^n J_n, so the series is symmetric.
    (0..=2 * degree)
        .map(|k| {
            let n = k.abs_diff(degree);
            i_pow[n % 4] * j[n]
        })
        .collect()
}

impl GqspPlan {
    pub fn for_tau(tau: f64, epsilon: f64) -> Result<Self> {
        let degree = degree_for(tau, epsilon)?;
        Ok(Self {
            epsilon: Some(epsilon),
            ..Self::with_degree(tau, degree)
        })
    }

    pub fn with_degree(tau: f64, degree: usize) -> Self {
        Self {
            tau,
            epsilon: None,
            degree,
            coefficients: jacobi_anger(tau, degree),
            phases: None,
        }
    }

    pub fn n_phases(&self) -> usize {
        2 * self.degree + 1
    }

    /// Coefficient of `e^{inθ}`.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let k = n + self.degree as i64;
        if k < 0 || k as usize >= self.coefficients.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coefficients[k as usize]
        }
    }

    /// Drops the outermost `±d` pair.
    pub fn truncated(&self) -> Self {
        let degree = self.degree.saturating_sub(1);
        let skip = self.degree - degree;
        Self {
            tau: self.tau,
            epsilon: None,
            degree,
            coefficients: self.coefficients[skip..self.coefficients.len() - skip].to_vec(),
            phases: None,
        }
    }

    /// `Σ_n c_n e^{inθ}`.
    pub fn evaluate(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * z + c;
        }
        acc * Complex64::from_polar(1.0, -(self.degree as f64) * theta)
    }

    pub fn coefficient_norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn with_phases(mut self) -> Result<Self> {
        self.phases = Some(generate_phases(&self)?);
        Ok(self)
    }
}

/// Plan for evolving a Hamiltonian of 1-norm `alpha` (Hz) for `t` seconds.
pub fn plan_degree(alpha: f64, t: f64, epsilon: f64) -> Result<GqspPlan> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    GqspPlan::for_tau(2.0 * PI * alpha * t, epsilon)
}

/// Maximum of `|e^{iτ cos θ} − Σ c_n e^{inθ}|` over `grid` uniform angles.
pub fn truncation_error(plan: &GqspPlan, grid: usize) -> f64 {
    (0..grid)
        .into_par_iter()
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / grid as f64;
            let exact = Complex64::from_polar(1.0, plan.tau * theta.cos());
            (exact - plan.evaluate(theta)).norm()
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_plan() {
        let plan = plan_degree(123.0, 0.0, 5e-3).unwrap();
        assert_eq!(plan.tau, 0.0);
        assert_eq!(plan.degree, 3);
        assert_eq!(plan.coefficient(0), Complex64::new(1.0, 0.0));
        for n in [-3, -2, -1, 1, 2, 3] {
            assert_eq!(plan.coefficient(n), Complex64::new(0.0, 0.0));
        }
        assert!(truncation_error(&plan, 512) < 1e-14);
    }

    #[test]
    fn degree_examples() {
        let plan = plan_degree(50.0, 1.0, 5e-3).unwrap();
        assert!((plan.tau - 100.0 * PI).abs() < 1e-12);
        assert_eq!(plan.degree, 430);
        assert_eq!(plan.n_phases(), 861);
        assert_eq!(degree_for(0.0, 1e-3).unwrap(), 3);
        let tau = 7.3;
        assert_eq!(
            degree_for(tau, 5e-4).unwrap(),
            degree_for(tau, 5e-3).unwrap() + 1
        );
    }

    #[test]
    fn epsilon_domain() {
        for eps in [0.0, 1.0, -0.1, 2.0, f64::NAN] {
            assert!(matches!(degree_for(1.0, eps), Err(Error::Domain(_))));
        }
        assert!(plan_degree(0.0, 1.0, 1e-3).is_err());
        assert!(plan_degree(1.0, -1.0, 1e-3).is_err());
    }

    #[test]
    fn truncation_within_epsilon_and_monotone() {
        let plan = GqspPlan::for_tau(10.0, 1e-3).unwrap();
        let err = truncation_error(&plan, 4096);
        assert!(err <= 1e-3, "{err}");
        assert!(truncation_error(&plan.truncated(), 4096) > err);
    }

    #[test]
    fn coefficients_are_symmetric() {
        let plan = GqspPlan::for_tau(-4.2, 1e-4).unwrap();
        for n in 1..=plan.degree as i64 {
            assert_eq!(plan.coefficient(n), plan.coefficient(-n));
        }
        assert!(plan.coefficient_norm_sq() <= 1.0 + 1e-9);
    }
}
