use serde::{Deserialize, Serialize};

use super::SimulationBudget;
use crate::error::{Error, Result};
use crate::spinham::SpinHamiltonian;

/// Log-spaced evaluation times and the shot count per time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSchedule {
    /// s.
    pub timepoints: Vec<f64>,
    /// Hz, `max |c_i|`.
    pub f_max: f64,
    pub n_shots: u64,
}

/// `⌈1/ε²⌉`, treating values within rounding of an integer as that integer.
pub fn n_shots(epsilon_meas: f64) -> u64 {
    let x = 1.0 / (epsilon_meas * epsilon_meas);
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Times from `1/(2 f_max)` to `t_max` inclusive. A single point sits at
/// `t_max`; a Nyquist time beyond `t_max` collapses the window onto `t_max`.
pub fn log_times(f_max: f64, t_max: f64, n_points: usize) -> Vec<f64> {
    if n_points == 1 {
        return vec![t_max];
    }
    let t_min = (0.5 / f_max).min(t_max);
    let ratio = (t_max / t_min).ln();
    let mut times: Vec<f64> = (0..n_points)
        .map(|k| t_min * (ratio * k as f64 / (n_points - 1) as f64).exp())
        .collect();
    times[0] = t_min;
    times[n_points - 1] = t_max;
    times
}

pub fn schedule(h: &SpinHamiltonian, budget: &SimulationBudget) -> Result<SampleSchedule> {
    schedule_for_frequency(h.max_coefficient(), budget)
}

pub(crate) fn schedule_for_frequency(
    f_max: f64,
    budget: &SimulationBudget,
) -> Result<SampleSchedule> {
    budget.validate()?;
    if !(f_max > 0.0) {
        return Err(Error::domain(
            "schedule needs a nonzero coupling (f_max = 0)",
        ));
    }
    Ok(SampleSchedule {
        timepoints: log_times(f_max, budget.t_max, budget.n_points),
        f_max,
        n_shots: n_shots(budget.epsilon_meas),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shot_counts() {
        assert_eq!(n_shots(0.01), 10_000);
        assert_eq!(n_shots(0.05), 400);
        assert_eq!(n_shots(0.3), 12);
    }

    #[test]
    fn four_point_schedule() {
        let t = log_times(50.0, 1.0, 4);
        let want = [0.01, 0.046416, 0.215443, 1.0];
        for (a, b) in t.iter().zip(want) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn single_point_and_empty() {
        assert_eq!(log_times(50.0, 2.0, 1), vec![2.0]);
        let budget = SimulationBudget::default();
        assert!(matches!(
            schedule_for_frequency(0.0, &budget),
            Err(Error::Domain(_))
        ));
    }
}
