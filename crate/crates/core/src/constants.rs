//! Physical constants and per-species nuclear data.

use serde::{Deserialize, Serialize};

/// Vacuum permeability, N·A⁻² (CODATA 2018).
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Reduced Planck constant, J·s (exact SI value).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Gyromagnetic ratios in rad·s⁻¹·T⁻¹ for the spin-½ species we track.
///
/// The defaults can be replaced from the `[gyromagnetic]` table of a
/// configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GyromagneticRatios {
    #[serde(rename = "H")]
    pub h1: f64,
    #[serde(rename = "C")]
    pub c13: f64,
    #[serde(rename = "N")]
    pub n15: f64,
}

impl Default for GyromagneticRatios {
    fn default() -> Self {
        Self {
            h1: 2.6752e8,
            c13: 6.7283e7,
            n15: -2.7126e7,
        }
    }
}

/// Dipolar coupling strength `b_kl` converted to Hz, i.e.
/// `μ0 γ_k γ_l ħ / (4π r³) / 2π` with `r` in Å.
pub fn dipolar_strength_hz(gamma_k: f64, gamma_l: f64, distance_angstrom: f64) -> f64 {
    let r = distance_angstrom * 1e-10;
    let b_rad = MU0 / (4.0 * std::f64::consts::PI) * gamma_k * gamma_l * HBAR / (r * r * r);
    b_rad / (2.0 * std::f64::consts::PI)
}
