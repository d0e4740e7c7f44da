use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{czero, CorrelationTrace};
use crate::error::{Error, Result};

const MAX_RESAMPLED: usize = 1 << 16;
const PAD_FACTOR: usize = 4;

/// `Re ∫ C(t) e^{i2πft − γ₂t} dt` on a uniform two-sided frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Hz, ascending.
    pub frequencies: Vec<f64>,
    pub intensities: Vec<f64>,
    /// s⁻¹.
    pub gamma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    /// Hz.
    pub frequency: f64,
    pub intensity: f64,
}

impl Spectrum {
    pub fn bin_width(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }

    /// Strongest local maximum above `f_min` Hz.
    pub fn dominant_peak_above(&self, f_min: f64) -> Option<Peak> {
        find_peaks(self, f64::NEG_INFINITY)
            .into_iter()
            .find(|p| p.frequency > f_min)
    }

    /// Full width at half maximum of the peak at `index`, by linear
    /// interpolation of the half-height crossings.
    pub fn fwhm(&self, index: usize) -> Option<f64> {
        let y = &self.intensities;
        let f = &self.frequencies;
        let half = y[index] / 2.0;
        let mut l = index;
        while l > 0 && y[l] > half {
            l -= 1;
        }
        let mut r = index;
        while r + 1 < y.len() && y[r] > half {
            r += 1;
        }
        if y[l] > half || y[r] > half {
            return None;
        }
        let cross = |a: usize, b: usize| f[a] + (half - y[a]) * (f[b] - f[a]) / (y[b] - y[a]);
        Some(cross(r - 1, r) - cross(l, l + 1))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("f,intensity\n");
        for (f, y) in self.frequencies.iter().zip(&self.intensities) {
            let _ = writeln!(out, "{f:.9e},{y:.12e}");
        }
        out
    }
}

/// Local maxima with intensity at least `threshold`, strongest first.
pub fn find_peaks(spec: &Spectrum, threshold: f64) -> Vec<Peak> {
    let y = &spec.intensities;
    let mut peaks: Vec<Peak> = (1..y.len().saturating_sub(1))
        .filter(|&k| y[k] > y[k - 1] && y[k] >= y[k + 1] && y[k] >= threshold)
        .map(|k| Peak {
            index: k,
            frequency: spec.frequencies[k],
            intensity: y[k],
        })
        .collect();
    peaks.sort_by(|a, b| {
        b.intensity
            .total_cmp(&a.intensity)
            .then(a.index.cmp(&b.index))
    });
    peaks
}

/// Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson slopes).
/// Queries outside `[x_0, x_last]` are clamped.
pub fn pchip(x: &[f64], y: &[f64], xq: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(
        n >= 2 && y.len() == n,
        "pchip needs at least two matching samples"
    );
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
    } else {
        for k in 1..n - 1 {
            let (a, b) = (delta[k - 1], delta[k]);
            if a * b > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
            let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if s.signum() != d0.signum() {
                0.0
            } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                s
            }
        };
        d[0] = end(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    xq.iter()
        .map(|&q| {
            let q = q.clamp(x[0], x[n - 1]);
            let k = match x.partition_point(|&v| v <= q) {
                0 => 0,
                p => (p - 1).min(n - 2),
            };
            let t = (q - x[k]) / h[k];
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * y[k]
                + (t3 - 2.0 * t2 + t) * h[k] * d[k]
                + (-2.0 * t3 + 3.0 * t2) * y[k + 1]
                + (t3 - t2) * h[k] * d[k + 1]
        })
        .collect()
}

fn is_uniform(t: &[f64]) -> bool {
    let dt = t[1] - t[0];
    dt > 0.0
        && t.windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt)
}

/// Uniform samples `(t0, dt, values)`, resampling non-uniform traces.
fn uniform_samples(trace: &CorrelationTrace) -> Result<(f64, f64, Vec<Complex64>)> {
    let t = &trace.timepoints;
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain(
            "trace timepoints must be strictly increasing",
        ));
    }
    if is_uniform(t) {
        return Ok((t[0], t[1] - t[0], trace.values.clone()));
    }
    let span = t[t.len() - 1] - t[0];
    let min_dt = t
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let m = ((span / min_dt).ceil() as usize + 1).clamp(t.len(), MAX_RESAMPLED);
    let dt = span / (m - 1) as f64;
    let grid: Vec<f64> = (0..m).map(|j| t[0] + j as f64 * dt).collect();
    let re: Vec<f64> = trace.values.iter().map(|v| v.re).collect();
    let im: Vec<f64> = trace.values.iter().map(|v| v.im).collect();
    let values = pchip(t, &re, &grid)
        .into_iter()
        .zip(pchip(t, &im, &grid))
        .map(|(a, b)| Complex64::new(a, b))
        .collect();
    Ok((t[0], dt, values))
}

/// Trapezoid-weighted, zero-padded transform of the trace with exponential
/// damping `e^{−γ₂ t}`.
pub fn spectrum(trace: &CorrelationTrace, gamma2: f64) -> Result<Spectrum> {
    if trace.timepoints.len() < 4 || trace.values.len() != trace.timepoints.len() {
        return Err(Error::domain(format!(
            "spectrum needs at least 4 samples, got {}",
            trace.timepoints.len()
        )));
    }
    if !(gamma2 >= 0.0) {
        return Err(Error::domain(format!(
            "gamma2 must be non-negative, got {gamma2}"
        )));
    }
    let (t0, dt, values) = uniform_samples(trace)?;
    let n = values.len();
    let n_fft = n.next_power_of_two() * PAD_FACTOR;
    let mut buf = vec![czero(); n_fft];
    for (j, v) in values.iter().enumerate() {
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        let t = t0 + j as f64 * dt;
        buf[j] = v * (w * dt * (-gamma2 * t).exp());
    }
    FftPlanner::new().plan_fft_inverse(n_fft).process(&mut buf);

    let df = 1.0 / (n_fft as f64 * dt);
    let half = n_fft / 2;
    let (frequencies, intensities) = (0..n_fft)
        .map(|k| {
            let idx = (k + half) % n_fft;
            let f = (k as f64 - half as f64) * df;
            let shift = Complex64::from_polar(1.0, 2.0 * PI * f * t0);
            (f, (buf[idx] * shift).re)
        })
        .unzip();
    Ok(Spectrum {
        frequencies,
        intensities,
        gamma2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ObservableKind;

    fn trace(times: Vec<f64>, f: impl Fn(f64) -> Complex64) -> CorrelationTrace {
        CorrelationTrace {
            values: times.iter().map(|&t| f(t)).collect(),
            timepoints: times,
            observable: ObservableKind::Sz,
        }
    }

    fn uniform(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|j| j as f64 * dt).collect()
    }

    #[test]
    fn constant_trace_peaks_at_zero_with_lorentzian_width() {
        let tr = trace(uniform(4001, 5e-3), |_| Complex64::new(1.0, 0.0));
        let gamma2 = 2.0;
        let s = spectrum(&tr, gamma2).unwrap();
        let peaks = find_peaks(&s, 0.0);
        assert_eq!(peaks[0].frequency, 0.0);
        let width = s.fwhm(peaks[0].index).unwrap();
        let want = gamma2 / PI;
        assert!((width - want).abs() / want < 0.05, "{width} vs {want}");
    }

    #[test]
    fn doubling_gamma_doubles_width() {
        let tr = trace(uniform(8001, 2.5e-3), |t| {
            Complex64::from_polar(1.0, 2.0 * PI * 25.0 * t)
        });
        let w = |g: f64| {
            let s = spectrum(&tr, g).unwrap();
            let p = find_peaks(&s, 0.0)[0];
            assert!((p.frequency + 25.0).abs() <= s.bin_width());
            s.fwhm(p.index).unwrap()
        };
        let r = w(6.0) / w(3.0);
        assert!((r - 2.0).abs() < 0.1, "{r}");
    }

    #[test]
    fn too_few_samples() {
        let tr = trace(uniform(3, 0.1), |_| Complex64::new(1.0, 0.0));
        assert!(matches!(spectrum(&tr, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_trace_is_resampled() {
        let times: Vec<f64> = (0..200)
            .map(|k| 1e-3 * (1000f64).powf(k as f64 / 199.0))
            .collect();
        let tr = trace(times, |t| Complex64::new((2.0 * PI * 10.0 * t).cos(), 0.0));
        let s = spectrum(&tr, 0.5).unwrap();
        let p = s.dominant_peak_above(1.0).unwrap();
        assert!((p.frequency - 10.0).abs() <= 2.0 * s.bin_width());
    }

    #[test]
    fn pchip_reproduces_linear_and_stays_monotone() {
        let x = [0.0, 1.0, 3.0, 4.5];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let q = pchip(&x, &y, &[0.5, 2.0, 4.0]);
        for (a, b) in q.iter().zip([0.0, 3.0, 7.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let ys = [0.0, 0.0, 1.0, 1.0];
        let grid: Vec<f64> = (0..=45).map(|k| k as f64 * 0.1).collect();
        let v = pchip(&x, &ys, &grid);
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        assert!(v.iter().all(|&a| (0.0..=1.0).contains(&a)));
    }
}
