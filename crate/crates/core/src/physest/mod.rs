//! Surface-code lattice-surgery overhead with AutoCCZ magic-state factories.

mod machines;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use machines::{reference_machines, runtime, Machine, MachineRuntime};

use crate::error::{Error, Result};
use crate::lcost::LogicalEstimate;

/// Factory footprints (tiles), depths (units of the code distance) and
/// spacetime volumes (cells).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactoryGeometry {
    pub v_inj: f64,
    /// `4 d1 × 8 d1`.
    pub t1_tiles: u64,
    pub t1_depth: f64,
    pub v_t1: f64,
    /// `6 d2 × 3 d2`.
    pub ccz_tiles: u64,
    /// `4 d2 × 4 d2`.
    pub cat_tiles: u64,
    pub ccz_depth: f64,
    pub cat_depth: f64,
    pub v_ccz: f64,
    pub v_cat: f64,
    /// Level-1 state routing and storage, at `d2`.
    pub store_tiles: u64,
}

impl Default for FactoryGeometry {
    fn default() -> Self {
        // Only V_CCZ + V_cat = 1000 is fixed; split by tile-depth product.
        let (ccz, cat) = (18.0 * 5.0, 16.0 * 1.0);
        Self {
            v_inj: 100.0,
            t1_tiles: 32,
            t1_depth: 5.75,
            v_t1: 1100.0,
            ccz_tiles: 18,
            cat_tiles: 16,
            ccz_depth: 5.0,
            cat_depth: 1.0,
            v_ccz: 1000.0 * ccz / (ccz + cat),
            v_cat: 1000.0 * cat / (ccz + cat),
            store_tiles: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardwareModel {
    pub p_phys: f64,
    pub p_thresh: f64,
    /// s.
    pub t_cycle: f64,
    /// s.
    pub t_react: f64,
    /// Level-1 states per CCZ round: 4 for a terminal T, 8 for a terminal CCZ.
    pub eta: u64,
    pub geometry: FactoryGeometry,
}

impl Default for HardwareModel {
    fn default() -> Self {
        Self {
            p_phys: 1e-4,
            p_thresh: 0.01,
            t_cycle: 1e-6,
            t_react: 1e-5,
            eta: 4,
            geometry: FactoryGeometry::default(),
        }
    }
}

impl HardwareModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_phys > 0.0 && self.p_phys < self.p_thresh) {
            return Err(Error::domain(format!(
                "p_phys = {} must lie in (0, p_thresh = {})",
                self.p_phys, self.p_thresh
            )));
        }
        if !(self.t_cycle > 0.0 && self.t_react > 0.0) {
            return Err(Error::domain("cycle and reaction times must be positive"));
        }
        if self.eta == 0 {
            return Err(Error::domain("eta must be positive"));
        }
        Ok(())
    }
}

/// Default QEC error budget.
pub const DEFAULT_TARGET_ERROR: f64 = 1e-3;
pub const D1_RANGE: (usize, usize) = (3, 25);
pub const D2_MAX: usize = 51;

/// `E(d) = 0.1 (p/p_th)^((d+1)/2)`.
pub fn cell_error(d: usize, hw: &HardwareModel) -> Result<f64> {
    hw.validate()?;
    if d == 0 {
        return Err(Error::domain("code distance must be at least 1"));
    }
    Ok(cell_error_unchecked(d, hw))
}

fn cell_error_unchecked(d: usize, hw: &HardwareModel) -> f64 {
    0.1 * (hw.p_phys / hw.p_thresh).powf((d as f64 + 1.0) / 2.0)
}

/// Errors after each distillation stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillErrors {
    pub inj: f64,
    pub t1: f64,
    pub ccz: f64,
    pub t2: f64,
}

fn check_distances(d1: usize, d2: usize) -> Result<()> {
    if d1 < 1 || d1 >= d2 {
        return Err(Error::domain(format!(
            "need 1 <= d1 < d2, got d1 = {d1}, d2 = {d2}"
        )));
    }
    Ok(())
}

pub fn distill_error(d1: usize, d2: usize, hw: &HardwareModel) -> Result<DistillErrors> {
    hw.validate()?;
    check_distances(d1, d2)?;
    Ok(distill_error_unchecked(d1, d2, hw))
}

fn distill_error_unchecked(d1: usize, d2: usize, hw: &HardwareModel) -> DistillErrors {
    let g = &hw.geometry;
    let e = |d| cell_error_unchecked(d, hw);
    let inj = g.v_inj * e(d1 / 2) + hw.p_phys;
    let t1 = g.v_t1 * e(d1) + 35.0 * inj.powi(3);
    let ccz = g.v_ccz * e(d2) + 28.0 * t1 * t1;
    let t2 = g.v_cat * e(d2) + ccz;
    DistillErrors { inj, t1, ccz, t2 }
}

/// Physical qubits in `n` tiles of distance `d`: `2 n d²`.
pub fn tile_area(n_tiles: u64, d: usize) -> u64 {
    2 * n_tiles * (d * d) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactoryLayout {
    pub a_t1: u64,
    pub a_ccz: u64,
    pub a_cat: u64,
    pub a_store: u64,
    /// `η A_T1 + A_CCZ + A_cat + A_store`.
    pub a_fact: u64,
    /// Cycles.
    pub d_t1: f64,
    pub d_ccz: f64,
    pub d_cat: f64,
    /// `max(D_T1, D_CCZ + D_cat)`.
    pub d_distill: f64,
    /// `⌈η D_T1 / D_CCZ⌉`.
    pub n_t1: u64,
}

pub fn factory_layout(d1: usize, d2: usize, hw: &HardwareModel) -> Result<FactoryLayout> {
    check_distances(d1, d2)?;
    if hw.eta == 0 {
        return Err(Error::domain("eta must be positive"));
    }
    Ok(factory_layout_unchecked(d1, d2, hw))
}

fn factory_layout_unchecked(d1: usize, d2: usize, hw: &HardwareModel) -> FactoryLayout {
    let g = &hw.geometry;
    let a_t1 = tile_area(g.t1_tiles, d1);
    let a_ccz = tile_area(g.ccz_tiles, d2);
    let a_cat = tile_area(g.cat_tiles, d2);
    let a_store = tile_area(g.store_tiles, d2);
    let d_t1 = g.t1_depth * d1 as f64;
    let d_ccz = g.ccz_depth * d2 as f64;
    let d_cat = g.cat_depth * d2 as f64;
    FactoryLayout {
        a_t1,
        a_ccz,
        a_cat,
        a_store,
        a_fact: hw.eta * a_t1 + a_ccz + a_cat + a_store,
        d_t1,
        d_ccz,
        d_cat,
        d_distill: d_t1.max(d_ccz + d_cat),
        n_t1: (hw.eta as f64 * d_t1 / d_ccz).ceil() as u64,
    }
}

/// Data and routing tiles of the fast block layout, `2N + √(8N) + 1`, rounded up.
pub fn data_tiles(n_logical: u64) -> u64 {
    let n = n_logical as f64;
    (2.0 * n + (8.0 * n).sqrt() + 1.0).ceil() as u64
}

/// Logical workload mapped onto the surface code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub n_t: u64,
    pub n_logical: u64,
}

impl From<&LogicalEstimate> for Job {
    fn from(e: &LogicalEstimate) -> Self {
        Self {
            n_t: e.n_t,
            n_logical: e.n_logical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorLedger {
    pub inj: f64,
    pub t1: f64,
    pub ccz: f64,
    pub t2: f64,
    /// `D_meas N_data E(d2)`.
    pub data: f64,
    /// `(N_T/2) ε_T2`.
    pub magic: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalEstimate {
    pub job: Job,
    pub d0: usize,
    pub d1: usize,
    pub d2: usize,
    pub n_factories: u64,
    pub n_data_tiles: u64,
    pub layout: FactoryLayout,
    pub n_phys: u64,
    /// Measurement depth, taken equal to `N_T`.
    pub d_meas: u64,
    /// s, one shot.
    pub t_wall: f64,
    pub errors: ErrorLedger,
    pub target_error: f64,
    pub feasible: bool,
}

fn evaluate_unchecked(
    job: Job,
    d1: usize,
    d2: usize,
    hw: &HardwareModel,
    target: f64,
    n_factories: Option<u64>,
) -> PhysicalEstimate {
    let dist = distill_error_unchecked(d1, d2, hw);
    let layout = factory_layout_unchecked(d1, d2, hw);
    let n_data = data_tiles(job.n_logical);
    let d_meas = job.n_t;
    let t_wall = d_meas as f64 * hw.t_react;
    let n_factories = n_factories.unwrap_or_else(|| {
        if job.n_t == 0 {
            0
        } else {
            (job.n_t as f64 * layout.d_distill * hw.t_cycle / t_wall).ceil() as u64
        }
    });
    let data = d_meas as f64 * n_data as f64 * cell_error_unchecked(d2, hw);
    let magic = job.n_t as f64 / 2.0 * dist.t2;
    let total = data + magic;
    PhysicalEstimate {
        job,
        d0: d1 / 2,
        d1,
        d2,
        n_factories,
        n_data_tiles: n_data,
        layout,
        n_phys: n_factories * layout.a_fact + 2 * n_data * (d2 * d2) as u64,
        d_meas,
        t_wall,
        errors: ErrorLedger {
            inj: dist.inj,
            t1: dist.t1,
            ccz: dist.ccz,
            t2: dist.t2,
            data,
            magic,
            total,
        },
        target_error: target,
        feasible: total <= target,
    }
}

fn check_job(job: Job, target: f64) -> Result<()> {
    if job.n_t == 0 || job.n_logical == 0 {
        return Err(Error::domain(
            "physical estimate needs N_T >= 1 and N_logical >= 1",
        ));
    }
    if !(target > 0.0) {
        return Err(Error::domain(format!(
            "target error must be positive, got {target}"
        )));
    }
    Ok(())
}

/// Estimate at fixed distances, optionally with a fixed factory count.
pub fn evaluate(
    job: Job,
    d1: usize,
    d2: usize,
    hw: &HardwareModel,
    target: f64,
    n_factories: Option<u64>,
) -> Result<PhysicalEstimate> {
    hw.validate()?;
    check_distances(d1, d2)?;
    check_job(job, target)?;
    Ok(evaluate_unchecked(job, d1, d2, hw, target, n_factories))
}

/// Every odd `(d1, d2)` of the search grid.
pub fn distance_grid() -> Vec<(usize, usize)> {
    (D1_RANGE.0..=D1_RANGE.1)
        .step_by(2)
        .flat_map(|d1| ((d1 + 2)..=D2_MAX).step_by(2).map(move |d2| (d1, d2)))
        .collect()
}

/// Smallest-footprint configuration meeting `target`; ties go to the
/// smallest `d2`, then `d1`. When nothing in the grid is feasible the error
/// carries the lowest-error configuration.
pub fn optimize(job: Job, hw: &HardwareModel, target: f64) -> Result<PhysicalEstimate> {
    hw.validate()?;
    check_job(job, target)?;
    let candidates: Vec<PhysicalEstimate> = distance_grid()
        .into_par_iter()
        .map(|(d1, d2)| evaluate_unchecked(job, d1, d2, hw, target, None))
        .collect();
    let best = candidates
        .iter()
        .filter(|e| e.feasible)
        .min_by_key(|e| (e.n_phys, e.d2, e.d1));
    match best {
        Some(e) => Ok(e.clone()),
        None => {
            let closest = candidates
                .into_iter()
                .min_by(|a, b| {
                    a.errors
                        .total
                        .total_cmp(&b.errors.total)
                        .then(a.n_phys.cmp(&b.n_phys))
                })
                .expect("grid is non-empty");
            Err(Error::Infeasible {
                best_error: closest.errors.total,
                target,
                best: Box::new(closest),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_error_examples() {
        let hw = HardwareModel::default();
        assert!((cell_error(13, &hw).unwrap() - 1e-15).abs() < 1e-27);
        let half = HardwareModel {
            p_phys: 0.005,
            ..hw
        };
        assert!((cell_error(1, &half).unwrap() - 0.05).abs() < 1e-15);
        let r = cell_error(9, &hw).unwrap() / cell_error(7, &hw).unwrap();
        assert!((r - 0.01).abs() < 1e-15);
        let bad = HardwareModel { p_phys: 0.02, ..hw };
        assert!(matches!(cell_error(3, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn layout_examples() {
        let l = factory_layout(9, 15, &HardwareModel::default()).unwrap();
        assert_eq!((l.a_t1, l.a_ccz, l.a_cat), (5184, 8100, 7200));
        assert_eq!(l.d_distill, 90.0);
        assert_eq!(l.n_t1, 3);
    }

    #[test]
    fn wall_time_example() {
        let job = Job {
            n_t: 1_000_000_000,
            n_logical: 100,
        };
        let e = evaluate(job, 9, 15, &HardwareModel::default(), 1e-3, None).unwrap();
        assert!((e.t_wall - 1e4).abs() < 1e-6);
    }

    #[test]
    fn decomposition_identity() {
        let job = Job {
            n_t: 123_456_789,
            n_logical: 77,
        };
        let e = optimize(job, &HardwareModel::default(), 1e-3).unwrap();
        assert_eq!(
            e.n_phys,
            e.n_factories * e.layout.a_fact + 2 * e.n_data_tiles * (e.d2 * e.d2) as u64
        );
        assert_eq!(e.errors.total, e.errors.data + e.errors.magic);
        assert!(e.feasible && e.d1 < e.d2 && e.d1 % 2 == 1 && e.d2 % 2 == 1);
    }

    #[test]
    fn infeasible_reports_best() {
        let job = Job {
            n_t: u64::MAX / 4,
            n_logical: 1000,
        };
        let hw = HardwareModel {
            p_phys: 5e-3,
            ..Default::default()
        };
        match optimize(job, &hw, 1e-3) {
            Err(Error::Infeasible {
                best_error, best, ..
            }) => {
                assert!(best_error > 1e-3);
                assert_eq!(best.errors.total, best_error);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
