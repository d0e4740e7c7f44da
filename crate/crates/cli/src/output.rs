use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use zulf_core::report::{InspectReport, MoleculeReport};

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Sends `contents` to `out/name`, or to stdout without an output directory.
pub fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<Option<PathBuf>> {
    match out {
        Some(dir) => {
            let path = dir.join(name);
            write_atomic(&path, contents.as_bytes())?;
            Ok(Some(path))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            Ok(None)
        }
    }
}

fn csv_string<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct InspectRow<'a> {
    molecule: &'a str,
    regime: &'a str,
    cluster: usize,
    n_spins: usize,
    n_terms: usize,
    n_pairs: usize,
    degree: f64,
    mean_distance: f64,
    max_distance: usize,
    alpha_hz: f64,
    f_max_hz: f64,
    hard_16: bool,
    hard_20: bool,
    hard_32: bool,
}

pub fn inspect_csv(reports: &[InspectReport]) -> Result<String> {
    let rows = reports.iter().flat_map(|r| {
        r.clusters.iter().map(move |c| InspectRow {
            molecule: &r.molecule,
            regime: &r.regime,
            cluster: c.index,
            n_spins: c.metrics.n_spins,
            n_terms: c.metrics.n_terms,
            n_pairs: c.metrics.n_pairs,
            degree: c.metrics.degree,
            mean_distance: c.metrics.mean_distance,
            max_distance: c.metrics.max_distance,
            alpha_hz: c.alpha,
            f_max_hz: c.f_max,
            hard_16: c.hardness.n_ge_16,
            hard_20: c.hardness.n_ge_20,
            hard_32: c.hardness.n_ge_32,
        })
    });
    with_header(csv_string(rows)?, INSPECT_HEADER)
}

const INSPECT_HEADER: &str =
    "molecule,regime,cluster,n_spins,n_terms,n_pairs,degree,mean_distance,\
max_distance,alpha_hz,f_max_hz,hard_16,hard_20,hard_32";

#[derive(Serialize)]
struct EstimateRow<'a> {
    molecule: &'a str,
    regime: &'a str,
    cluster: usize,
    n_spins: usize,
    n_terms: usize,
    alpha_hz: f64,
    hard_20: bool,
    included: bool,
    degree_at_t_max: usize,
    n_t_at_t_max: u64,
    n_logical: u64,
    n_logical_evolution: u64,
    aggregate_t: u64,
    n_phys: Option<u64>,
    feasible: Option<bool>,
}

const ESTIMATE_HEADER: &str = "molecule,regime,cluster,n_spins,n_terms,alpha_hz,hard_20,included,\
degree_at_t_max,n_t_at_t_max,n_logical,n_logical_evolution,aggregate_t,n_phys,feasible";

pub fn estimate_csv(reports: &[MoleculeReport]) -> Result<String> {
    let rows = reports.iter().flat_map(|r| {
        let phys = r.physical.as_ref();
        r.clusters.iter().map(move |c| EstimateRow {
            molecule: &r.molecule,
            regime: &r.regime,
            cluster: c.summary.index,
            n_spins: c.summary.metrics.n_spins,
            n_terms: c.summary.metrics.n_terms,
            alpha_hz: c.summary.alpha,
            hard_20: c.summary.hardness.n_ge_20,
            included: c.included,
            degree_at_t_max: c.at_t_max.degree,
            n_t_at_t_max: c.at_t_max.n_t,
            n_logical: c.at_t_max.n_logical,
            n_logical_evolution: c.at_t_max.n_logical_evolution,
            aggregate_t: c.aggregate_t,
            n_phys: phys.filter(|_| c.included).map(|p| p.estimate.n_phys),
            feasible: phys.filter(|_| c.included).map(|p| p.feasible),
        })
    });
    with_header(csv_string(rows)?, ESTIMATE_HEADER)
}

/// The csv writer only emits a header once a row is written; empty tables
/// still get one.
fn with_header(body: String, header: &str) -> Result<String> {
    if body.is_empty() {
        Ok(format!("{header}\n"))
    } else {
        Ok(body)
    }
}
