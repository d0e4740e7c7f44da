use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use zulf_core::structio::{parse_structure, MolecularGraph, StructureFormat};

/// A file that could not be turned into a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub path: String,
    pub error: String,
}

impl Failure {
    pub fn new(path: &Path, error: impl std::fmt::Display) -> Self {
        Self {
            path: path.display().to_string(),
            error: error.to_string(),
        }
    }
}

/// Expands directories to the structure files they contain, sorted by path.
/// Unreadable arguments are reported as failures.
pub fn collect(paths: &[PathBuf], forced: Option<StructureFormat>) -> (Vec<PathBuf>, Vec<Failure>) {
    let mut files = Vec::new();
    let mut failures = Vec::new();
    for path in paths {
        if path.is_dir() {
            match std::fs::read_dir(path) {
                Ok(entries) => files.extend(
                    entries
                        .filter_map(|e| e.ok().map(|e| e.path()))
                        .filter(|p| {
                            p.is_file() && (forced.is_some() || StructureFormat::sniff(p).is_some())
                        }),
                ),
                Err(e) => failures.push(Failure::new(path, e)),
            }
        } else if path.is_file() {
            files.push(path.clone());
        } else {
            failures.push(Failure::new(path, "no such file or directory"));
        }
    }
    files.sort();
    files.dedup();
    (files, failures)
}

pub fn load(path: &Path, forced: Option<StructureFormat>) -> anyhow::Result<MolecularGraph> {
    let format = forced
        .or_else(|| StructureFormat::sniff(path))
        .ok_or_else(|| anyhow::anyhow!("unrecognized structure extension; use --input-format"))?;
    let bytes = std::fs::read(path)?;
    let mut graph = parse_structure(&bytes, format)?;
    if graph.name.trim().is_empty() {
        graph.name = display_name(path);
    }
    Ok(graph)
}

pub fn display_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs `job` on every file in a bounded pool, keeping input order.
pub fn run_batch<T: Send>(
    files: &[PathBuf],
    jobs: Option<usize>,
    job: impl Fn(&Path) -> anyhow::Result<T> + Sync,
) -> anyhow::Result<Vec<Result<T, Failure>>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build()?;
    Ok(pool.install(|| {
        files
            .par_iter()
            .map(|p| job(p).map_err(|e| Failure::new(p, format!("{e:#}"))))
            .collect()
    }))
}
