use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use zulf_core::config::Config;
use zulf_core::gqsp::{plan_degree, reconstruction_error, GqspPlan};
use zulf_core::lcost::{
    evolution_cost, log_times, CostLedger, CostModel, LogicalEstimate, SimulationBudget,
};
use zulf_core::oracle::{
    correlator, find_peaks, spectrum, InitialState, Observable, ObservableKind,
};
use zulf_core::physest::{optimize, reference_machines, runtime, Job, Machine, PhysicalEstimate};
use zulf_core::refmodels::{reference_budgets, LatticeKind, LatticeSpec};
use zulf_core::report::{Molecule, PhysicalReport, REPORT_SCHEMA};
use zulf_core::Error;

use crate::args::{
    Cli, Command, GlobalArgs, HardwareArgs, InputArgs, OutputFormat, TimeGrid, CONFIG_FILE_NAME,
    CONFIG_PATH_ENV,
};
use crate::inputs::{collect, display_name, load, run_batch, Failure};
use crate::output::{emit, estimate_csv, inspect_csv, to_json, write_atomic};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

/// Relative variation under which a trace counts as constant.
const FLAT_TRACE_TOLERANCE: f64 = 1e-10;

pub fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    let mut config = resolve_config(g)?;
    match &cli.command {
        Command::Inspect(input) => inspect(g, &config, input),
        Command::Estimate {
            input,
            hardware,
            logical_only,
        } => {
            apply_hardware(&mut config, hardware)?;
            estimate(g, &config, input, hardware, *logical_only)
        }
        Command::Spectrum {
            input,
            observable,
            cluster,
            grid,
            beta,
            seed,
            peak_threshold,
        } => {
            let opts = SpectrumOptions {
                observable: *observable,
                cluster: *cluster,
                grid: *grid,
                beta: *beta,
                seed: *seed,
                peak_threshold: *peak_threshold,
            };
            spectrum_cmd(g, &config, input, &opts)
        }
        Command::Phases {
            tau,
            alpha,
            time,
            epsilon,
        } => phases(g, *tau, *alpha, *time, *epsilon),
        Command::Physical {
            n_t,
            n_logical,
            shots,
            hardware,
        } => {
            apply_hardware(&mut config, hardware)?;
            let job = Job {
                n_t: *n_t,
                n_logical: *n_logical,
            };
            physical(g, &config, job, *shots, hardware)
        }
        Command::Refmodel {
            kind,
            lx,
            ly,
            couplings,
            hamiltonian,
            hardware,
        } => {
            apply_hardware(&mut config, hardware)?;
            let couplings = couplings.as_ref().map(|c| (c[0], c[1]));
            refmodel(
                g,
                &config,
                *kind,
                (*lx, *ly),
                couplings,
                hamiltonian.as_deref(),
                hardware,
            )
        }
    }
}

fn search_config() -> Option<PathBuf> {
    let dirs = std::env::var_os(CONFIG_PATH_ENV)?;
    std::env::split_paths(&dirs)
        .map(|d| d.join(CONFIG_FILE_NAME))
        .find(|p| p.is_file())
}

fn resolve_config(g: &GlobalArgs) -> Result<Config> {
    let mut config = match g.config.clone().or_else(search_config) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            Config::from_toml(&text).with_context(|| format!("loading {}", path.display()))?
        }
        None => Config::default(),
    };
    if let Some(set) = g.regime {
        config.regime.nucleus_set = set;
    }
    if let Some(mode) = g.dipolar {
        config.regime.dipolar_mode = mode;
    }
    if let Some(k) = g.kappa {
        config.regime.kappa = k;
    }
    override_budget(&mut config.budget, g);
    config.validate()?;
    Ok(config)
}

fn override_budget(budget: &mut SimulationBudget, g: &GlobalArgs) {
    if let Some(t) = g.t_max {
        budget.t_max = t;
    }
    if let Some(t) = g.t2 {
        budget.t2 = t;
    }
    if let Some(e) = g.eps_max {
        budget.epsilon_max = e;
    }
    if let Some(n) = g.points {
        budget.n_points = n;
    }
}

fn apply_hardware(config: &mut Config, hw: &HardwareArgs) -> Result<()> {
    let model = &mut config.hardware;
    if let Some(p) = hw.p_phys {
        model.p_phys = p;
    }
    if let Some(t) = hw.t_cycle {
        model.t_cycle = t;
    }
    if let Some(t) = hw.t_react {
        model.t_react = t;
    }
    if let Some(e) = hw.target_error {
        config.target_error = e;
    }
    config.validate()?;
    Ok(())
}

fn machines(hw: &HardwareArgs) -> Vec<Machine> {
    if hw.machines.is_empty() {
        reference_machines()
    } else {
        hw.machines.clone()
    }
}

#[derive(Serialize)]
struct Batch<'a, T> {
    schema: &'static str,
    reports: &'a [T],
    failures: &'a [Failure],
}

/// Runs `job` over every input and writes the results. Returns the failures.
fn batch<T, F>(
    g: &GlobalArgs,
    input: &InputArgs,
    job: F,
    to_csv: fn(&[T]) -> Result<String>,
) -> Result<(Vec<T>, Vec<Failure>)>
where
    T: Serialize + Send,
    F: Fn(&Path) -> Result<T> + Sync,
{
    let (files, mut failures) = collect(&input.paths, input.input_format);
    let results = run_batch(&files, g.jobs, job)?;
    let mut reports = Vec::new();
    let mut written = Vec::new();
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(report) => {
                written.push(path.clone());
                reports.push(report);
            }
            Err(f) => failures.push(f),
        }
    }
    failures.sort_by(|a, b| a.path.cmp(&b.path));
    for f in &failures {
        eprintln!("warning: {}: {}", f.path, f.error);
    }

    match &g.out {
        Some(dir) => {
            for (path, report) in written.iter().zip(&reports) {
                let body = match g.format {
                    OutputFormat::Json => to_json(report)?,
                    OutputFormat::Csv => to_csv(std::slice::from_ref(report))?,
                };
                let name = format!(
                    "{}.{}",
                    path.file_name().unwrap_or_default().to_string_lossy(),
                    g.format.extension()
                );
                let target = dir.join(name);
                write_atomic(&target, body.as_bytes())?;
                eprintln!("wrote {}", target.display());
            }
        }
        None => {
            let body = match g.format {
                OutputFormat::Json => to_json(&Batch {
                    schema: REPORT_SCHEMA,
                    reports: &reports,
                    failures: &failures,
                })?,
                OutputFormat::Csv => to_csv(&reports)?,
            };
            emit(None, "", &body)?;
        }
    }
    Ok((reports, failures))
}

fn partial_status(failures: &[Failure]) -> u8 {
    if failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    }
}

fn inspect(g: &GlobalArgs, config: &Config, input: &InputArgs) -> Result<u8> {
    let (_, failures) = batch(
        g,
        input,
        |p| {
            let graph = load(p, input.input_format)?;
            Ok(Molecule::analyze(graph, config)?.inspect(config))
        },
        inspect_csv,
    )?;
    Ok(partial_status(&failures))
}

fn estimate(
    g: &GlobalArgs,
    config: &Config,
    input: &InputArgs,
    hw: &HardwareArgs,
    logical_only: bool,
) -> Result<u8> {
    let model = CostLedger::standard();
    let machines = machines(hw);
    let (reports, failures) = batch(
        g,
        input,
        |p| {
            let graph = load(p, input.input_format)?;
            let molecule = Molecule::analyze(graph, config)?;
            let mut report = molecule.estimate(config, g.threshold, model)?;
            if !logical_only {
                report.attach_physical(config, &machines)?;
            }
            Ok(report)
        },
        estimate_csv,
    )?;
    let infeasible: Vec<&str> = reports
        .iter()
        .filter(|r| r.is_infeasible())
        .map(|r| r.molecule.as_str())
        .collect();
    for name in &infeasible {
        eprintln!("warning: {name}: no code distance meets the target error");
    }
    if hw.strict && !infeasible.is_empty() {
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(partial_status(&failures))
}

struct SpectrumOptions {
    observable: ObservableKind,
    cluster: usize,
    grid: TimeGrid,
    beta: Option<f64>,
    seed: Option<u64>,
    peak_threshold: f64,
}

fn spectrum_cmd(
    g: &GlobalArgs,
    config: &Config,
    input: &InputArgs,
    opts: &SpectrumOptions,
) -> Result<u8> {
    let [path] = input.paths.as_slice() else {
        bail!("spectrum takes exactly one structure file");
    };
    let graph =
        load(path, input.input_format).with_context(|| format!("loading {}", path.display()))?;
    let molecule = Molecule::analyze(graph, config)?;
    let Some(cluster) = molecule.clusters.clusters.get(opts.cluster) else {
        bail!(
            "{} has {} coupled clusters; cluster {} does not exist",
            molecule.name,
            molecule.clusters.clusters.len(),
            opts.cluster
        );
    };
    let h = &cluster.hamiltonian;
    let n = h.n_spins();
    let budget = &config.budget;
    let times: Vec<f64> = match opts.grid {
        TimeGrid::Uniform => {
            let m = budget.n_points;
            let step = if m > 1 {
                budget.t_max / (m - 1) as f64
            } else {
                0.0
            };
            (0..m).map(|i| i as f64 * step).collect()
        }
        TimeGrid::Log => {
            let mut t = log_times(h.max_coefficient(), budget.t_max, budget.n_points);
            t.insert(0, 0.0);
            t
        }
    };
    let observable = match opts.observable {
        ObservableKind::Sz => Observable::sz(n),
        ObservableKind::Mz => {
            let gammas = molecule.cluster_gammas(opts.cluster).unwrap_or_default();
            Observable::mz(&gammas, config.regime.gyromagnetic.h1)
        }
    };
    let state = match (opts.beta, opts.seed) {
        (Some(beta), _) => InitialState::ThermalZ { beta },
        (None, Some(seed)) => InitialState::sampled(n, seed),
        (None, None) => InitialState::Uniform,
    };
    let trace = correlator(h, &state, &observable, &times).context("correlation trace")?;
    let scale = trace
        .values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let variation = trace.variation();
    if variation <= FLAT_TRACE_TOLERANCE * scale {
        eprintln!(
            "warning: flat trace (variation {variation:.3e}): the observable commutes with the \
             Hamiltonian, so the spectrum carries no coupling information"
        );
    }
    if opts.grid == TimeGrid::Uniform && times.len() > 1 {
        let nyquist = 0.5 / (times[1] - times[0]);
        if 2.0 * h.alpha() > nyquist {
            eprintln!(
                "warning: transitions up to {:.3} Hz may exceed the Nyquist frequency {nyquist:.3} Hz; \
                 raise --points or lower --t-max",
                2.0 * h.alpha()
            );
        }
    }
    let spec = spectrum(&trace, 1.0 / budget.t2).context("spectrum")?;
    let half_bin = 0.5 * spec.bin_width();
    let top = spec
        .frequencies
        .iter()
        .zip(&spec.intensities)
        .filter(|(f, _)| **f > half_bin)
        .map(|(_, y)| *y)
        .fold(0.0, f64::max);
    let peaks: Vec<_> = find_peaks(&spec, opts.peak_threshold * top)
        .into_iter()
        .filter(|p| p.frequency > half_bin)
        .collect();
    let mut peak_csv = String::from("frequency_hz,intensity\n");
    for p in &peaks {
        peak_csv.push_str(&format!("{:.6},{:.9e}\n", p.frequency, p.intensity));
    }

    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let stem = display_name(path);
    for (suffix, body) in [
        ("trace.csv", trace.to_csv()),
        ("spectrum.csv", spec.to_csv()),
        ("peaks.csv", peak_csv.clone()),
    ] {
        let target = dir.join(format!("{stem}.{suffix}"));
        write_atomic(&target, body.as_bytes())?;
        eprintln!("wrote {}", target.display());
    }
    emit(None, "", &peak_csv)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PhasesReport<'a> {
    schema: &'static str,
    tau: f64,
    epsilon: f64,
    degree: usize,
    scale: f64,
    completion_residual: f64,
    reconstruction_error: f64,
    phases: &'a [zulf_core::gqsp::PhaseTuple],
}

fn phases(
    g: &GlobalArgs,
    tau: Option<f64>,
    alpha: Option<f64>,
    time: Option<f64>,
    epsilon: f64,
) -> Result<u8> {
    let plan = match (tau, alpha, time) {
        (Some(tau), _, _) => GqspPlan::for_tau(tau, epsilon)?,
        (None, Some(a), Some(t)) => plan_degree(a, t, epsilon)?,
        _ => bail!("give --tau or both --alpha and --time"),
    };
    let plan = plan.with_phases().context("phase generation")?;
    let seq = plan.phases.as_ref().expect("phases were just generated");
    let body = match g.format {
        OutputFormat::Csv => seq.to_csv(),
        OutputFormat::Json => {
            let grid = (8 * plan.n_phases()).next_power_of_two().max(1024);
            to_json(&PhasesReport {
                schema: REPORT_SCHEMA,
                tau: plan.tau,
                epsilon,
                degree: plan.degree,
                scale: seq.scale,
                completion_residual: seq.completion_residual,
                reconstruction_error: reconstruction_error(seq, &plan.coefficients, grid),
                phases: &seq.tuples,
            })?
        }
    };
    emit(
        g.out.as_deref(),
        &format!("phases.{}", g.format.extension()),
        &body,
    )?;
    Ok(EXIT_OK)
}

fn physical_mapping(
    job: Job,
    config: &Config,
    machines: &[Machine],
    shots: u64,
) -> Result<PhysicalReport> {
    let (estimate, feasible): (PhysicalEstimate, bool) =
        match optimize(job, &config.hardware, config.target_error) {
            Ok(e) => (e, true),
            Err(Error::Infeasible { best, .. }) => (*best, false),
            Err(e) => return Err(e.into()),
        };
    let machines = machines
        .iter()
        .map(|m| runtime(&estimate, m, shots))
        .collect();
    Ok(PhysicalReport {
        feasible,
        total_shots: shots,
        estimate,
        machines,
    })
}

#[derive(Serialize)]
struct PhysicalRow {
    n_t: u64,
    n_logical: u64,
    feasible: bool,
    d1: usize,
    d2: usize,
    n_factories: u64,
    n_phys: u64,
    t_wall_s: f64,
    epsilon_phys: f64,
}

impl From<&PhysicalReport> for PhysicalRow {
    fn from(p: &PhysicalReport) -> Self {
        let e = &p.estimate;
        Self {
            n_t: e.job.n_t,
            n_logical: e.job.n_logical,
            feasible: p.feasible,
            d1: e.d1,
            d2: e.d2,
            n_factories: e.n_factories,
            n_phys: e.n_phys,
            t_wall_s: e.t_wall,
            epsilon_phys: e.errors.total,
        }
    }
}

fn single_row_csv<R: Serialize>(row: R) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(row)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn strict_status(strict: bool, feasible: bool) -> u8 {
    if strict && !feasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    }
}

#[derive(Serialize)]
struct PhysicalOnly<'a> {
    schema: &'static str,
    #[serde(flatten)]
    report: &'a PhysicalReport,
}

fn physical(
    g: &GlobalArgs,
    config: &Config,
    job: Job,
    shots: u64,
    hw: &HardwareArgs,
) -> Result<u8> {
    let report = physical_mapping(job, config, &machines(hw), shots)?;
    let body = match g.format {
        OutputFormat::Json => to_json(&PhysicalOnly {
            schema: REPORT_SCHEMA,
            report: &report,
        })?,
        OutputFormat::Csv => single_row_csv(PhysicalRow::from(&report))?,
    };
    emit(
        g.out.as_deref(),
        &format!("physical.{}", g.format.extension()),
        &body,
    )?;
    if !report.feasible {
        eprintln!("warning: no code distance meets the target error");
    }
    Ok(strict_status(hw.strict, report.feasible))
}

#[derive(Serialize)]
struct RefmodelReport {
    schema: &'static str,
    model: LatticeKind,
    lx: usize,
    ly: usize,
    couplings: (f64, f64),
    n_qubits: usize,
    n_terms: usize,
    alpha: f64,
    budget: SimulationBudget,
    logical: LogicalEstimate,
    ledger_version: String,
    physical: PhysicalReport,
}

#[derive(Serialize)]
struct RefmodelRow {
    model: String,
    lx: usize,
    ly: usize,
    n_qubits: usize,
    n_terms: usize,
    alpha: f64,
    degree: usize,
    n_t: u64,
    n_logical: u64,
    feasible: bool,
    d1: usize,
    d2: usize,
    n_phys: u64,
    t_wall_s: f64,
}

fn refmodel(
    g: &GlobalArgs,
    config: &Config,
    kind: LatticeKind,
    (lx, ly): (usize, usize),
    couplings: Option<(f64, f64)>,
    hamiltonian: Option<&Path>,
    hw: &HardwareArgs,
) -> Result<u8> {
    let mut spec = match kind {
        LatticeKind::J1J2Triangular => LatticeSpec::j1j2(lx, ly),
        LatticeKind::FermiHubbardSquare => LatticeSpec::fermi_hubbard(lx, ly),
    };
    if let Some(c) = couplings {
        spec.couplings = c;
    }
    let h = spec.build()?;
    if let Some(path) = hamiltonian {
        write_atomic(path, h.to_text().as_bytes())?;
        eprintln!("wrote {}", path.display());
    }
    let mut budget = reference_budgets()
        .into_iter()
        .find(|p| p.kind == kind)
        .map(|p| p.budget)
        .expect("every lattice kind has a preset");
    override_budget(&mut budget, g);
    budget.validate()?;
    let model = CostLedger::standard();
    let logical = evolution_cost(&h, budget.t_max, &budget, model)?;
    let physical = physical_mapping(Job::from(&logical), config, &machines(hw), 1)?;
    let feasible = physical.feasible;
    let name = match kind {
        LatticeKind::J1J2Triangular => "j1j2",
        LatticeKind::FermiHubbardSquare => "fh",
    };
    let body = match g.format {
        OutputFormat::Json => to_json(&RefmodelReport {
            schema: REPORT_SCHEMA,
            model: kind,
            lx,
            ly,
            couplings: spec.couplings,
            n_qubits: h.n_spins(),
            n_terms: h.n_terms(),
            alpha: h.alpha(),
            budget,
            logical,
            ledger_version: model.version().to_string(),
            physical,
        })?,
        OutputFormat::Csv => single_row_csv(RefmodelRow {
            model: name.into(),
            lx,
            ly,
            n_qubits: h.n_spins(),
            n_terms: h.n_terms(),
            alpha: h.alpha(),
            degree: logical.degree,
            n_t: logical.n_t,
            n_logical: logical.n_logical,
            feasible,
            d1: physical.estimate.d1,
            d2: physical.estimate.d2,
            n_phys: physical.estimate.n_phys,
            t_wall_s: physical.estimate.t_wall,
        })?,
    };
    emit(
        g.out.as_deref(),
        &format!("{name}_{lx}x{ly}.{}", g.format.extension()),
        &body,
    )?;
    Ok(strict_status(hw.strict, feasible))
}
