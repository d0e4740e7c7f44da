use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zulf_core::physest::Machine;
use zulf_core::refmodels::LatticeKind;
use zulf_core::structio::{DipolarMode, NucleusSet, StructureFormat};

/// Environment variable holding directories searched for `zulf.toml`.
pub const CONFIG_PATH_ENV: &str = "ZULF_CONFIG_PATH";
pub const CONFIG_FILE_NAME: &str = "zulf.toml";

fn parse_with<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr<Err = zulf_core::Error>,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "zulf",
    version,
    about = "Zero-field NMR spin Hamiltonians and fault-tolerant resource estimates"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Configuration file; otherwise `zulf.toml` is searched in $ZULF_CONFIG_PATH.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Nuclei included in the register: proton or hetero.
    #[arg(long, global = true, value_parser = parse_with::<NucleusSet>)]
    pub regime: Option<NucleusSet>,
    /// Dipolar couplings: none, rdc or full.
    #[arg(long, global = true, value_parser = parse_with::<DipolarMode>)]
    pub dipolar: Option<DipolarMode>,
    /// Residual dipolar scale factor.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Longest simulated time, s.
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    /// Transverse relaxation time, s.
    #[arg(long, global = true)]
    pub t2: Option<f64>,
    /// Cap on the per-shot unitary error.
    #[arg(long, global = true)]
    pub eps_max: Option<f64>,
    /// Number of timepoints.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Minimum cluster size counted in aggregates.
    #[arg(long, global = true, default_value_t = zulf_core::lcost::DEFAULT_THRESHOLD)]
    pub threshold: usize,
    /// Output directory; reports go to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Worker threads for batch runs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Structure files or directories of them.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Structure format, overriding the file extension.
    #[arg(long, value_parser = parse_with::<StructureFormat>)]
    pub input_format: Option<StructureFormat>,
}

#[derive(Debug, Args)]
pub struct HardwareArgs {
    /// Physical error rate per operation.
    #[arg(long)]
    pub p_phys: Option<f64>,
    /// Surface-code cycle time, s.
    #[arg(long)]
    pub t_cycle: Option<f64>,
    /// Reaction time, s.
    #[arg(long)]
    pub t_react: Option<f64>,
    /// Total non-algorithmic error budget.
    #[arg(long)]
    pub target_error: Option<f64>,
    /// Machine profile: minimal, ge, fh128 or custom:<qubits>. Repeatable.
    #[arg(long = "machine", value_parser = parse_with::<Machine>)]
    pub machines: Vec<Machine>,
    /// Exit with status 3 when a physical mapping is infeasible.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeGrid {
    Uniform,
    Log,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster table with hardness flags for each molecule.
    Inspect(InputArgs),
    /// Logical and physical resource estimates for each molecule.
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        hardware: HardwareArgs,
        /// Skip the physical mapping.
        #[arg(long)]
        logical_only: bool,
    },
    /// Exact correlation trace and spectrum of one cluster.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        /// sz (unweighted) or mz (gyromagnetic weighted).
        #[arg(long, default_value = "mz", value_parser = parse_with::<zulf_core::oracle::ObservableKind>)]
        observable: zulf_core::oracle::ObservableKind,
        /// Cluster index, largest first.
        #[arg(long, default_value_t = 0)]
        cluster: usize,
        #[arg(long, value_enum, default_value_t = TimeGrid::Uniform)]
        grid: TimeGrid,
        /// Thermal initial state `∝ e^{βS}` instead of the uniform mixture.
        #[arg(long, conflicts_with = "seed")]
        beta: Option<f64>,
        /// Sampled basis-state ensemble with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Relative intensity below which peaks are dropped.
        #[arg(long, default_value_t = 0.05)]
        peak_threshold: f64,
    },
    /// Phase tuples for `e^{iτ cos θ}`.
    Phases {
        /// Rotation angle τ; alternatively give --alpha and --time.
        #[arg(long, required_unless_present_all = ["alpha", "time"], conflicts_with_all = ["alpha", "time"])]
        tau: Option<f64>,
        /// LCU 1-norm, Hz.
        #[arg(long, requires = "time")]
        alpha: Option<f64>,
        /// Evolution time, s.
        #[arg(long, requires = "alpha")]
        time: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
    },
    /// Surface-code footprint for a given logical workload.
    Physical {
        #[arg(long)]
        n_t: u64,
        #[arg(long)]
        n_logical: u64,
        /// Shots to schedule on each machine.
        #[arg(long, default_value_t = 1)]
        shots: u64,
        #[command(flatten)]
        hardware: HardwareArgs,
    },
    /// Estimates for the triangular J1-J2 or Fermi-Hubbard reference lattices.
    Refmodel {
        /// j1j2 or fh.
        #[arg(long, value_parser = parse_with::<LatticeKind>)]
        kind: LatticeKind,
        #[arg(long)]
        lx: usize,
        #[arg(long)]
        ly: usize,
        /// Couplings (J1, J2) or (J, U); defaults to (1, 0.5) or (1, -4).
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        couplings: Option<Vec<f64>>,
        /// Also write the Hamiltonian in text form to this file.
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        #[command(flatten)]
        hardware: HardwareArgs,
    },
}
