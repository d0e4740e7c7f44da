use serde::{Deserialize, Serialize};

use super::PhysicalEstimate;

/// A machine on which shots run concurrently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Machine {
    pub name: String,
    pub logical_qubits: Option<u64>,
    /// `None` sizes the machine to exactly one job.
    pub physical_qubits: Option<u64>,
}

impl Machine {
    pub fn minimal() -> Self {
        Self {
            name: "minimal".into(),
            logical_qubits: None,
            physical_qubits: None,
        }
    }

    /// Machine able to factor 2048-bit integers in 8 h.
    pub fn gidney_ekera() -> Self {
        Self {
            name: "ge".into(),
            logical_qubits: Some(6190),
            physical_qubits: Some(20_000_000),
        }
    }

    /// Machine able to simulate a 128 × 128 Fermi–Hubbard lattice.
    pub fn fh128() -> Self {
        Self {
            name: "fh128".into(),
            logical_qubits: Some(32_805),
            physical_qubits: Some(48_100_000),
        }
    }

    pub fn custom(physical_qubits: u64) -> Self {
        Self {
            name: format!("custom:{physical_qubits}"),
            logical_qubits: None,
            physical_qubits: Some(physical_qubits),
        }
    }

    /// Shots that fit side by side.
    pub fn concurrency(&self, estimate: &PhysicalEstimate) -> u64 {
        match self.physical_qubits {
            None => 1,
            Some(q) => q / estimate.n_phys.max(1),
        }
    }
}

impl std::str::FromStr for Machine {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minimal" => Ok(Self::minimal()),
            "ge" | "gidney-ekera" => Ok(Self::gidney_ekera()),
            "fh128" => Ok(Self::fh128()),
            other => match other.strip_prefix("custom:").map(str::parse::<u64>) {
                Some(Ok(q)) if q > 0 => Ok(Self::custom(q)),
                _ => Err(crate::Error::Config(format!(
                    "unknown machine {s:?}; expected minimal, ge, fh128 or custom:<qubits>"
                ))),
            },
        }
    }
}

pub fn reference_machines() -> Vec<Machine> {
    vec![
        Machine::minimal(),
        Machine::gidney_ekera(),
        Machine::fh128(),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineRuntime {
    pub machine: String,
    pub concurrency: u64,
    pub total_shots: u64,
    /// s; `None` when the job does not fit.
    pub runtime: Option<f64>,
}

/// `⌈shots / concurrency⌉ · T_wall`.
pub fn runtime(estimate: &PhysicalEstimate, machine: &Machine, total_shots: u64) -> MachineRuntime {
    let concurrency = machine.concurrency(estimate);
    let runtime =
        (concurrency > 0).then(|| total_shots.div_ceil(concurrency) as f64 * estimate.t_wall);
    MachineRuntime {
        machine: machine.name.clone(),
        concurrency,
        total_shots,
        runtime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physest::{evaluate, HardwareModel, Job};

    #[test]
    fn profiles() {
        let ms = reference_machines();
        assert_eq!(ms[1].logical_qubits, Some(6190));
        assert_eq!(ms[1].physical_qubits, Some(20_000_000));
        assert_eq!(ms[2].logical_qubits, Some(32_805));
        assert_eq!(ms[2].physical_qubits, Some(48_100_000));
        assert_eq!(
            "custom:5000".parse::<Machine>().unwrap().physical_qubits,
            Some(5000)
        );
        assert!("custom:x".parse::<Machine>().is_err());
    }

    #[test]
    fn concurrency_and_runtime() {
        let job = Job {
            n_t: 1_000_000,
            n_logical: 100,
        };
        let est = evaluate(job, 9, 15, &HardwareModel::default(), 1e-3, None).unwrap();
        assert_eq!(Machine::minimal().concurrency(&est), 1);
        let r = runtime(&est, &Machine::minimal(), 10);
        assert_eq!(r.runtime, Some(10.0 * est.t_wall));
        let ge = runtime(&est, &Machine::gidney_ekera(), 1000);
        let c = 20_000_000 / est.n_phys;
        assert_eq!(ge.concurrency, c);
        assert_eq!(ge.runtime, Some(1000u64.div_ceil(c) as f64 * est.t_wall));
        assert_eq!(runtime(&est, &Machine::custom(10), 5).runtime, None);
    }
}
