//! Memory cost of the dense full-grid design matrix.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bigint;
use crate::qsim::CircuitConfig;
use crate::spectrum::{lattice_size, omega_max_of, SpectrumDescriptor};

pub const LAPTOP_BYTES: u64 = 16_000_000_000;
pub const WORKSTATION_BYTES: u64 = 8_000_000_000_000;
pub const HPC_BYTES: u64 = 1_500_000_000_000_000;

/// Double-precision complex.
pub const DEFAULT_BYTES_PER_ENTRY: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Laptop,
    Workstation,
    Hpc,
    Infeasible,
}

impl Tier {
    pub fn classify(bytes: &BigUint) -> Self {
        if *bytes <= BigUint::from(LAPTOP_BYTES) {
            Tier::Laptop
        } else if *bytes <= BigUint::from(WORKSTATION_BYTES) {
            Tier::Workstation
        } else if *bytes <= BigUint::from(HPC_BYTES) {
            Tier::Hpc
        } else {
            Tier::Infeasible
        }
    }

    pub fn ram_bytes(self) -> Option<u64> {
        match self {
            Tier::Laptop => Some(LAPTOP_BYTES),
            Tier::Workstation => Some(WORKSTATION_BYTES),
            Tier::Hpc => Some(HPC_BYTES),
            Tier::Infeasible => None,
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Laptop => "laptop (16 GB)",
            Tier::Workstation => "workstation (8 TB)",
            Tier::Hpc => "HPC (1.5 PB)",
            Tier::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierThresholds {
    pub laptop_bytes: u64,
    pub workstation_bytes: u64,
    pub hpc_bytes: u64,
}

impl Default for TierThresholds {
    fn default() -> Self {
        Self { laptop_bytes: LAPTOP_BYTES, workstation_bytes: WORKSTATION_BYTES, hpc_bytes: HPC_BYTES }
    }
}

/// Size of the exact method's linear system. Counts beyond `u64` are written
/// to JSON as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub omega_max: SpectrumDescriptor,
    #[serde(with = "bigint")]
    pub grid_size: BigUint,
    #[serde(with = "bigint")]
    pub lattice_size: BigUint,
    pub bytes_per_entry: u64,
    #[serde(with = "bigint")]
    pub design_matrix_bytes: BigUint,
    pub feasible_on: Tier,
    pub thresholds: TierThresholds,
}

pub fn estimate_for_spectrum(desc: &SpectrumDescriptor, bytes_per_entry: u64) -> ResourceEstimate {
    let grid_size = lattice_size(desc);
    let lattice = grid_size.clone();
    let design_matrix_bytes = &grid_size * &lattice * BigUint::from(bytes_per_entry);
    ResourceEstimate {
        omega_max: desc.clone(),
        feasible_on: Tier::classify(&design_matrix_bytes),
        grid_size,
        lattice_size: lattice,
        bytes_per_entry,
        design_matrix_bytes,
        thresholds: TierThresholds::default(),
    }
}

/// `|T| · |Ω| · bytes_per_entry` for the circuit's full grid and lattice.
pub fn estimate_memory(config: &CircuitConfig, bytes_per_entry: u64) -> ResourceEstimate {
    estimate_for_spectrum(&omega_max_of(config), bytes_per_entry)
}

/// One cell of the published RAM table next to what the dense formula gives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableComparison {
    pub tier: Tier,
    pub ram_bytes: u64,
    pub layers: usize,
    /// Qubit count as printed in the published table.
    pub reported_qubits: String,
    /// Largest `n` (one feature per qubit) whose dense design fits in `ram_bytes`.
    pub formula_max_qubits: usize,
}

const REPORTED_TABLE: [(Tier, [&str; 3]); 3] = [
    (Tier::Laptop, ["6 - 7", "4", "2 - 3"]),
    (Tier::Workstation, ["13", "7", "5"]),
    (Tier::Hpc, ["26", "13", "8 - 9"]),
];

/// Compares the published qubit limits per tier with the dense formula.
/// Most cells disagree, in both directions.
pub fn table_discrepancy_report(bytes_per_entry: u64) -> Vec<TableComparison> {
    let mut out = Vec::new();
    for (tier, reported) in REPORTED_TABLE {
        let ram = tier.ram_bytes().expect("finite tier");
        for (i, printed) in reported.iter().enumerate() {
            let layers = i + 1;
            out.push(TableComparison {
                tier,
                ram_bytes: ram,
                layers,
                reported_qubits: printed.to_string(),
                formula_max_qubits: max_qubits_within(ram, layers, bytes_per_entry),
            });
        }
    }
    out
}

fn max_qubits_within(ram: u64, layers: usize, bytes_per_entry: u64) -> usize {
    let ram = BigUint::from(ram);
    let mut n = 0;
    loop {
        let desc = SpectrumDescriptor { omega_max: vec![layers as u32; n + 1] };
        if estimate_for_spectrum(&desc, bytes_per_entry).design_matrix_bytes > ram {
            return n;
        }
        n += 1;
    }
}
