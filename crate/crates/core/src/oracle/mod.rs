//! Possibility oracles: finite classical and finite-dimensional quantum.

mod classical;
mod limit;
mod quantum;
mod solver;
mod verdict;

use serde::{Deserialize, Serialize};

use crate::algebra::Task;
use crate::error::KitResult;

pub use classical::{classical_possible, validate_classical};
pub use limit::{ensemble_defects, limit_verdict, TaskFamily};
pub use quantum::{gram_residual, quantum_possible, validate_quantum};
pub use verdict::{
    round12, ser_vecs, Certificate, CertificateKind, LimitEvidence, QuantumWitness, Verdict, VerdictKind,
    Witness,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub tau_gram: f64,
    pub tau_psd: f64,
    pub tau_sharp: f64,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub n_probe: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            tau_gram: 1e-9,
            tau_psd: 1e-9,
            tau_sharp: 1e-9,
            restarts: 64,
            iterations: 500,
            seed: 0,
            n_probe: 20,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Possibility without side effects.
pub fn possible(task: &Task, cfg: &OracleConfig) -> KitResult<Verdict> {
    if task.substrate().is_quantum() {
        quantum_possible(task, false, cfg)
    } else {
        classical_possible(task)
    }
}

/// Possibility with side effects on a generic ancilla. Classically this
/// coincides with plain possibility.
pub fn possible_with_side_effects(task: &Task, cfg: &OracleConfig) -> KitResult<Verdict> {
    if task.substrate().is_quantum() {
        quantum_possible(task, true, cfg)
    } else {
        classical_possible(task)
    }
}

/// Re-runs the defining constraint on a verdict's witness.
pub fn witness_validates(task: &Task, verdict: &Verdict, cfg: &OracleConfig) -> bool {
    match &verdict.witness {
        Some(Witness::Classical { map }) => validate_classical(task, map),
        Some(Witness::Quantum(w)) => validate_quantum(task, w, cfg),
        None => false,
    }
}
