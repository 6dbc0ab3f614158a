use std::fmt;

use serde::Serialize;

use crate::linalg::{CVec, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Possible,
    Impossible,
    PossibleInLimit,
    Unknown,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Possible => "possible",
            VerdictKind::Impossible => "impossible",
            VerdictKind::PossibleInLimit => "possible_in_limit",
            VerdictKind::Unknown => "unknown",
        })
    }
}

/// Named reasons for impossibility. Every one of them is an analytic
/// argument, never the outcome of a failed search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CertificateKind {
    /// Some input has no legitimate output state.
    EmptyOutput,
    /// Two outputs are forced orthogonal but their inputs overlap.
    ForcedOrthogonality,
    /// An input overlap exceeds the largest overlap available between the
    /// corresponding outputs.
    OverlapBound,
    /// The overlap bound for a cloning task: `|c| > |c|²`.
    CloningGram,
    /// Tight overlap constraints force one output onto two different rays.
    UnitNormConflict,
    /// Without side effects, fixed output rays must reproduce the input
    /// Gram matrix up to phases, and do not.
    RigidGramMismatch,
    /// The ancilla Gram matrix forced by fixed output rays is not positive
    /// semidefinite.
    AncillaGramNotPsd,
    /// Ensembles of attributes sharing a state cannot be told apart.
    EnsembleOverlapUnity,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Row indices (into the expanded task rows) the certificate refers to.
    pub rows: Vec<usize>,
    /// Named numeric payload, e.g. `("overlap", 0.7071…)`.
    pub values: Vec<(String, f64)>,
    pub detail: String,
}

impl Certificate {
    pub fn new(kind: CertificateKind, detail: impl Into<String>) -> Self {
        Certificate {
            kind,
            rows: Vec::new(),
            values: Vec::new(),
            detail: detail.into(),
        }
    }

    pub fn rows(mut self, rows: &[usize]) -> Self {
        self.rows = rows.to_vec();
        self
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.push((name.to_owned(), v));
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Output rays `φ_i` and ancilla states `a_i` such that
/// `<ψ_i|ψ_j> = <φ_i|φ_j><a_i|a_j>` for the expanded input rays `ψ_i`.
#[derive(Clone, Debug, Serialize)]
pub struct QuantumWitness {
    /// Index of the task input attribute each row came from.
    pub row_input: Vec<usize>,
    #[serde(serialize_with = "ser_vecs")]
    pub inputs: Vec<CVec>,
    #[serde(serialize_with = "ser_vecs")]
    pub outputs: Vec<CVec>,
    #[serde(serialize_with = "ser_vecs")]
    pub ancillas: Vec<CVec>,
}

impl QuantumWitness {
    /// Whether all ancillas are the same state (no side effects).
    pub fn ancilla_free(&self) -> bool {
        self.ancillas
            .iter()
            .all(|a| a.len() == 1 || crate::linalg::same_ray(a, &self.ancillas[0]))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A total function on the states of the legitimate inputs.
    Classical { map: Vec<(usize, usize)> },
    Quantum(QuantumWitness),
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitEvidence {
    pub base_overlap: f64,
    pub copies: Vec<usize>,
    /// Lower bound on the Gram residual of the n-copy task.
    pub defects: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn possible(witness: Witness) -> Self {
        Verdict {
            kind: VerdictKind::Possible,
            witness: Some(witness),
            certificate: None,
            limit: None,
            note: None,
        }
    }

    pub fn impossible(certificate: Certificate) -> Self {
        Verdict {
            kind: VerdictKind::Impossible,
            witness: None,
            certificate: Some(certificate),
            limit: None,
            note: None,
        }
    }

    pub fn unknown(note: impl Into<String>) -> Self {
        Verdict {
            kind: VerdictKind::Unknown,
            witness: None,
            certificate: None,
            limit: None,
            note: Some(note.into()),
        }
    }

    pub fn in_limit(evidence: LimitEvidence) -> Self {
        Verdict {
            kind: VerdictKind::PossibleInLimit,
            witness: None,
            certificate: None,
            limit: Some(evidence),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_possible(&self) -> bool {
        self.kind == VerdictKind::Possible
    }

    pub fn is_impossible(&self) -> bool {
        self.kind == VerdictKind::Impossible
    }

    pub fn is_unknown(&self) -> bool {
        self.kind == VerdictKind::Unknown
    }

    pub fn certificate_kind(&self) -> Option<CertificateKind> {
        self.certificate.as_ref().map(|c| c.kind)
    }

    pub fn quantum_witness(&self) -> Option<&QuantumWitness> {
        match &self.witness {
            Some(Witness::Quantum(w)) => Some(w),
            _ => None,
        }
    }

    /// `Some(true)` for Possible, `Some(false)` for Impossible.
    pub fn as_bool(&self) -> Option<bool> {
        match self.kind {
            VerdictKind::Possible => Some(true),
            VerdictKind::Impossible => Some(false),
            _ => None,
        }
    }
}

/// Complex vectors as arrays of `[re, im]` rounded to 12 significant digits.
pub fn ser_vecs<S: serde::Serializer>(vs: &[CVec], s: S) -> Result<S::Ok, S::Error> {
    let rendered: Vec<Vec<[f64; 2]>> = vs
        .iter()
        .map(|v| v.iter().map(|z: &C64| [round12(z.re), round12(z.im)]).collect())
        .collect();
    rendered.serialize(s)
}

/// Rounds to 12 significant digits (and maps -0 to 0).
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
