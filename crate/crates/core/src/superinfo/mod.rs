//! Superinformation media and the properties that follow from them.

mod locality;
mod suite;
mod unpredict;

use serde::Serialize;

use crate::algebra::{AttrRef, Attribute, Substrate, Task, Variable};
use crate::error::{KitError, KitResult};
use crate::info::{
    is_clonable, is_information_variable, is_observable, perp, pointer, pointer_medium, Outcome,
};
use crate::model::Model;
use crate::oracle::{
    limit_verdict, possible_with_side_effects, CertificateKind, OracleConfig, TaskFamily, Verdict,
    VerdictKind,
};

pub use locality::{coherence_check, verify_locally_inaccessible, LocalityReport};
pub use suite::{run_section, SECTIONS};
pub use unpredict::{
    consecutive_measurement_network, perturbation_task, unpredictability_certificate, ConsecutiveReport,
    UnpredictabilityCertificate,
};

#[derive(Clone, Debug, Serialize)]
pub struct NamedVerdict {
    pub name: String,
    pub verdict: Verdict,
}

impl NamedVerdict {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        NamedVerdict {
            name: name.into(),
            verdict,
        }
    }
}

/// The outcome of checking one claim on a concrete model.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremCheck {
    pub section: String,
    pub claim: String,
    /// `None` when some oracle call was undecided.
    pub holds: Option<bool>,
    pub verdicts: Vec<NamedVerdict>,
    pub values: Vec<(String, f64)>,
    pub note: String,
}

impl TheoremCheck {
    pub fn new(section: &str, claim: &str) -> Self {
        TheoremCheck {
            section: section.into(),
            claim: claim.into(),
            holds: Some(true),
            verdicts: Vec::new(),
            values: Vec::new(),
            note: String::new(),
        }
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.push((name.into(), v));
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    fn expect_kind(&mut self, name: &str, v: Verdict, wanted: VerdictKind) -> KitResult<()> {
        self.expect(name, v, &[wanted])
    }

    fn expect(&mut self, name: &str, v: Verdict, wanted: &[VerdictKind]) -> KitResult<()> {
        if v.is_unknown() {
            self.holds = None;
        } else if !wanted.contains(&v.kind) {
            return Err(KitError::TheoremViolation(format!(
                "{} {}: `{name}` is {} (expected {:?})",
                self.section, self.claim, v.kind, wanted
            )));
        }
        self.verdicts.push(NamedVerdict::new(name, v));
        Ok(())
    }
}

/// Two information observables whose union is not an information
/// variable, with an indistinguishable cross pair.
#[derive(Clone, Debug)]
pub struct SuperinfoWitness {
    pub medium: Substrate,
    pub x_var: Variable,
    pub y_var: Variable,
    pub union_failure: Outcome,
    pub pair: (AttrRef, AttrRef),
    pub pair_overlap: f64,
}

#[derive(Clone, Debug)]
pub struct Detection {
    pub witness: Option<SuperinfoWitness>,
    /// Pairs of candidate observables examined.
    pub pairs_checked: usize,
    /// Checks whose oracle answer was undecided.
    pub undecided: usize,
}

/// Searches each substrate's candidate observables: the declared
/// variables for quantum substrates, every variable of nonempty
/// attributes for classical ones.
pub fn detect_superinformation(model: &Model, cfg: &OracleConfig) -> KitResult<Detection> {
    let mut det = Detection {
        witness: None,
        pairs_checked: 0,
        undecided: 0,
    };
    for s in model.substrates() {
        let candidates: Vec<Variable> = if s.is_quantum() {
            model.variables_on(s).into_iter().cloned().collect()
        } else {
            classical_variables(s)?
        };
        if let Some(w) = detect_on(s, &candidates, model, cfg, &mut det)? {
            det.witness = Some(w);
            return Ok(det);
        }
    }
    Ok(det)
}

/// Superinformation search among `candidates` on one substrate.
pub fn detect_on(
    s: &Substrate,
    candidates: &[Variable],
    model: &Model,
    cfg: &OracleConfig,
    det: &mut Detection,
) -> KitResult<Option<SuperinfoWitness>> {
    let mut observables = Vec::new();
    for v in candidates.iter().filter(|v| v.len() >= 2) {
        let info = is_information_variable(v, model, cfg)?;
        match info.value {
            Some(true) if is_observable(v) => observables.push(v.clone()),
            None => det.undecided += 1,
            _ => {}
        }
    }
    for (i, x) in observables.iter().enumerate() {
        for y in &observables[i + 1..] {
            let disjoint = x
                .attributes()
                .iter()
                .all(|a| y.attributes().iter().all(|b| a.is_disjoint_from(b)));
            if !disjoint {
                continue;
            }
            det.pairs_checked += 1;
            let union = x.union_with(y)?;
            let out = is_information_variable(&union, model, cfg)?;
            match out.value {
                Some(false) => {
                    let (a, b, overlap) = find_indistinguishable_pair(x, y, cfg)?;
                    return Ok(Some(SuperinfoWitness {
                        medium: s.clone(),
                        x_var: x.clone(),
                        y_var: y.clone(),
                        union_failure: out,
                        pair: (a, b),
                        pair_overlap: overlap,
                    }));
                }
                None => det.undecided += 1,
                Some(true) => {}
            }
        }
    }
    Ok(None)
}

/// Every variable of nonempty, pairwise-disjoint state sets on a classical
/// substrate (the nonempty partial partitions of its states).
pub fn classical_variables(s: &Substrate) -> KitResult<Vec<Variable>> {
    let n = s.size();
    let mut out = Vec::new();
    // Block index per state, or n for "not covered"; canonical labelling
    // (blocks numbered in order of first appearance) avoids repeats.
    fn rec(k: usize, n: usize, assign: &mut Vec<usize>, blocks: usize, acc: &mut Vec<Vec<usize>>) {
        if k == n {
            if blocks > 0 {
                acc.push(assign.clone());
            }
            return;
        }
        for b in 0..=blocks {
            assign.push(b);
            rec(k + 1, n, assign, blocks.max(b + 1), acc);
            assign.pop();
        }
        assign.push(usize::MAX);
        rec(k + 1, n, assign, blocks, acc);
        assign.pop();
    }
    let mut assignments = Vec::new();
    rec(0, n, &mut Vec::new(), 0, &mut assignments);
    for a in assignments {
        let blocks = a.iter().filter(|&&b| b != usize::MAX).max().map_or(0, |m| m + 1);
        let attrs = (0..blocks)
            .map(|b| {
                Attribute::states(s, (0..n).filter(|&k| a[k] == b))
                    .map(|x| x.into_ref())
            })
            .collect::<KitResult<Vec<_>>>()?;
        out.push(Variable::new(attrs)?);
    }
    Ok(out)
}

pub fn find_indistinguishable_pair(
    x_var: &Variable,
    y_var: &Variable,
    cfg: &OracleConfig,
) -> KitResult<(AttrRef, AttrRef, f64)> {
    for a in x_var.attributes() {
        for b in y_var.attributes() {
            if perp(a, b, cfg)? == Some(false) {
                let overlap = if a.is_quantum() { a.max_overlap(b) } else { 1.0 };
                return Ok((a.clone(), b.clone(), overlap));
            }
        }
    }
    Err(KitError::TheoremViolation(
        "every cross pair of a superinformation witness is distinguishable".into(),
    ))
}

/// Sharpness of `X` versus `Y` cannot be measured, although it can on
/// ensembles.
pub fn verify_undetectable_sharpness(w: &SuperinfoWitness, cfg: &OracleConfig) -> KitResult<TheoremCheck> {
    let mut check = TheoremCheck::new("8.2", "whether X or Y is sharp cannot be measured");
    let task = sharpness_task(&w.x_var, &w.y_var)?;
    check.expect("sharpness measurement", possible_with_side_effects(&task, cfg)?, &[VerdictKind::Impossible])?;
    let ens = ensemble_distinguishable(&w.pair.0, &w.pair.1, cfg)?;
    if let Some(ev) = &ens.limit {
        if let Some(d) = ev.defects.last() {
            check.values.push((format!("ensemble_defect_n{}", ev.copies.len()), *d));
        }
    }
    check.expect(
        "ensemble sharpness measurement",
        ens,
        &[VerdictKind::PossibleInLimit, VerdictKind::Possible],
    )?;
    Ok(check.value("pair_overlap", w.pair_overlap))
}

/// `x → 'X-sharp'` for `x ∈ X`, `y → 'Y-sharp'` for `y ∈ Y`.
pub fn sharpness_task(x_var: &Variable, y_var: &Variable) -> KitResult<Task> {
    let s = x_var.substrate();
    let (px, py) = (pointer(s, 0)?, pointer(s, 1)?);
    let pairs = x_var
        .attributes()
        .iter()
        .map(|a| (a.clone(), px.clone()))
        .chain(y_var.attributes().iter().map(|b| (b.clone(), py.clone())))
        .collect();
    Task::new(pairs)
}

pub fn verify_no_cloning(w: &SuperinfoWitness, model: &Model, cfg: &OracleConfig) -> KitResult<TheoremCheck> {
    let mut check = TheoremCheck::new("8.3", "superinformation cannot be cloned");
    let pair = Variable::new(vec![w.pair.0.clone(), w.pair.1.clone()])?;
    for (name, v) in [("pair", pair), ("X ∪ Y", w.x_var.union_with(&w.y_var)?)] {
        let out = is_clonable(&v, model, cfg)?;
        match (out.value, out.verdict) {
            (Some(true), _) => {
                return Err(KitError::TheoremViolation(format!("8.3: {name} is clonable")));
            }
            (Some(false), Some(verdict)) => {
                if name == "pair" && verdict.certificate_kind() != Some(CertificateKind::CloningGram) {
                    check.note = format!("pair refuted by {:?}", verdict.certificate_kind());
                }
                check.verdicts.push(NamedVerdict::new(format!("cloning {name}"), verdict));
            }
            _ => check.holds = None,
        }
    }
    let c = w.pair_overlap;
    Ok(check.value("overlap", c).value("overlap_squared", c * c))
}

/// No state makes `X` and `Y` both sharp, and no single measurer reports
/// both.
pub fn verify_complementarity(w: &SuperinfoWitness, cfg: &OracleConfig) -> KitResult<TheoremCheck> {
    let mut check = TheoremCheck::new("8.4", "X and Y cannot be prepared or measured both sharp");
    let mut empty = 0;
    for a in w.x_var.attributes() {
        for b in w.y_var.attributes() {
            if !a.is_disjoint_from(b) {
                return Err(KitError::TheoremViolation(format!("8.4: `{a}` and `{b}` intersect")));
            }
            empty += 1;
        }
    }
    check.values.push(("empty_intersections".into(), empty as f64));
    let task = joint_measurement_task(&w.x_var, &w.y_var)?;
    check.expect("joint measurement", possible_with_side_effects(&task, cfg)?, &[VerdictKind::Impossible])?;
    Ok(check)
}

/// One measurer with two records: attributes of `X` must yield their own
/// label in the first record and "not sharp" in the second, and vice
/// versa for `Y`.
pub fn joint_measurement_task(x_var: &Variable, y_var: &Variable) -> KitResult<Task> {
    let s = x_var.substrate();
    let q = s.is_quantum();
    let mx = pointer_medium("MX", x_var.len() + 1, q)?;
    let my = pointer_medium("MY", y_var.len() + 1, q)?;
    let (nx, ny) = (pointer(&mx, x_var.len())?, pointer(&my, y_var.len())?);
    let receptive = (pointer(&mx, 0)?, pointer(&my, 0)?);
    let full = Attribute::full(s).into_ref();
    let mut pairs = Vec::new();
    for (i, a) in x_var.attributes().iter().enumerate() {
        pairs.push((
            Attribute::product(&[a.clone(), receptive.0.clone(), receptive.1.clone()])?.into_ref(),
            Attribute::product(&[full.clone(), pointer(&mx, i)?, ny.clone()])?.into_ref(),
        ));
    }
    for (j, b) in y_var.attributes().iter().enumerate() {
        pairs.push((
            Attribute::product(&[b.clone(), receptive.0.clone(), receptive.1.clone()])?.into_ref(),
            Attribute::product(&[full.clone(), nx.clone(), pointer(&my, j)?])?.into_ref(),
        ));
    }
    Task::new(pairs)
}

/// `x^(n)` versus `y^(n)` as `n` grows.
pub fn ensemble_distinguishable(x: &AttrRef, y: &AttrRef, cfg: &OracleConfig) -> KitResult<Verdict> {
    if x.substrate() != y.substrate() || !x.is_disjoint_from(y) {
        return Err(KitError::PreconditionFailed(format!(
            "`{}` and `{}` are not disjoint attributes of one substrate",
            x.describe(),
            y.describe()
        )));
    }
    limit_verdict(
        &TaskFamily::EnsembleDistinguish {
            x: x.clone(),
            y: y.clone(),
        },
        cfg,
    )
}
