//! Principles II–IX as checks on a concrete model, and an exhaustive
//! counterexample search over small classical models.

mod falsify;
mod scope;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{
    permutation_task, product_variable, validate_network, AttrRef, Attribute, Network, Permutation, Substrate,
    Task, Variable,
};
use crate::error::{KitError, KitResult};
use crate::info::{
    bar_bar, distinguish, is_information_variable, measurement_task, MeasurementSpec, PerpRelation,
};
use crate::linalg::{basis_vector, extend_isometry, kron_mat, CMat};
use crate::model::Model;
use crate::oracle::{
    possible, possible_with_side_effects, validate_classical, witness_validates, OracleConfig, Verdict,
    VerdictKind, Witness,
};
use crate::superinfo::{ensemble_distinguishable, NamedVerdict};

pub use falsify::{falsify, Falsification, DEFAULT_FALSIFY_BOUND};
pub use scope::{attribute_scope, variable_scope, Scope};

/// Evidence entries kept per report; the counts cover every instance.
const EVIDENCE_CAP: usize = 32;
/// Networks sampled for VII.
const NETWORK_SAMPLE: usize = 64;
/// Largest composite enumerated state by state for II.
const MAX_COMPOSITE: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Principle {
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
}

impl Principle {
    pub const ALL: [Principle; 8] = [
        Principle::II,
        Principle::III,
        Principle::IV,
        Principle::V,
        Principle::VI,
        Principle::VII,
        Principle::VIII,
        Principle::IX,
    ];

    pub fn statement(self) -> &'static str {
        match self {
            Principle::II => "composite states are ordered pairs of component states",
            Principle::III => "the product of information variables of two media is an information variable",
            Principle::IV => "a variable of pairwise distinguishable attributes is distinguishable",
            Principle::V => "an attribute whose every state is distinguishable from x is distinguishable from x",
            Principle::VI => "every preparable attribute is preparable from naturally occurring substrates",
            Principle::VII => "every regular network of possible tasks is a possible task",
            Principle::VIII => "if one measurer of X gives a sharp output on a, all measurers of X do",
            Principle::IX => "any two disjoint intrinsic attributes are ensemble distinguishable",
        }
    }
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Principle {
    type Err = KitError;

    fn from_str(s: &str) -> KitResult<Self> {
        Principle::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| KitError::UnknownName(s.to_owned()))
    }
}

/// A failed instance, with enough to replay it.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub fragment: String,
    pub operation: String,
    pub verdicts: Vec<NamedVerdict>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status")]
pub enum Status {
    Holds,
    Fails { counterexample: Counterexample },
    Axiomatic,
    PartiallyChecked { coverage: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub instance: String,
    pub holds: Option<bool>,
    pub verdicts: Vec<NamedVerdict>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrincipleReport {
    pub principle: Principle,
    pub status: Status,
    pub scope: String,
    pub instances: usize,
    /// Instances whose hypothesis did not apply.
    pub vacuous: usize,
    pub undecided: usize,
    pub evidence: Vec<Evidence>,
}

impl PrincipleReport {
    pub fn holds(&self) -> bool {
        matches!(self.status, Status::Holds | Status::Axiomatic)
    }

    pub fn fails(&self) -> bool {
        matches!(self.status, Status::Fails { .. })
    }
}

#[derive(Default)]
struct Tally {
    instances: usize,
    vacuous: usize,
    undecided: usize,
    evidence: Vec<Evidence>,
    failure: Option<Counterexample>,
}

impl Tally {
    fn vacuous(&mut self) {
        self.instances += 1;
        self.vacuous += 1;
    }

    fn record(
        &mut self,
        instance: String,
        holds: Option<bool>,
        verdicts: Vec<NamedVerdict>,
        note: String,
        fragment: impl FnOnce() -> String,
    ) {
        self.instances += 1;
        match holds {
            None => self.undecided += 1,
            Some(false) if self.failure.is_none() => {
                self.failure = Some(Counterexample {
                    fragment: fragment(),
                    operation: instance.clone(),
                    verdicts: verdicts.clone(),
                });
            }
            _ => {}
        }
        if self.evidence.len() < EVIDENCE_CAP || holds != Some(true) {
            self.evidence.push(Evidence {
                instance,
                holds,
                verdicts,
                note,
            });
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.instances += other.instances;
        self.vacuous += other.vacuous;
        self.undecided += other.undecided;
        for e in other.evidence {
            if self.evidence.len() < EVIDENCE_CAP || e.holds != Some(true) {
                self.evidence.push(e);
            }
        }
        if self.failure.is_none() {
            self.failure = other.failure;
        }
    }

    fn finish(self, principle: Principle, scope: String, complete: bool) -> PrincipleReport {
        let status = if let Some(counterexample) = self.failure {
            Status::Fails { counterexample }
        } else if self.undecided > 0 {
            Status::PartiallyChecked {
                coverage: format!("{} of {} instances undecided", self.undecided, self.instances),
            }
        } else if !complete {
            Status::PartiallyChecked { coverage: scope.clone() }
        } else {
            Status::Holds
        };
        PrincipleReport {
            principle,
            status,
            scope,
            instances: self.instances,
            vacuous: self.vacuous,
            undecided: self.undecided,
            evidence: self.evidence,
        }
    }
}

fn kind_holds(v: &Verdict, wanted: &[VerdictKind]) -> Option<bool> {
    if v.is_unknown() {
        None
    } else {
        Some(wanted.contains(&v.kind))
    }
}

pub fn check_principle(p: Principle, model: &Model, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let scope = Scope::of_model(model)?;
    check_in_scope(p, model, &scope, cfg)
}

/// Runs the check for `p` over the attributes and variables of `scope`.
pub fn check_in_scope(p: Principle, model: &Model, scope: &Scope, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    match p {
        Principle::II => check_ii(model, cfg),
        Principle::III => check_iii(model, cfg),
        Principle::IV => check_iv(scope, cfg),
        Principle::V => check_v(scope, cfg),
        Principle::VI => Ok(check_vi(model)),
        Principle::VII => check_vii(model, cfg),
        Principle::VIII => check_viii(scope, cfg),
        Principle::IX => check_ix(scope, cfg),
    }
}

fn basis_attr(s: &Substrate, k: usize) -> KitResult<AttrRef> {
    let a = if s.is_quantum() {
        Attribute::ray(s, basis_vector(s.size(), k))?
    } else {
        Attribute::states(s, [k])?
    };
    Ok(a.into_ref())
}

fn digits(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut d = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        d[k] = index % sizes[k];
        index /= sizes[k];
    }
    d
}

/// Declared composites, plus each elementary substrate paired with a copy
/// of itself.
fn composites(model: &Model) -> KitResult<Vec<Substrate>> {
    let mut out = Vec::new();
    for s in model.substrates() {
        if s.is_composite() {
            out.push(s.clone());
        } else {
            out.push(Substrate::composite(&[s.clone(), s.renamed("′")])?);
        }
    }
    Ok(out)
}

fn check_ii(model: &Model, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let mut t = Tally::default();
    let mut complete = true;
    for c in composites(model)? {
        let comps = c.components();
        let sizes: Vec<usize> = comps.iter().map(|s| s.size()).collect();
        let factored = sizes.iter().product::<usize>() == c.size();
        if !factored {
            t.record(format!("state space of {c}"), Some(false), Vec::new(), String::new(), || c.to_string());
            continue;
        }
        if c.size() > MAX_COMPOSITE {
            complete = false;
            continue;
        }
        for (k, comp) in comps.iter().enumerate().filter(|(_, s)| s.size() >= 2) {
            let swap = |d: usize| match d {
                0 => 1,
                1 => 0,
                d => d,
            };
            let mut pairs = Vec::with_capacity(c.size());
            for i in 0..c.size() {
                let d = digits(i, &sizes);
                let mut e = d.clone();
                e[k] = swap(e[k]);
                let fac = |ds: &[usize]| -> KitResult<Vec<AttrRef>> {
                    comps.iter().zip(ds).map(|(s, &j)| basis_attr(s, j)).collect()
                };
                pairs.push((
                    Attribute::product_on(&c, &fac(&d)?)?.into_ref(),
                    Attribute::product_on(&c, &fac(&e)?)?.into_ref(),
                ));
            }
            let task = Task::new(pairs)?;
            let v = possible(&task, cfg)?;
            let mut holds = kind_holds(&v, &[VerdictKind::Possible]);
            if holds == Some(true) {
                let other_fixed = match &v.witness {
                    Some(Witness::Classical { map }) => map.iter().all(|&(s, img)| {
                        let (ds, di) = (digits(s, &sizes), digits(img, &sizes));
                        (0..sizes.len()).all(|j| j == k || ds[j] == di[j])
                    }),
                    _ => witness_validates(&task, &v, cfg),
                };
                holds = Some(other_fixed);
            }
            t.record(
                format!("swap 0↔1 on `{comp}` inside {c}"),
                holds,
                vec![NamedVerdict::new("local swap", v)],
                String::new(),
                || task.describe(),
            );
        }
    }
    let scope = "declared composites and each substrate paired with a copy; local swap on every factor".to_owned();
    Ok(t.finish(Principle::II, scope, complete))
}

fn rebase_variable(v: &Variable, target: &Substrate) -> KitResult<Variable> {
    let attrs = v
        .attributes()
        .iter()
        .map(|a| a.rebase(target).map(|a| a.into_ref()))
        .collect::<KitResult<Vec<_>>>()?;
    Variable::new(attrs)?.with_labels(v.labels())
}

fn check_iii(model: &Model, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let mut t = Tally::default();
    let mut info: Vec<(String, Variable)> = Vec::new();
    for (name, v) in model.variables() {
        let out = is_information_variable(v, model, cfg)?;
        match out.value {
            Some(true) => info.push((name.clone(), v.clone())),
            Some(false) => t.vacuous(),
            None => t.record(
                format!("is `{name}` an information variable"),
                None,
                out.verdict.into_iter().map(|v| NamedVerdict::new(name.as_str(), v)).collect(),
                out.note,
                String::new,
            ),
        }
    }
    let mut pairs: Vec<(String, Variable, Variable)> = Vec::new();
    for (i, (na, a)) in info.iter().enumerate() {
        let copy = rebase_variable(a, &a.substrate().renamed("₂"))?;
        pairs.push((format!("{na} × {na}₂"), a.clone(), copy));
        for (nb, b) in &info[i + 1..] {
            let distinct = a.substrate().shares_leaf_with(b.substrate()).is_none();
            if distinct && a.substrate().is_quantum() == b.substrate().is_quantum() {
                pairs.push((format!("{na} × {nb}"), a.clone(), b.clone()));
            }
        }
    }
    for (name, a, b) in pairs {
        let prod = product_variable(&a, &b)?;
        let out = is_information_variable(&prod, model, cfg)?;
        t.record(
            name,
            out.value,
            out.verdict.into_iter().map(|v| NamedVerdict::new("product", v)).collect(),
            out.note,
            || prod.describe(),
        );
    }
    let scope = "declared information variables, pairwise on distinct media and each with a copy of its medium";
    Ok(t.finish(Principle::III, scope.into(), true))
}

fn check_iv(scope: &Scope, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let perp = PerpRelation::new();
    let mut t = Tally::default();
    for v in scope.variables() {
        let mut all_perp = Some(true);
        'pairs: for (i, a) in v.attributes().iter().enumerate() {
            for b in &v.attributes()[i + 1..] {
                match perp.get(a, b, cfg)? {
                    Some(true) => {}
                    Some(false) => {
                        all_perp = Some(false);
                        break 'pairs;
                    }
                    None => all_perp = None,
                }
            }
        }
        match all_perp {
            Some(false) => t.vacuous(),
            None => t.record(format!("pairwise ⊥ in {}", v.describe()), None, Vec::new(), String::new(), String::new),
            Some(true) => {
                let d = distinguish(v, cfg)?;
                t.record(
                    format!("distinguish {}", v.describe()),
                    kind_holds(&d, &[VerdictKind::Possible]),
                    vec![NamedVerdict::new("distinguish", d)],
                    String::new(),
                    || v.describe(),
                );
            }
        }
    }
    Ok(t.finish(Principle::IV, scope.note(), scope.complete()))
}

fn singletons(a: &AttrRef) -> KitResult<Vec<AttrRef>> {
    let s = a.substrate();
    if s.is_quantum() {
        a.spanning_rays()
            .into_iter()
            .map(|r| Attribute::ray(s, r).map(|x| x.into_ref()))
            .collect()
    } else {
        a.state_set()
            .into_iter()
            .map(|k| Attribute::states(s, [k]).map(|x| x.into_ref()))
            .collect()
    }
}

fn check_v(scope: &Scope, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let perp = PerpRelation::new();
    let mut t = Tally::default();
    for attrs in scope.attribute_groups() {
        for x in attrs {
            for y in attrs {
                let mut hyp = Some(true);
                for s in singletons(y)? {
                    match perp.get(&s, x, cfg)? {
                        Some(true) => {}
                        Some(false) => {
                            hyp = Some(false);
                            break;
                        }
                        None => hyp = None,
                    }
                }
                let instance = format!("{} ⊥ {}", y.describe(), x.describe());
                match hyp {
                    Some(false) => t.vacuous(),
                    None => t.record(instance, None, Vec::new(), "hypothesis undecided".into(), String::new),
                    Some(true) => {
                        let d = distinguish(&Variable::new(vec![y.clone(), x.clone()])?, cfg)?;
                        t.record(
                            instance,
                            kind_holds(&d, &[VerdictKind::Possible]),
                            vec![NamedVerdict::new("distinguish", d)],
                            String::new(),
                            || format!("x = {}, y = {}", x.describe(), y.describe()),
                        );
                    }
                }
            }
        }
    }
    Ok(t.finish(Principle::V, scope.note(), scope.complete()))
}

fn check_vi(model: &Model) -> PrincipleReport {
    let evidence = model
        .attributes()
        .iter()
        .filter(|a| a.preparable || a.generic)
        .map(|a| Evidence {
            instance: format!("`{}` declared {}", a.name, if a.generic { "generic" } else { "preparable" }),
            holds: None,
            verdicts: Vec::new(),
            note: String::new(),
        })
        .collect();
    PrincipleReport {
        principle: Principle::VI,
        status: Status::Axiomatic,
        scope: "preparable and generic flags of the model file".into(),
        instances: 0,
        vacuous: 0,
        undecided: 0,
        evidence,
    }
}

/// Possible side-effect-free tasks used as network nodes.
fn sample_tasks(model: &Model, s: &Substrate, cfg: &OracleConfig) -> KitResult<Vec<(String, Task, Verdict)>> {
    let mut candidates: Vec<(String, Task)> = Vec::new();
    for v in model.variables_on(s).into_iter().filter(|v| v.len() >= 2) {
        let name = v.name().unwrap_or("?");
        let n = v.len();
        candidates.push((format!("swap on {name}"), permutation_task(v, &Permutation::transposition(n, 0, 1))?));
        if n > 2 {
            candidates.push((format!("shift on {name}"), permutation_task(v, &Permutation::cyclic_shift(n))?));
        }
    }
    if !s.is_quantum() {
        let reset = Task::new(vec![(Attribute::full(s).into_ref(), basis_attr(s, 0)?)])?;
        candidates.push((format!("reset {s}"), reset));
    }
    let mut out = Vec::new();
    for (name, task) in candidates {
        let v = possible(&task, cfg)?;
        if v.is_possible() && v.witness.is_some() {
            out.push((name, task, v));
        }
    }
    Ok(out)
}

fn unitary_of(v: &Verdict) -> Option<CMat> {
    let w = v.quantum_witness()?;
    extend_isometry(&w.inputs, &w.outputs, 1e-7)
}

/// Builds the witness of the flattened network from the nodes' witnesses
/// and checks it against the flattened task.
fn composed_witness_validates(flat: &Task, a: &Verdict, b: &Verdict, serial: bool) -> bool {
    match (&a.witness, &b.witness) {
        (Some(Witness::Classical { map: ma }), Some(Witness::Classical { map: mb })) => {
            let image = |m: &[(usize, usize)], s: usize| m.iter().find(|(x, _)| *x == s).map(|(_, y)| *y);
            let map: Option<Vec<(usize, usize)>> = if serial {
                ma.iter().map(|&(s, t)| image(mb, t).map(|u| (s, u))).collect()
            } else {
                let nb = flat.substrate().components()[1].size();
                Some(
                    ma.iter()
                        .flat_map(|&(s1, t1)| mb.iter().map(move |&(s2, t2)| (s1 * nb + s2, t1 * nb + t2)))
                        .collect(),
                )
            };
            map.is_some_and(|m| validate_classical(flat, &m))
        }
        _ => {
            let (Some(ua), Some(ub)) = (unitary_of(a), unitary_of(b)) else {
                return false;
            };
            let u = if serial { &ub * &ua } else { kron_mat(&ua, &ub) };
            flat.inputs().iter().all(|x| {
                x.spanning_rays().iter().all(|r| {
                    let image = &u * r;
                    flat.outputs_for(x).iter().any(|y| y.contains_ray(&image))
                })
            })
        }
    }
}

fn check_vii(model: &Model, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let mut t = Tally::default();
    let per: Vec<(Substrate, Vec<(String, Task, Verdict)>)> = model
        .substrates()
        .iter()
        .map(|s| Ok((s.clone(), sample_tasks(model, s, cfg)?)))
        .collect::<KitResult<_>>()?;
    let mut networks: Vec<(String, Network, usize, usize, usize, usize, bool)> = Vec::new();
    for (si, (_, tasks)) in per.iter().enumerate() {
        for (i, (na, ta, _)) in tasks.iter().enumerate() {
            for (j, (nb, tb, _)) in tasks.iter().enumerate() {
                let mut n = Network::new();
                let a = n.add_node(na.clone(), ta.clone());
                let b = n.add_node(nb.clone(), tb.clone());
                for k in 0..ta.substrate().slot_sizes().len() {
                    n.connect((a, k), (b, k));
                }
                networks.push((format!("{na} then {nb}"), n, si, i, si, j, true));
            }
        }
    }
    for (si, (sa, ta)) in per.iter().enumerate() {
        for (sj, (sb, tb)) in per.iter().enumerate().skip(si + 1) {
            if sa.shares_leaf_with(sb).is_some() || sa.is_quantum() != sb.is_quantum() {
                continue;
            }
            for (i, (na, a, _)) in ta.iter().enumerate() {
                for (j, (nb, b, _)) in tb.iter().enumerate() {
                    let mut n = Network::new();
                    n.add_node(na.clone(), a.clone());
                    n.add_node(nb.clone(), b.clone());
                    networks.push((format!("{na} beside {nb}"), n, si, i, sj, j, false));
                }
            }
        }
    }
    let total = networks.len();
    let mut irregular = 0;
    for (name, net, si, i, sj, j, serial) in networks.into_iter().take(NETWORK_SAMPLE) {
        let flat = match validate_network(&net) {
            Ok(f) => f,
            Err(KitError::InterfaceMismatch(_)) => {
                irregular += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let (va, vb) = (&per[si].1[i].2, &per[sj].1[j].2);
        let composed = composed_witness_validates(&flat, va, vb, serial);
        let v = possible(&flat, cfg)?;
        let holds = if composed || v.is_possible() {
            Some(true)
        } else if v.is_impossible() {
            Some(false)
        } else {
            None
        };
        t.record(
            name,
            holds,
            vec![NamedVerdict::new("flattened network", v)],
            format!("composed witness validates: {composed}"),
            || flat.describe(),
        );
    }
    let scope = format!(
        "{} of {total} two-node networks of possible permutation and reset tasks; {irregular} not regular",
        total.min(NETWORK_SAMPLE)
    );
    Ok(t.finish(Principle::VII, scope, false))
}

/// The measurers of `x` the workbench can build: copy, demolition into
/// each attribute's region, and the copy measurer with relabelled pointers.
fn measurer_family(x: &Variable) -> KitResult<Vec<(String, MeasurementSpec)>> {
    let copy = MeasurementSpec::non_perturbing(x, "M")?;
    let mut out = vec![("copy".to_owned(), copy.clone())];
    for (k, y) in x.attributes().iter().enumerate() {
        out.push((format!("demolition into {}", x.label(k)), MeasurementSpec::demolition(x, "M", y)?));
    }
    let shift = Permutation::cyclic_shift(x.len());
    let ptrs = copy.pointers.attributes();
    let relabelled = Variable::new((0..x.len()).map(|k| ptrs[shift.apply(k)].clone()).collect())?
        .with_labels(x.labels())?;
    out.push((
        "copy, pointers relabelled".to_owned(),
        MeasurementSpec::new(x.clone(), copy.medium.clone(), copy.receptive.clone(), relabelled, copy.residuals.clone())?,
    ));
    Ok(out)
}

/// Whether measurer `m` leaves its pointer sharp on `a`, jointly with its
/// own behaviour on the measured variable.
fn sharp_output(m: &MeasurementSpec, a: &AttrRef, cfg: &OracleConfig) -> KitResult<(Option<bool>, Vec<Verdict>)> {
    let own = measurement_task(m)?;
    let full = Attribute::full(m.input.substrate()).into_ref();
    let rays = singletons(a)?;
    let mut verdicts = Vec::new();
    let mut undecided = false;
    'pointer: for (i, p) in m.pointers.attributes().iter().enumerate() {
        let mut pairs = own.pairs().to_vec();
        for r in &rays {
            if let Some(j) = m.input.attributes().iter().position(|x| r.is_subset_of(x)) {
                if j != i {
                    continue 'pointer;
                }
                continue;
            }
            pairs.push((
                Attribute::product(&[r.clone(), m.receptive.clone()])?.into_ref(),
                Attribute::product(&[full.clone(), p.clone()])?.into_ref(),
            ));
        }
        let v = possible_with_side_effects(&Task::new(pairs)?, cfg)?;
        match v.as_bool() {
            Some(true) => return Ok((Some(true), vec![v])),
            None => undecided = true,
            Some(false) => {}
        }
        verdicts.push(v);
    }
    Ok((if undecided { None } else { Some(false) }, verdicts))
}

fn check_viii(scope: &Scope, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let mut t = Tally::default();
    for (s, vars) in scope.variable_groups() {
        let attrs = scope.attributes_on(s);
        for x in vars.iter().filter(|v| v.len() >= 2) {
            let family = measurer_family(x)?;
            let measurable = possible_with_side_effects(&measurement_task(&family[0].1)?, cfg)?;
            if !measurable.is_possible() {
                t.vacuous();
                continue;
            }
            let closure = bar_bar(&x.union());
            for a in attrs {
                let sharp_in_x = x.attributes().iter().any(|xi| a.is_subset_of(xi));
                if a.is_empty() || sharp_in_x || !a.is_subset_of(&closure) {
                    continue;
                }
                let mut answers = Vec::new();
                let mut verdicts = Vec::new();
                for (name, m) in &family {
                    let (sharp, vs) = sharp_output(m, a, cfg)?;
                    answers.push(sharp);
                    verdicts.extend(vs.into_iter().map(|v| NamedVerdict::new(name.as_str(), v)));
                }
                let holds = if answers.contains(&None) {
                    None
                } else {
                    Some(answers.windows(2).all(|w| w[0] == w[1]))
                };
                let note = format!(
                    "sharp outputs: {}",
                    answers
                        .iter()
                        .map(|b| b.map_or("undecided".into(), |b| b.to_string()))
                        .collect::<Vec<_>>()
                        .join(", ")
                );
                t.record(
                    format!("measurers of {} on {}", x.describe(), a.describe()),
                    holds,
                    verdicts,
                    note,
                    || format!("X = {}, a = {}", x.describe(), a.describe()),
                );
            }
        }
    }
    let scope_note = format!("{}; measurers limited to the constructible copy, demolition and relabelled family", scope.note());
    Ok(t.finish(Principle::VIII, scope_note, scope.complete()))
}

fn check_ix(scope: &Scope, cfg: &OracleConfig) -> KitResult<PrincipleReport> {
    let mut t = Tally::default();
    for attrs in scope.attribute_groups() {
        for (i, x) in attrs.iter().enumerate() {
            for y in &attrs[i + 1..] {
                if x.is_empty() || y.is_empty() || !x.is_disjoint_from(y) {
                    continue;
                }
                let v = ensemble_distinguishable(x, y, cfg)?;
                t.record(
                    format!("{} vs {}", x.describe(), y.describe()),
                    kind_holds(&v, &[VerdictKind::Possible, VerdictKind::PossibleInLimit]),
                    vec![NamedVerdict::new("ensemble", v)],
                    String::new(),
                    || format!("x = {}, y = {}", x.describe(), y.describe()),
                );
            }
        }
    }
    Ok(t.finish(Principle::IX, scope.note(), scope.complete()))
}

/// Merges per-model reports of one principle.
fn merge(p: Principle, reports: Vec<PrincipleReport>, scope: String) -> PrincipleReport {
    let mut t = Tally::default();
    let mut complete = true;
    for r in reports {
        complete &= !matches!(r.status, Status::PartiallyChecked { .. }) || r.undecided > 0;
        let failure = match r.status {
            Status::Fails { counterexample } => Some(counterexample),
            _ => None,
        };
        t.absorb(Tally {
            instances: r.instances,
            vacuous: r.vacuous,
            undecided: r.undecided,
            evidence: r.evidence,
            failure,
        });
    }
    t.finish(p, scope, complete)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superinfo::tests::qubit_model;

    #[test]
    fn principle_names_parse() {
        assert_eq!("viii".parse::<Principle>().unwrap(), Principle::VIII);
        assert!(matches!("X".parse::<Principle>(), Err(KitError::UnknownName(_))));
    }

    #[test]
    fn qubit_model_satisfies_the_checkable_principles() {
        let m = qubit_model();
        let cfg = OracleConfig::default();
        for p in [Principle::II, Principle::IV, Principle::V, Principle::VIII, Principle::IX] {
            let r = check_principle(p, &m, &cfg).unwrap();
            assert_eq!(r.undecided, 0, "{p}: {r:?}");
            assert!(!r.fails(), "{p}: {r:?}");
            assert!(r.instances > r.vacuous, "{p} checked nothing");
        }
        assert!(matches!(check_principle(Principle::VI, &m, &cfg).unwrap().status, Status::Axiomatic));
    }

    #[test]
    fn non_sharp_attributes_are_never_read_sharply_on_a_qubit() {
        let r = check_principle(Principle::VIII, &qubit_model(), &OracleConfig::default()).unwrap();
        let checked: Vec<_> = r.evidence.iter().filter(|e| e.holds.is_some()).collect();
        assert!(!checked.is_empty());
        for e in checked {
            let answers = e.note.trim_start_matches("sharp outputs: ");
            assert!(answers.split(", ").all(|s| s == "false"), "{e:?}");
        }
    }

    #[test]
    fn networks_of_possible_tasks_flatten_to_possible_tasks() {
        let m = qubit_model();
        let r = check_principle(Principle::VII, &m, &OracleConfig::default()).unwrap();
        assert!(!r.fails());
        assert!(r.instances > 0);
        assert!(r.evidence.iter().all(|e| e.note.ends_with("true")), "{:?}", r.evidence);
    }

    #[test]
    fn information_variables_multiply() {
        let m = qubit_model();
        let r = check_principle(Principle::III, &m, &OracleConfig::default()).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.instances - r.vacuous >= 2);
    }

    #[test]
    fn a_failed_instance_becomes_a_counterexample() {
        let mut t = Tally::default();
        t.record("ok".into(), Some(true), Vec::new(), String::new(), String::new);
        t.record("bad".into(), Some(false), Vec::new(), String::new(), || "fragment".into());
        let r = t.finish(Principle::IV, String::new(), true);
        match r.status {
            Status::Fails { counterexample } => {
                assert_eq!(counterexample.operation, "bad");
                assert_eq!(counterexample.fragment, "fragment");
            }
            s => panic!("{s:?}"),
        }
    }
}
