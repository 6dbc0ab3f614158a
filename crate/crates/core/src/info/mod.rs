//! Distinguishability, the bar operation, computation and information
//! variables, and measurement.

mod computation;
mod measure;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::algebra::{AttrRef, Attribute, Substrate, Task, Variable};
use crate::error::{KitError, KitResult};
use crate::linalg::{basis_vector, orth_complement, TAU_RANK};
use crate::oracle::{possible_with_side_effects, OracleConfig, Verdict};

pub use computation::{
    cloning_task, info_capacity, is_clonable, is_computation_variable, is_information_variable,
};
pub use measure::{is_measurer_of, is_non_perturbing, measurement_task, MeasurementSpec};

/// A three-valued answer together with the verdict that settled it.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub value: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub note: String,
}

impl Outcome {
    pub fn new(value: Option<bool>, verdict: Option<Verdict>, note: impl Into<String>) -> Self {
        Outcome {
            value,
            verdict,
            note: note.into(),
        }
    }

    pub fn from_verdict(v: Verdict, note: impl Into<String>) -> Self {
        Outcome::new(v.as_bool(), Some(v), note)
    }

    pub fn is_true(&self) -> bool {
        self.value == Some(true)
    }

    pub fn is_false(&self) -> bool {
        self.value == Some(false)
    }
}

/// A fresh pointer medium with `n` perfectly distinguishable states.
pub fn pointer_medium(name: &str, n: usize, quantum: bool) -> KitResult<Substrate> {
    if quantum {
        Substrate::quantum(name, n.max(2))
    } else {
        Substrate::classical(name, n.max(2))
    }
}

/// The `k`-th pointer state of a medium: a basis ray or classical label.
pub fn pointer(medium: &Substrate, k: usize) -> KitResult<AttrRef> {
    let a = if medium.is_quantum() {
        Attribute::ray(medium, basis_vector(medium.size(), k))?
    } else {
        Attribute::states(medium, [k])?
    };
    Ok(a.into_ref())
}

/// The task sending each attribute of `v` onto a distinct pointer state,
/// on the substrate itself when it has room and on `S ⊕ P` otherwise.
pub fn distinguishing_task(v: &Variable) -> KitResult<Task> {
    let s = v.substrate();
    if v.len() <= s.size() {
        let pairs = v
            .attributes()
            .iter()
            .enumerate()
            .map(|(i, x)| Ok((x.clone(), pointer(s, i)?)))
            .collect::<KitResult<Vec<_>>>()?;
        return Task::new(pairs);
    }
    let p = pointer_medium("P", v.len(), s.is_quantum())?.renamed(&format!("[{}]", s.name()));
    let x0 = pointer(&p, 0)?;
    let s0 = pointer(s, 0)?;
    let pairs = v
        .attributes()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            Ok((
                Attribute::product(&[x.clone(), x0.clone()])?.into_ref(),
                Attribute::product(&[s0.clone(), pointer(&p, i)?])?.into_ref(),
            ))
        })
        .collect::<KitResult<Vec<_>>>()?;
    Task::new(pairs)
}

pub fn distinguish(v: &Variable, cfg: &OracleConfig) -> KitResult<Verdict> {
    possible_with_side_effects(&distinguishing_task(v)?, cfg)
}

/// `x ⊥ y`. Attributes sharing a state are never distinguishable.
pub fn perp(x: &AttrRef, y: &AttrRef, cfg: &OracleConfig) -> KitResult<Option<bool>> {
    if x.substrate() != y.substrate() || !x.is_disjoint_from(y) || x.is_empty() && y.is_empty() {
        return Ok(Some(false));
    }
    Ok(distinguish(&Variable::new(vec![x.clone(), y.clone()])?, cfg)?.as_bool())
}

/// Memoised, symmetric `⊥` over attribute references.
#[derive(Default)]
pub struct PerpRelation {
    cache: Mutex<HashMap<(usize, usize), Option<bool>>>,
    keep: Mutex<Vec<AttrRef>>,
}

impl PerpRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &AttrRef, y: &AttrRef, cfg: &OracleConfig) -> KitResult<Option<bool>> {
        let (a, b) = (Arc::as_ptr(x) as usize, Arc::as_ptr(y) as usize);
        let key = (a.min(b), a.max(b));
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = perp(x, y, cfg)?;
        self.cache.lock().unwrap().insert(key, v);
        // Holding the references keeps the pointer keys from being reused.
        self.keep.lock().unwrap().extend([x.clone(), y.clone()]);
        Ok(v)
    }
}

/// `x̄`: every state distinguishable from `x`.
pub fn bar(x: &Attribute) -> Attribute {
    let s = x.substrate();
    if s.is_quantum() {
        let comp = orth_complement(&x.span_basis(), s.size());
        if comp.is_empty() {
            Attribute::empty(s)
        } else {
            Attribute::subspace(s, comp).expect("orthocomplement basis")
        }
    } else {
        let set = x.state_set();
        Attribute::states(s, (0..s.size()).filter(|k| !set.contains(k))).expect("complement states")
    }
}

/// `x̿`: classically `x` itself, quantumly every ray in the span of `x`.
pub fn bar_bar(x: &Attribute) -> Attribute {
    let s = x.substrate();
    if s.is_quantum() {
        let basis = x.span_basis();
        if basis.is_empty() {
            Attribute::empty(s)
        } else {
            Attribute::subspace(s, basis).expect("span basis")
        }
    } else {
        Attribute::states(s, x.state_set()).expect("same states")
    }
}

/// `{x, x̄}`.
pub fn boolean_variable(x: &AttrRef) -> KitResult<Variable> {
    if x.is_empty() {
        return Err(KitError::PreconditionFailed("Boolean variable of the empty attribute".into()));
    }
    let b = bar(x).into_ref();
    Variable::new(vec![x.clone(), b])
}

pub fn is_maximal(v: &Variable) -> bool {
    bar(&v.union()).is_empty()
}

/// Every attribute equals its `x̿`.
pub fn is_observable(v: &Variable) -> bool {
    v.attributes().iter().all(|a| a.set_eq(&bar_bar(a)))
}

/// Subspace equality of two quantum attributes' spans, or set equality.
pub fn same_closure(a: &Attribute, b: &Attribute) -> bool {
    if a.substrate().is_quantum() {
        let (pa, pb) = (a.span_basis(), b.span_basis());
        pa.len() == pb.len() && pa.iter().all(|v| crate::linalg::projection_norm(v, &pb) >= 1.0 - TAU_RANK.sqrt())
    } else {
        a.state_set() == b.state_set()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CVec};

    fn qubit() -> Substrate {
        Substrate::quantum("q", 2).unwrap()
    }

    fn ray(s: &Substrate, v: CVec) -> AttrRef {
        Attribute::ray(s, v).unwrap().into_ref()
    }

    fn plus() -> CVec {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CVec::from_vec(vec![c(h, 0.0), c(h, 0.0)])
    }

    #[test]
    fn orthogonal_pair_is_distinguishable_and_overlapping_is_not() {
        let q = qubit();
        let cfg = OracleConfig::default();
        let (z0, z1, p) = (ray(&q, basis_vector(2, 0)), ray(&q, basis_vector(2, 1)), ray(&q, plus()));
        assert_eq!(perp(&z0, &z1, &cfg).unwrap(), Some(true));
        assert_eq!(perp(&z0, &p, &cfg).unwrap(), Some(false));
        assert_eq!(perp(&z0, &z0, &cfg).unwrap(), Some(false));
    }

    #[test]
    fn classical_triple_is_distinguishable() {
        let s = Substrate::classical("t", 3).unwrap();
        let v = Variable::new((0..3).map(|k| Attribute::states(&s, [k]).unwrap().into_ref()).collect()).unwrap();
        assert!(distinguish(&v, &OracleConfig::default()).unwrap().is_possible());
    }

    #[test]
    fn more_attributes_than_states_use_a_pointer_medium() {
        let s = Substrate::classical("b", 2).unwrap();
        let q = Substrate::classical("c", 2).unwrap();
        let bb = Substrate::composite(&[s.clone(), q.clone()]).unwrap();
        let attrs: Vec<AttrRef> = (0..4).map(|k| Attribute::states(&bb, [k]).unwrap().into_ref()).collect();
        let v = Variable::new(attrs[..3].to_vec()).unwrap();
        assert!(distinguish(&v, &OracleConfig::default()).unwrap().is_possible());
        let one = Substrate::classical("u", 1).unwrap();
        let single = Variable::new(vec![Attribute::states(&one, [0]).unwrap().into_ref()]).unwrap();
        assert!(distinguish(&single, &OracleConfig::default()).unwrap().is_possible());
    }

    #[test]
    fn bar_laws_on_a_qutrit() {
        let q = Substrate::quantum("r", 3).unwrap();
        let x = Attribute::rays(&q, vec![basis_vector(3, 0), basis_vector(3, 1)]).unwrap();
        let bb = bar_bar(&x);
        assert!(x.is_subset_of(&bb));
        assert!(!bb.is_subset_of(&x));
        assert!(same_closure(&bar(&bb), &bar(&x)));
        assert_eq!(bar(&x).span_basis().len(), 1);
    }

    #[test]
    fn classical_bar_is_complement() {
        let s = Substrate::classical("f", 4).unwrap();
        let x = Attribute::states(&s, [0, 1]).unwrap();
        assert_eq!(bar(&x).state_set().into_iter().collect::<Vec<_>>(), vec![2, 3]);
        assert!(bar_bar(&x).set_eq(&x));
    }

    #[test]
    fn boolean_variables_are_maximal_and_distinguishable() {
        let q = qubit();
        let v = boolean_variable(&ray(&q, plus())).unwrap();
        assert!(is_maximal(&v));
        assert!(distinguish(&v, &OracleConfig::default()).unwrap().is_possible());
        let full = Attribute::full(&q).into_ref();
        let w = boolean_variable(&full).unwrap();
        assert!(w.attributes()[1].is_empty());
        assert!(distinguish(&w, &OracleConfig::default()).unwrap().is_possible());
    }

    #[test]
    fn observables() {
        let q = Substrate::quantum("r", 3).unwrap();
        let z = Variable::new(
            (0..3)
                .map(|k| Attribute::subspace(&q, vec![basis_vector(3, k)]).unwrap().into_ref())
                .collect(),
        )
        .unwrap();
        assert!(is_observable(&z));
        let rays = Attribute::rays(&q, vec![basis_vector(3, 0), basis_vector(3, 1)]).unwrap().into_ref();
        assert!(!is_observable(&Variable::new(vec![rays]).unwrap()));
    }

    #[test]
    fn perp_cache_is_symmetric() {
        let q = qubit();
        let cfg = OracleConfig::default();
        let rel = PerpRelation::new();
        let (a, b) = (ray(&q, basis_vector(2, 0)), ray(&q, plus()));
        assert_eq!(rel.get(&a, &b, &cfg).unwrap(), rel.get(&b, &a, &cfg).unwrap());
    }
}
