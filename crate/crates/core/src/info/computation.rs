use crate::algebra::{permutation_task, AttrRef, Attribute, Permutation, Substrate, Task, Variable};
use crate::error::{KitError, KitResult};
use crate::info::{pointer, Outcome};
use crate::model::Model;
use crate::oracle::{possible_with_side_effects, OracleConfig, Verdict};

/// `𝔎_S(x₀) = ∪_x {(x, x₀) → (x, x)}` on `S ⊕ S′`, where `S′` is a copy
/// of `S` and `x₀` must be one of `preparables`.
pub fn cloning_task(s_var: &Variable, x0: &AttrRef, preparables: &[AttrRef]) -> KitResult<Task> {
    if !preparables.iter().any(|p| p.substrate().same_shape(x0.substrate()) && p.set_eq(x0)) {
        return Err(KitError::NotPreparable(x0.describe()));
    }
    let s = s_var.substrate();
    let copy = s.renamed("′");
    let x0 = x0.rebase(&copy)?.into_ref();
    let pairs = s_var
        .attributes()
        .iter()
        .map(|x| {
            let xc = x.rebase(&copy)?.into_ref();
            Ok((
                Attribute::product(&[x.clone(), x0.clone()])?.into_ref(),
                Attribute::product(&[x.clone(), xc])?.into_ref(),
            ))
        })
        .collect::<KitResult<Vec<_>>>()?;
    Task::new(pairs)
}

/// Clonable for some declared preparable receptive state.
pub fn is_clonable(s_var: &Variable, model: &Model, cfg: &OracleConfig) -> KitResult<Outcome> {
    let preparables = model.preparables(s_var.substrate());
    let mut first_impossible: Option<Verdict> = None;
    let mut unknown = false;
    for x0 in &preparables {
        let v = possible_with_side_effects(&cloning_task(s_var, x0, &preparables)?, cfg)?;
        match v.as_bool() {
            Some(true) => return Ok(Outcome::from_verdict(v, format!("receptive state {}", x0.describe()))),
            Some(false) => {
                first_impossible.get_or_insert(v);
            }
            None => unknown = true,
        }
    }
    if unknown {
        return Ok(Outcome::new(None, None, "cloning undecided for some receptive state"));
    }
    Ok(Outcome::new(
        Some(false),
        first_impossible,
        format!("impossible for all {} receptive states", preparables.len()),
    ))
}

/// Largest variable size for which every permutation is checked directly;
/// beyond it only the generating transpositions are, since the Gram
/// condition is preserved under composition.
const FULL_PERMUTATION_LIMIT: usize = 6;

pub fn is_computation_variable(s_var: &Variable, cfg: &OracleConfig) -> KitResult<Outcome> {
    let n = s_var.len();
    if n < 2 {
        return Err(KitError::TooFewAttributes(n));
    }
    let (perms, scope) = if n <= FULL_PERMUTATION_LIMIT {
        (Permutation::all(n), "all permutations")
    } else {
        (Permutation::generators(n), "generating transpositions")
    };
    let mut unknown = 0;
    let mut checked = 0;
    for p in perms.iter().filter(|p| !p.is_identity()) {
        let v = possible_with_side_effects(&permutation_task(s_var, p)?, cfg)?;
        checked += 1;
        match v.as_bool() {
            Some(false) => {
                return Ok(Outcome::from_verdict(v, format!("permutation {:?} impossible", p.as_slice())));
            }
            None => unknown += 1,
            Some(true) => {}
        }
    }
    if unknown > 0 {
        Ok(Outcome::new(None, None, format!("{unknown} of {checked} permutations undecided")))
    } else {
        Ok(Outcome::new(Some(true), None, format!("{checked} non-trivial permutations possible ({scope})")))
    }
}

/// A clonable computation variable.
pub fn is_information_variable(s_var: &Variable, model: &Model, cfg: &OracleConfig) -> KitResult<Outcome> {
    let comp = is_computation_variable(s_var, cfg)?;
    if comp.is_false() {
        return Ok(Outcome::new(Some(false), comp.verdict, format!("not a computation variable: {}", comp.note)));
    }
    let clone = is_clonable(s_var, model, cfg)?;
    if clone.is_false() {
        return Ok(Outcome::new(Some(false), clone.verdict, format!("not clonable: {}", clone.note)));
    }
    match (comp.value, clone.value) {
        (Some(true), Some(true)) => Ok(Outcome::new(Some(true), clone.verdict, comp.note)),
        _ => Ok(Outcome::new(None, None, "undecided")),
    }
}

/// `log₂` of the largest information variable found. Classical substrates
/// use the singleton partition (no variable of nonempty disjoint sets is
/// larger); quantum ones use the declared variables plus the
/// computational basis.
pub fn info_capacity(s: &Substrate, model: &Model, cfg: &OracleConfig) -> KitResult<f64> {
    let mut candidates: Vec<Variable> = Vec::new();
    let basis = Variable::new((0..s.size()).map(|k| pointer(s, k)).collect::<KitResult<Vec<_>>>()?)?;
    candidates.push(basis);
    if s.is_quantum() {
        candidates.extend(model.variables_on(s).into_iter().cloned());
    }
    candidates.sort_by_key(|v| std::cmp::Reverse(v.len()));
    for v in candidates {
        if v.len() < 2 {
            continue;
        }
        if is_information_variable(&v, model, cfg)?.is_true() {
            return Ok((v.len() as f64).log2());
        }
    }
    Ok(0.0)
}
