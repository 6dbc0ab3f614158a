use crate::algebra::{AttrRef, Attribute, Substrate, Variable};
use crate::error::KitResult;
use crate::model::Model;
use crate::superinfo::classical_variables;

/// Classical substrates up to this size are enumerated exhaustively.
const MAX_ENUMERATED_STATES: usize = 5;
/// Declared attributes per quantum substrate combined into variables.
const MAX_COMBINED_ATTRIBUTES: usize = 12;

/// The attributes and variables a principle is checked over, per substrate.
#[derive(Clone, Debug)]
pub struct Scope {
    groups: Vec<(Substrate, Vec<Variable>, Vec<AttrRef>)>,
    complete: bool,
    note: String,
}

impl Scope {
    pub fn of_model(model: &Model) -> KitResult<Self> {
        let mut groups = Vec::new();
        let mut complete = true;
        for s in model.substrates() {
            let (vars, vars_complete) = variable_scope(model, s)?;
            let (attrs, attrs_complete) = attribute_scope(model, s)?;
            complete &= vars_complete && attrs_complete;
            groups.push((s.clone(), vars, attrs));
        }
        let note = if complete {
            "every declared attribute and variable; all state sets of small classical substrates".into()
        } else {
            "declared attributes and variables only where enumeration was too large".into()
        };
        Ok(Scope { groups, complete, note })
    }

    /// Every variable and every nonempty attribute of a classical substrate.
    pub fn classical(s: &Substrate) -> KitResult<Self> {
        Ok(Scope {
            groups: vec![(s.clone(), classical_variables(s)?, all_state_sets(s)?)],
            complete: true,
            note: format!("exhaustive over {} states", s.size()),
        })
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.groups.iter().flat_map(|g| g.1.iter())
    }

    pub fn variable_count(&self) -> usize {
        self.groups.iter().map(|g| g.1.len()).sum()
    }

    pub fn variable_groups(&self) -> impl Iterator<Item = (&Substrate, &[Variable])> {
        self.groups.iter().map(|g| (&g.0, g.1.as_slice()))
    }

    pub fn attribute_groups(&self) -> impl Iterator<Item = &[AttrRef]> {
        self.groups.iter().map(|g| g.2.as_slice())
    }

    pub fn attributes_on(&self, s: &Substrate) -> &[AttrRef] {
        self.groups.iter().find(|g| g.0 == *s).map_or(&[], |g| g.2.as_slice())
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn note(&self) -> String {
        self.note.clone()
    }
}

fn all_state_sets(s: &Substrate) -> KitResult<Vec<AttrRef>> {
    let n = s.size();
    (1u32..1 << n)
        .map(|mask| Attribute::states(s, (0..n).filter(|k| mask & (1 << k) != 0)).map(|a| a.into_ref()))
        .collect()
}

fn push_new(out: &mut Vec<AttrRef>, a: AttrRef) {
    if !a.is_empty() && !out.iter().any(|b| b.set_eq(&a)) {
        out.push(a);
    }
}

/// Attributes on `s`: the declared ones, and every state set when `s` is
/// a small classical substrate. The flag is false when enumeration was cut.
pub fn attribute_scope(model: &Model, s: &Substrate) -> KitResult<(Vec<AttrRef>, bool)> {
    let mut out = Vec::new();
    for na in model.attributes().iter().filter(|a| a.attribute.substrate() == s) {
        push_new(&mut out, na.attribute.clone());
    }
    for v in model.variables_on(s) {
        for a in v.attributes() {
            push_new(&mut out, a.clone());
        }
    }
    if s.is_quantum() {
        return Ok((out, true));
    }
    if s.size() > MAX_ENUMERATED_STATES {
        return Ok((out, false));
    }
    for a in all_state_sets(s)? {
        push_new(&mut out, a);
    }
    Ok((out, true))
}

/// Variables on `s`: the declared ones, every variable of a small
/// classical substrate, and on quantum substrates every set of at least
/// two pairwise disjoint declared attributes.
pub fn variable_scope(model: &Model, s: &Substrate) -> KitResult<(Vec<Variable>, bool)> {
    let mut out: Vec<Variable> = model.variables_on(s).into_iter().cloned().collect();
    if !s.is_quantum() {
        if s.size() > MAX_ENUMERATED_STATES {
            return Ok((out, false));
        }
        out.extend(classical_variables(s)?);
        return Ok((out, true));
    }
    let (attrs, _) = attribute_scope(model, s)?;
    if attrs.len() > MAX_COMBINED_ATTRIBUTES {
        return Ok((out, false));
    }
    for mask in 1u32..1 << attrs.len() {
        if mask.count_ones() < 2 {
            continue;
        }
        let chosen: Vec<AttrRef> = (0..attrs.len())
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| attrs[k].clone())
            .collect();
        let disjoint = chosen
            .iter()
            .enumerate()
            .all(|(i, a)| chosen[i + 1..].iter().all(|b| a.is_disjoint_from(b)));
        if disjoint {
            out.push(Variable::new(chosen)?);
        }
    }
    Ok((out, true))
}
