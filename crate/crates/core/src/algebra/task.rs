use std::fmt;
use std::sync::Arc;

use crate::algebra::{AttrRef, Attribute, Permutation, Substrate, Variable};
use crate::error::{KitError, KitResult};

/// A finite set of input → output attribute pairs on one substrate.
///
/// An input may appear in several pairs; the constructor is then free to
/// deliver any of the listed outputs.
#[derive(Clone, Debug)]
pub struct Task {
    substrate: Substrate,
    pairs: Vec<(AttrRef, AttrRef)>,
    name: Option<String>,
}

impl Task {
    pub fn new(pairs: Vec<(AttrRef, AttrRef)>) -> KitResult<Self> {
        let substrate = pairs
            .first()
            .map(|(x, _)| x.substrate().clone())
            .ok_or_else(|| KitError::InvalidAttribute("a task needs at least one pair".into()))?;
        for (x, y) in &pairs {
            for a in [x, y] {
                if *a.substrate() != substrate {
                    return Err(KitError::DimensionMismatch(format!(
                        "`{a}` lives on `{}`, task acts on `{substrate}`",
                        a.substrate()
                    )));
                }
            }
        }
        let task = Task {
            substrate,
            pairs,
            name: None,
        };
        let inputs = task.inputs();
        for (i, a) in inputs.iter().enumerate() {
            for b in &inputs[i + 1..] {
                if !a.is_disjoint_from(b) {
                    return Err(KitError::OverlappingInputs(format!("`{a}` and `{b}`")));
                }
            }
        }
        Ok(task)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }

    pub fn pairs(&self) -> &[(AttrRef, AttrRef)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Legitimate inputs In(𝒜), without repetition.
    pub fn inputs(&self) -> Vec<AttrRef> {
        dedup(self.pairs.iter().map(|(x, _)| x.clone()))
    }

    /// Legitimate outputs Out(𝒜), without repetition.
    pub fn outputs(&self) -> Vec<AttrRef> {
        dedup(self.pairs.iter().map(|(_, y)| y.clone()))
    }

    /// Outputs listed for the input `x`.
    pub fn outputs_for(&self, x: &Attribute) -> Vec<AttrRef> {
        self.pairs
            .iter()
            .filter(|(a, _)| a.set_eq(x))
            .map(|(_, y)| y.clone())
            .collect()
    }

    pub fn describe(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|(x, y)| format!("{x}→{y}"))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

fn dedup(items: impl Iterator<Item = AttrRef>) -> Vec<AttrRef> {
    let mut out: Vec<AttrRef> = Vec::new();
    for a in items {
        if !out.iter().any(|b| b.set_eq(&a)) {
            out.push(a);
        }
    }
    out
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `{y_i → x_i}` for `{x_i → y_i}`.
pub fn transpose(task: &Task) -> KitResult<Task> {
    let pairs = task.pairs();
    for (i, (xa, ya)) in pairs.iter().enumerate() {
        for (xb, yb) in &pairs[i + 1..] {
            if !xa.set_eq(xb) && !ya.is_disjoint_from(yb) {
                return Err(KitError::OverlappingOutputs(format!("`{ya}` and `{yb}`")));
            }
        }
    }
    let flipped = pairs.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
    let mut t = Task::new(flipped)?;
    t.name = task.name.as_ref().map(|n| format!("{n}∼"));
    Ok(t)
}

/// `a ⊗ b` on the composite of the two (disjoint) substrates.
pub fn parallel_compose(a: &Task, b: &Task) -> KitResult<Task> {
    if let Some(shared) = a.substrate().shares_leaf_with(b.substrate()) {
        return Err(KitError::SharedSubstrate(shared));
    }
    let mut pairs = Vec::with_capacity(a.len() * b.len());
    for (x, y) in a.pairs() {
        for (z, w) in b.pairs() {
            let input = Arc::new(Attribute::product(&[x.clone(), z.clone()])?);
            let output = Arc::new(Attribute::product(&[y.clone(), w.clone()])?);
            pairs.push((input, output));
        }
    }
    Task::new(pairs)
}

/// `b a`: perform `a`, then `b`. Requires Out(a) = In(b).
pub fn serial_compose(b: &Task, a: &Task) -> KitResult<Task> {
    if a.substrate() != b.substrate() {
        return Err(KitError::InterfaceMismatch(format!(
            "`{}` feeds `{}`",
            a.substrate(),
            b.substrate()
        )));
    }
    let out_a = a.outputs();
    let in_b = b.inputs();
    let covers = |xs: &[AttrRef], ys: &[AttrRef]| xs.iter().all(|x| ys.iter().any(|y| y.set_eq(x)));
    if !covers(&out_a, &in_b) || !covers(&in_b, &out_a) {
        return Err(KitError::InterfaceMismatch(
            "outputs of the first task differ from inputs of the second".into(),
        ));
    }
    let mut pairs = Vec::new();
    for (x, y) in a.pairs() {
        for (y2, z) in b.pairs() {
            if y.set_eq(y2) {
                pairs.push((x.clone(), z.clone()));
            }
        }
    }
    Task::new(pairs)
}

/// The computation `C_Π = {x → Π(x)}` over the attributes of `v`.
pub fn permutation_task(v: &Variable, perm: &Permutation) -> KitResult<Task> {
    if perm.len() != v.len() {
        return Err(KitError::DimensionMismatch(format!(
            "permutation on {} points for a variable with {} attributes",
            perm.len(),
            v.len()
        )));
    }
    let attrs = v.attributes();
    let pairs = (0..v.len())
        .map(|i| (attrs[i].clone(), attrs[perm.apply(i)].clone()))
        .collect();
    Task::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit() -> (Substrate, AttrRef, AttrRef) {
        let s = Substrate::classical("b", 2).unwrap();
        let zero = Attribute::states(&s, [0]).unwrap().with_label("0").into_ref();
        let one = Attribute::states(&s, [1]).unwrap().with_label("1").into_ref();
        (s, zero, one)
    }

    fn same_pairs(a: &Task, b: &Task) -> bool {
        a.len() == b.len()
            && a.pairs().iter().all(|(x, y)| {
                b.pairs().iter().any(|(u, v)| x.set_eq(u) && y.set_eq(v))
            })
    }

    #[test]
    fn transpose_flips_pairs_and_is_an_involution() {
        let (_, zero, one) = bit();
        let t = Task::new(vec![(zero.clone(), one.clone())]).unwrap();
        let tt = transpose(&t).unwrap();
        assert!(tt.pairs()[0].0.set_eq(&one) && tt.pairs()[0].1.set_eq(&zero));
        assert!(same_pairs(&transpose(&tt).unwrap(), &t));
        let id = Task::new(vec![(zero.clone(), zero.clone())]).unwrap();
        assert!(same_pairs(&transpose(&id).unwrap(), &id));
    }

    #[test]
    fn transpose_rejects_merging_tasks() {
        let (_, zero, one) = bit();
        let reset = Task::new(vec![(zero.clone(), zero.clone()), (one, zero)]).unwrap();
        assert!(matches!(transpose(&reset), Err(KitError::OverlappingOutputs(_))));
    }

    #[test]
    fn parallel_composition_multiplies_pair_counts() {
        let (_, zero, one) = bit();
        let s2 = Substrate::classical("c", 3).unwrap();
        let a = Task::new(vec![(zero.clone(), one.clone()), (one.clone(), zero.clone())]).unwrap();
        let b = Task::new(
            (0..3)
                .map(|i| {
                    let x = Attribute::states(&s2, [i]).unwrap().into_ref();
                    (x.clone(), x)
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(parallel_compose(&a, &b).unwrap().len(), 6);
        assert!(matches!(parallel_compose(&a, &a), Err(KitError::SharedSubstrate(_))));

        let single = Task::new(vec![(zero.clone(), one.clone())]).unwrap();
        let c0 = Attribute::states(&s2, [0]).unwrap().into_ref();
        let ident = Task::new(vec![(c0.clone(), c0)]).unwrap();
        let p = parallel_compose(&single, &ident).unwrap();
        assert_eq!(p.pairs()[0].0.state_set().into_iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(p.pairs()[0].1.state_set().into_iter().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn serial_composition_chains_and_round_trips() {
        let s = Substrate::classical("t", 3).unwrap();
        let x = Attribute::states(&s, [0]).unwrap().into_ref();
        let y = Attribute::states(&s, [1]).unwrap().into_ref();
        let z = Attribute::states(&s, [2]).unwrap().into_ref();
        let a = Task::new(vec![(x.clone(), y.clone())]).unwrap();
        let b = Task::new(vec![(y.clone(), z.clone())]).unwrap();
        let ba = serial_compose(&b, &a).unwrap();
        assert!(ba.pairs()[0].0.set_eq(&x) && ba.pairs()[0].1.set_eq(&z));

        let back = serial_compose(&transpose(&a).unwrap(), &a).unwrap();
        assert!(back.pairs().iter().any(|(i, o)| i.set_eq(&x) && o.set_eq(&x)));

        assert!(matches!(serial_compose(&a, &a), Err(KitError::InterfaceMismatch(_))));
    }

    #[test]
    fn overlapping_inputs_rejected() {
        let s = Substrate::classical("t", 3).unwrap();
        let a = Attribute::states(&s, [0, 1]).unwrap().into_ref();
        let b = Attribute::states(&s, [1, 2]).unwrap().into_ref();
        assert!(matches!(
            Task::new(vec![(a.clone(), a), (b.clone(), b)]),
            Err(KitError::OverlappingInputs(_))
        ));
    }
}
