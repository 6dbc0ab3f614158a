use std::fmt;
use std::sync::Arc;

use crate::algebra::{AttrRef, Attribute, Substrate};
use crate::error::{KitError, KitResult};

/// A set of pairwise-disjoint attributes of one substrate, optionally with
/// an output label per attribute.
#[derive(Clone, Debug)]
pub struct Variable {
    substrate: Substrate,
    attributes: Vec<AttrRef>,
    labels: Option<Vec<String>>,
    name: Option<String>,
}

impl Variable {
    pub fn new(attributes: Vec<AttrRef>) -> KitResult<Self> {
        let first = attributes
            .first()
            .ok_or_else(|| KitError::InvalidAttribute("a variable needs at least one attribute".into()))?;
        let substrate = first.substrate().clone();
        if let Some(a) = attributes.iter().find(|a| *a.substrate() != substrate) {
            return Err(KitError::DimensionMismatch(format!(
                "attribute `{a}` is on `{}`, variable is on `{substrate}`",
                a.substrate()
            )));
        }
        for (i, a) in attributes.iter().enumerate() {
            for b in &attributes[i + 1..] {
                if !a.is_disjoint_from(b) {
                    return Err(KitError::NotDisjoint(format!("`{a}` and `{b}`")));
                }
            }
        }
        Ok(Variable {
            substrate,
            attributes,
            labels: None,
            name: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> KitResult<Self> {
        if labels.len() != self.attributes.len() {
            return Err(KitError::LabelMismatch(format!(
                "{} labels for {} attributes",
                labels.len(),
                self.attributes.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }

    pub fn attributes(&self) -> &[AttrRef] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The output label of attribute `i`: the declared label, else the
    /// attribute's own label, else its index.
    pub fn label(&self, i: usize) -> String {
        if let Some(ls) = &self.labels {
            return ls[i].clone();
        }
        self.attributes[i]
            .label()
            .map(str::to_owned)
            .unwrap_or_else(|| i.to_string())
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn describe(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            format!(
                "{{{}}}",
                self.attributes.iter().map(|a| a.describe()).collect::<Vec<_>>().join(", ")
            )
        })
    }

    /// The union χ of all attributes.
    pub fn union(&self) -> Attribute {
        Attribute::union(&self.substrate, &self.attributes).expect("attributes share the substrate")
    }

    pub fn position_of(&self, a: &Attribute) -> Option<usize> {
        self.attributes.iter().position(|b| b.set_eq(a))
    }

    /// Sub-variable with the attributes at `indices`.
    pub fn subset(&self, indices: &[usize]) -> KitResult<Variable> {
        let attrs = indices.iter().map(|&i| self.attributes[i].clone()).collect();
        let mut v = Variable::new(attrs)?;
        if let Some(ls) = &self.labels {
            v.labels = Some(indices.iter().map(|&i| ls[i].clone()).collect());
        }
        Ok(v)
    }

    /// The variable whose attributes are those of `self` followed by those
    /// of `other`; fails when the union is not pairwise disjoint.
    pub fn union_with(&self, other: &Variable) -> KitResult<Variable> {
        let mut attrs = self.attributes.clone();
        attrs.extend(other.attributes.iter().cloned());
        let v = Variable::new(attrs)?;
        let mut labels = self.labels();
        labels.extend(other.labels());
        v.with_labels(labels)
    }

    /// Index of the attribute containing a classical state, if any.
    pub fn sharp_state(&self, s: usize) -> Option<usize> {
        self.attributes.iter().position(|a| a.contains_state(s))
    }

    /// Index of the attribute containing a quantum state, if any.
    pub fn sharp_ray(&self, v: &crate::linalg::CVec) -> Option<usize> {
        self.attributes.iter().position(|a| a.contains_ray(v))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// A state of a substrate: a classical label or a unit vector.
#[derive(Clone, Debug)]
pub enum State {
    Classical(usize),
    Quantum(crate::linalg::CVec),
}

/// The index of the attribute of `v` in which `state` lies, if `v` is sharp.
pub fn is_sharp(state: &State, v: &Variable) -> Option<usize> {
    match state {
        State::Classical(s) => v.sharp_state(*s),
        State::Quantum(vec) => v.sharp_ray(vec),
    }
}

/// `s1 × s2`: all ordered pairs of attributes, on the composite substrate.
pub fn product_variable(s1: &Variable, s2: &Variable) -> KitResult<Variable> {
    if let Some(shared) = s1.substrate().shares_leaf_with(s2.substrate()) {
        return Err(KitError::SharedSubstrate(shared));
    }
    let mut attrs = Vec::with_capacity(s1.len() * s2.len());
    let mut labels = Vec::with_capacity(s1.len() * s2.len());
    for (i, a) in s1.attributes().iter().enumerate() {
        for (j, b) in s2.attributes().iter().enumerate() {
            attrs.push(Arc::new(Attribute::product(&[a.clone(), b.clone()])?));
            labels.push(format!("({},{})", s1.label(i), s2.label(j)));
        }
    }
    Variable::new(attrs)?.with_labels(labels)
}

/// Merges the attributes of `x` according to `groups`, a partition of its
/// attribute indices.
pub fn coarsen(x: &Variable, groups: &[Vec<usize>]) -> KitResult<Variable> {
    let mut seen = vec![false; x.len()];
    for g in groups {
        if g.is_empty() {
            return Err(KitError::BadPartition("empty group".into()));
        }
        for &i in g {
            if i >= x.len() {
                return Err(KitError::BadPartition(format!("index {i} out of range")));
            }
            if seen[i] {
                return Err(KitError::BadPartition(format!("index {i} appears twice")));
            }
            seen[i] = true;
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(KitError::BadPartition(format!("index {i} not covered")));
    }
    let mut attrs = Vec::with_capacity(groups.len());
    let mut labels = Vec::with_capacity(groups.len());
    for g in groups {
        if g.len() == 1 {
            attrs.push(x.attributes()[g[0]].clone());
            labels.push(x.label(g[0]));
        } else {
            let members: Vec<AttrRef> = g.iter().map(|&i| x.attributes()[i].clone()).collect();
            attrs.push(Arc::new(Attribute::union(x.substrate(), &members)?));
            labels.push(g.iter().map(|&i| x.label(i)).collect::<Vec<_>>().join("|"));
        }
    }
    Variable::new(attrs)?.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, c, CVec};

    fn z_basis(q: &Substrate) -> Variable {
        let a = Attribute::ray(q, basis_vector(2, 0)).unwrap().with_label("0").into_ref();
        let b = Attribute::ray(q, basis_vector(2, 1)).unwrap().with_label("1").into_ref();
        Variable::new(vec![a, b]).unwrap()
    }

    #[test]
    fn overlapping_attributes_are_rejected() {
        let s = Substrate::classical("s", 4).unwrap();
        let a = Attribute::states(&s, [0, 1]).unwrap().into_ref();
        let b = Attribute::states(&s, [1, 2]).unwrap().into_ref();
        assert!(matches!(Variable::new(vec![a, b]), Err(KitError::NotDisjoint(_))));
    }

    #[test]
    fn sharpness_examples() {
        let q = Substrate::quantum("q", 2).unwrap();
        let z = z_basis(&q);
        assert_eq!(is_sharp(&State::Quantum(basis_vector(2, 0)), &z), Some(0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVec::from_vec(vec![c(s, 0.0), c(s, 0.0)]);
        assert_eq!(is_sharp(&State::Quantum(plus), &z), None);

        let t = Substrate::classical("t", 5).unwrap();
        let v = Variable::new(vec![
            Attribute::states(&t, [1, 2]).unwrap().into_ref(),
            Attribute::states(&t, [3, 4]).unwrap().into_ref(),
        ])
        .unwrap();
        assert_eq!(is_sharp(&State::Classical(3), &v), Some(1));
        assert_eq!(is_sharp(&State::Classical(0), &v), None);
    }

    #[test]
    fn product_of_bits_has_four_attributes() {
        let a = Substrate::classical("a", 2).unwrap();
        let b = Substrate::classical("b", 2).unwrap();
        let bit = |s: &Substrate| {
            Variable::new(vec![
                Attribute::states(s, [0]).unwrap().into_ref(),
                Attribute::states(s, [1]).unwrap().into_ref(),
            ])
            .unwrap()
        };
        let p = product_variable(&bit(&a), &bit(&b)).unwrap();
        assert_eq!(p.len(), 4);
        assert!(matches!(
            product_variable(&bit(&a), &bit(&a)),
            Err(KitError::SharedSubstrate(_))
        ));
    }

    #[test]
    fn qubit_z_product_is_the_computational_basis() {
        let q1 = Substrate::quantum("q1", 2).unwrap();
        let q2 = Substrate::quantum("q2", 2).unwrap();
        let p = product_variable(&z_basis(&q1), &z_basis(&q2)).unwrap();
        assert_eq!(p.labels(), vec!["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        for (k, a) in p.attributes().iter().enumerate() {
            assert!(a.contains_ray(&basis_vector(4, k)));
        }
    }

    #[test]
    fn coarsening_partitions() {
        let s = Substrate::classical("s", 3).unwrap();
        let x = Variable::new(
            (0..3).map(|i| Attribute::states(&s, [i]).unwrap().into_ref()).collect(),
        )
        .unwrap();
        let same = coarsen(&x, &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(same.len(), 3);
        let xp = coarsen(&x, &[vec![0], vec![1, 2]]).unwrap();
        assert_eq!(xp.attributes()[1].state_set().len(), 2);
        let all = coarsen(&x, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(all.len(), 1);
        assert!(matches!(coarsen(&x, &[vec![0], vec![1]]), Err(KitError::BadPartition(_))));
        assert!(matches!(
            coarsen(&x, &[vec![0, 1], vec![1, 2]]),
            Err(KitError::BadPartition(_))
        ));
    }
}
