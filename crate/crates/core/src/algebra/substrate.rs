use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{KitError, KitResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubstrateKind {
    Classical { states: usize },
    Quantum { dimension: usize },
}

impl SubstrateKind {
    pub fn is_quantum(&self) -> bool {
        matches!(self, SubstrateKind::Quantum { .. })
    }

    pub fn size(&self) -> usize {
        match *self {
            SubstrateKind::Classical { states } => states,
            SubstrateKind::Quantum { dimension } => dimension,
        }
    }
}

/// A physical system. Composite substrates carry their ordered components;
/// the state space is the Cartesian (classical) or tensor (quantum) product.
///
/// Equality of composites is structural: two composites with the same
/// ordered components are the same substrate whatever they are called.
#[derive(Clone, Debug)]
pub struct Substrate {
    name: String,
    kind: SubstrateKind,
    components: Vec<Substrate>,
}

impl Substrate {
    pub fn classical(name: impl Into<String>, states: usize) -> KitResult<Self> {
        if states == 0 {
            return Err(KitError::DimensionMismatch(
                "a classical substrate needs at least one state".into(),
            ));
        }
        Ok(Substrate {
            name: name.into(),
            kind: SubstrateKind::Classical { states },
            components: Vec::new(),
        })
    }

    pub fn quantum(name: impl Into<String>, dimension: usize) -> KitResult<Self> {
        if dimension < 2 {
            return Err(KitError::DimensionMismatch(format!(
                "quantum dimension must be at least 2, got {dimension}"
            )));
        }
        Ok(Substrate {
            name: name.into(),
            kind: SubstrateKind::Quantum { dimension },
            components: Vec::new(),
        })
    }

    /// The composite `S1 ⊕ S2 ⊕ ...` of substrates of one kind.
    pub fn composite(components: &[Substrate]) -> KitResult<Self> {
        let name = components
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join("⊕");
        Self::composite_named(name, components)
    }

    pub fn composite_named(name: impl Into<String>, components: &[Substrate]) -> KitResult<Self> {
        if components.len() < 2 {
            return Err(KitError::DimensionMismatch(
                "a composite needs at least two components".into(),
            ));
        }
        let quantum = components[0].kind.is_quantum();
        if components.iter().any(|c| c.kind.is_quantum() != quantum) {
            return Err(KitError::KindMismatch(
                "cannot compose classical and quantum substrates".into(),
            ));
        }
        let size: usize = components.iter().map(|c| c.kind.size()).product();
        let kind = if quantum {
            SubstrateKind::Quantum { dimension: size }
        } else {
            SubstrateKind::Classical { states: size }
        };
        let sub = Substrate {
            name: name.into(),
            kind,
            components: components.to_vec(),
        };
        let leaves = sub.leaves();
        for (i, a) in leaves.iter().enumerate() {
            if leaves[i + 1..].iter().any(|b| b.name == a.name) {
                return Err(KitError::SharedSubstrate(a.name.clone()));
            }
        }
        Ok(sub)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SubstrateKind {
        self.kind
    }

    pub fn is_quantum(&self) -> bool {
        self.kind.is_quantum()
    }

    /// Number of classical states, or Hilbert-space dimension.
    pub fn size(&self) -> usize {
        self.kind.size()
    }

    pub fn components(&self) -> &[Substrate] {
        &self.components
    }

    pub fn is_composite(&self) -> bool {
        !self.components.is_empty()
    }

    /// Elementary substrates in order.
    pub fn leaves(&self) -> Vec<&Substrate> {
        if self.components.is_empty() {
            vec![self]
        } else {
            self.components.iter().flat_map(|c| c.leaves()).collect()
        }
    }

    pub fn shares_leaf_with(&self, other: &Substrate) -> Option<String> {
        let mine = self.leaves();
        other
            .leaves()
            .into_iter()
            .find(|b| mine.iter().any(|a| a.name == b.name))
            .map(|b| b.name.clone())
    }

    /// A structurally identical copy with every leaf renamed by `suffix`.
    pub fn renamed(&self, suffix: &str) -> Substrate {
        Substrate {
            name: format!("{}{suffix}", self.name),
            kind: self.kind,
            components: self.components.iter().map(|c| c.renamed(suffix)).collect(),
        }
    }

    /// Same kind, size and component structure.
    pub fn same_shape(&self, other: &Substrate) -> bool {
        self.kind == other.kind
            && self.components.len() == other.components.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| a.same_shape(b))
    }

    /// Slot sizes of a composite (a one-element list for elementary ones).
    pub fn slot_sizes(&self) -> Vec<usize> {
        if self.components.is_empty() {
            vec![self.size()]
        } else {
            self.components.iter().map(|c| c.size()).collect()
        }
    }
}

impl PartialEq for Substrate {
    fn eq(&self, other: &Self) -> bool {
        match (self.components.is_empty(), other.components.is_empty()) {
            (true, true) => self.name == other.name && self.kind == other.kind,
            (false, false) => self.components == other.components,
            _ => false,
        }
    }
}

impl Eq for Substrate {}

impl Hash for Substrate {
    fn hash<H: Hasher>(&self, state: &mut H) {
        if self.components.is_empty() {
            self.name.hash(state);
            self.kind.hash(state);
        } else {
            self.components.hash(state);
        }
    }
}

impl fmt::Display for Substrate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_size_is_product() {
        let a = Substrate::quantum("a", 2).unwrap();
        let b = Substrate::quantum("b", 3).unwrap();
        let ab = Substrate::composite(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(ab.size(), 6);
        assert_eq!(ab.name(), "a⊕b");
        assert_eq!(ab, Substrate::composite_named("S", &[a, b]).unwrap());
    }

    #[test]
    fn composites_reject_repeated_leaves_and_mixed_kinds() {
        let a = Substrate::quantum("a", 2).unwrap();
        assert!(matches!(
            Substrate::composite(&[a.clone(), a.clone()]),
            Err(KitError::SharedSubstrate(_))
        ));
        let c = Substrate::classical("c", 2).unwrap();
        assert!(matches!(
            Substrate::composite(&[a, c]),
            Err(KitError::KindMismatch(_))
        ));
    }

    #[test]
    fn quantum_dimension_at_least_two() {
        assert!(Substrate::quantum("q", 1).is_err());
    }
}
