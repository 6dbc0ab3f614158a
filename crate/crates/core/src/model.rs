//! A named collection of substrates, attributes and variables together
//! with the oracle configuration used to reason about them.

use crate::algebra::{AttrRef, Attribute, Substrate, Variable};
use crate::error::{KitError, KitResult};
use crate::linalg::basis_vector;
use crate::oracle::OracleConfig;

#[derive(Clone, Debug)]
pub struct NamedAttribute {
    pub name: String,
    pub attribute: AttrRef,
    /// Preparable from generic resources.
    pub preparable: bool,
    /// Marks a generic, naturally occurring resource.
    pub generic: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Model {
    pub config: OracleConfig,
    substrates: Vec<Substrate>,
    attributes: Vec<NamedAttribute>,
    variables: Vec<(String, Variable)>,
}

impl Model {
    pub fn new(config: OracleConfig) -> Self {
        Model {
            config,
            ..Model::default()
        }
    }

    pub fn add_substrate(&mut self, s: Substrate) -> KitResult<()> {
        if self.substrates.iter().any(|t| t.name() == s.name()) {
            return Err(KitError::Duplicate(s.name().to_owned()));
        }
        self.substrates.push(s);
        Ok(())
    }

    pub fn add_attribute(
        &mut self,
        name: impl Into<String>,
        attribute: AttrRef,
        preparable: bool,
        generic: bool,
    ) -> KitResult<()> {
        let name = name.into();
        if self.attributes.iter().any(|a| a.name == name) {
            return Err(KitError::Duplicate(name));
        }
        self.attributes.push(NamedAttribute {
            name,
            attribute,
            preparable,
            generic,
        });
        Ok(())
    }

    pub fn add_variable(&mut self, name: impl Into<String>, v: Variable) -> KitResult<()> {
        let name = name.into();
        if self.variables.iter().any(|(n, _)| *n == name) {
            return Err(KitError::Duplicate(name));
        }
        let v = v.with_name(name.clone());
        self.variables.push((name, v));
        Ok(())
    }

    pub fn substrates(&self) -> &[Substrate] {
        &self.substrates
    }

    pub fn attributes(&self) -> &[NamedAttribute] {
        &self.attributes
    }

    pub fn variables(&self) -> &[(String, Variable)] {
        &self.variables
    }

    pub fn substrate(&self, name: &str) -> KitResult<&Substrate> {
        self.substrates
            .iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| KitError::UnknownName(name.to_owned()))
    }

    pub fn attribute(&self, name: &str) -> KitResult<&AttrRef> {
        self.attributes
            .iter()
            .find(|a| a.name == name)
            .map(|a| &a.attribute)
            .ok_or_else(|| KitError::UnknownName(name.to_owned()))
    }

    pub fn variable(&self, name: &str) -> KitResult<&Variable> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| KitError::UnknownName(name.to_owned()))
    }

    pub fn variables_on(&self, s: &Substrate) -> Vec<&Variable> {
        self.variables
            .iter()
            .filter(|(_, v)| v.substrate() == s)
            .map(|(_, v)| v)
            .collect()
    }

    /// Attributes declared preparable on a substrate of the same shape as
    /// `s`, moved onto `s`. Composites also get every product of their
    /// components' preparables. With nothing declared, the first basis
    /// state is taken as the receptive state.
    pub fn preparables(&self, s: &Substrate) -> Vec<AttrRef> {
        let mut out: Vec<AttrRef> = Vec::new();
        let mut push = |a: AttrRef| {
            if !out.iter().any(|b| b.set_eq(&a)) {
                out.push(a);
            }
        };
        for na in self.attributes.iter().filter(|a| a.preparable) {
            if let Ok(a) = na.attribute.rebase(s) {
                if !a.is_empty() {
                    push(a.into_ref());
                }
            }
        }
        if s.is_composite() {
            let per: Vec<Vec<AttrRef>> = s.components().iter().map(|c| self.preparables(c)).collect();
            let mut combos: Vec<Vec<AttrRef>> = vec![Vec::new()];
            for options in &per {
                combos = combos
                    .iter()
                    .flat_map(|c| {
                        options.iter().map(move |o| {
                            let mut c = c.clone();
                            c.push(o.clone());
                            c
                        })
                    })
                    .collect();
            }
            for c in combos {
                if let Ok(a) = Attribute::product_on(s, &c) {
                    push(a.into_ref());
                }
            }
        }
        if out.is_empty() {
            out.push(default_receptive(s));
        }
        out
    }
}

/// The first basis state (classical state 0) of `s`.
pub fn default_receptive(s: &Substrate) -> AttrRef {
    let a = if s.is_quantum() {
        Attribute::ray(s, basis_vector(s.size(), 0))
    } else {
        Attribute::states(s, [0])
    };
    a.expect("basis state of a valid substrate").into_ref()
}
