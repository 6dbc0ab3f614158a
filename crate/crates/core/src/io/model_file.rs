//! The `.ctm` model file: TOML tables of substrates, named states,
//! attributes and variables, plus the oracle configuration.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AttrRef, Attribute, Body, Substrate, Variable};
use crate::error::{Invariant, KitError, KitResult};
use crate::linalg::{c, CVec, TAU_NORM};
use crate::model::Model;
use crate::oracle::OracleConfig;

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileModel {
    #[serde(default)]
    oracle: OracleConfig,
    #[serde(default, rename = "substrate", skip_serializing_if = "Vec::is_empty")]
    substrates: Vec<SubstrateEntry>,
    #[serde(default, rename = "state", skip_serializing_if = "Vec::is_empty")]
    states: Vec<StateEntry>,
    #[serde(default, rename = "attribute", skip_serializing_if = "Vec::is_empty")]
    attributes: Vec<AttributeEntry>,
    #[serde(default, rename = "variable", skip_serializing_if = "Vec::is_empty")]
    variables: Vec<VariableEntry>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Classical,
    Quantum,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SubstrateEntry {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<Vec<String>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct StateEntry {
    name: String,
    substrate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum StateRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum AttrItem {
    Name(String),
    Inline(Box<AttrSpec>),
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct AttrSpec {
    substrate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<StateRef>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rays: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subspace: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<Vec<AttrItem>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    union: Option<Vec<AttrItem>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    full: bool,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct AttributeEntry {
    name: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    preparable: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    generic: bool,
    substrate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<Vec<StateRef>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rays: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subspace: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<Vec<AttrItem>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    union: Option<Vec<AttrItem>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    full: bool,
}

impl AttributeEntry {
    fn spec(&self) -> AttrSpec {
        AttrSpec {
            substrate: self.substrate.clone(),
            states: self.states.clone(),
            rays: self.rays.clone(),
            subspace: self.subspace.clone(),
            product: self.product.clone(),
            union: self.union.clone(),
            full: self.full,
        }
    }

    fn from_spec(name: String, preparable: bool, generic: bool, s: AttrSpec) -> Self {
        AttributeEntry {
            name,
            preparable,
            generic,
            substrate: s.substrate,
            states: s.states,
            rays: s.rays,
            subspace: s.subspace,
            product: s.product,
            union: s.union,
            full: s.full,
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct VariableEntry {
    name: String,
    attributes: Vec<AttrItem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

fn invalid(invariant: Invariant, detail: impl Into<String>) -> KitError {
    KitError::Validation {
        invariant,
        detail: detail.into(),
    }
}

/// Names the model-file invariant behind a library error.
fn as_validation(e: KitError) -> KitError {
    let invariant = match &e {
        KitError::Validation { .. } | KitError::Parse { .. } => return e,
        KitError::Duplicate(_) => Invariant::Duplicate,
        KitError::UnknownName(_) => Invariant::UnresolvedName,
        KitError::KindMismatch(_) => Invariant::Kind,
        KitError::NotDisjoint(_) | KitError::OverlappingInputs(_) | KitError::OverlappingOutputs(_) => {
            Invariant::Disjointness
        }
        KitError::LabelMismatch(_) => Invariant::Labels,
        _ => Invariant::Dimension,
    };
    invalid(invariant, e.to_string())
}

fn line_column(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, column)
}

pub fn parse_model(src: &str) -> KitResult<Model> {
    let file: FileModel = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(src, s.start));
        KitError::Parse {
            line,
            column,
            message: e.message().to_owned(),
        }
    })?;
    build(file).map_err(as_validation)
}

pub fn load_model(path: impl AsRef<Path>) -> KitResult<Model> {
    let src = std::fs::read_to_string(path.as_ref())
        .map_err(|e| KitError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_model(&src)
}

enum NamedState {
    Classical(usize),
    Quantum(CVec),
}

struct Resolver {
    substrates: HashMap<String, Substrate>,
    states: HashMap<String, (String, NamedState)>,
    attributes: HashMap<String, AttrRef>,
}

impl Resolver {
    fn substrate(&self, name: &str) -> KitResult<&Substrate> {
        self.substrates
            .get(name)
            .ok_or_else(|| invalid(Invariant::UnresolvedName, format!("substrate `{name}`")))
    }

    fn state(&self, name: &str, on: &Substrate) -> KitResult<&NamedState> {
        let (sub, st) = self
            .states
            .get(name)
            .ok_or_else(|| invalid(Invariant::UnresolvedName, format!("state `{name}`")))?;
        if sub != on.name() {
            return Err(invalid(
                Invariant::Kind,
                format!("state `{name}` belongs to `{sub}`, not `{}`", on.name()),
            ));
        }
        Ok(st)
    }

    fn vectors(&self, names: &[String], on: &Substrate) -> KitResult<Vec<CVec>> {
        names
            .iter()
            .map(|n| match self.state(n, on)? {
                NamedState::Quantum(v) => Ok(v.clone()),
                NamedState::Classical(_) => Err(invalid(Invariant::Kind, format!("state `{n}` is classical"))),
            })
            .collect()
    }

    fn item(&self, item: &AttrItem) -> KitResult<AttrRef> {
        match item {
            AttrItem::Name(n) => self
                .attributes
                .get(n)
                .cloned()
                .ok_or_else(|| invalid(Invariant::UnresolvedName, format!("attribute `{n}`"))),
            AttrItem::Inline(spec) => self.attribute(spec),
        }
    }

    fn attribute(&self, spec: &AttrSpec) -> KitResult<AttrRef> {
        let s = self.substrate(&spec.substrate)?.clone();
        let bodies = [
            spec.states.is_some(),
            spec.rays.is_some(),
            spec.subspace.is_some(),
            spec.product.is_some(),
            spec.union.is_some(),
            spec.full,
        ];
        if bodies.iter().filter(|b| **b).count() != 1 {
            return Err(invalid(
                Invariant::Kind,
                format!("an attribute on `{}` needs exactly one of states, rays, subspace, product, union, full", s.name()),
            ));
        }
        let a = if let Some(refs) = &spec.states {
            if s.is_quantum() {
                return Err(invalid(Invariant::Kind, format!("`states` on quantum substrate `{}`", s.name())));
            }
            let idx = refs
                .iter()
                .map(|r| match r {
                    StateRef::Index(k) => Ok(*k),
                    StateRef::Name(n) => match self.state(n, &s)? {
                        NamedState::Classical(k) => Ok(*k),
                        NamedState::Quantum(_) => Err(invalid(Invariant::Kind, format!("state `{n}` is quantum"))),
                    },
                })
                .collect::<KitResult<Vec<_>>>()?;
            Attribute::states(&s, idx)?
        } else if let Some(names) = &spec.rays {
            Attribute::rays(&s, self.vectors(names, &s)?)?
        } else if let Some(names) = &spec.subspace {
            Attribute::subspace(&s, self.vectors(names, &s)?)?
        } else if let Some(items) = &spec.product {
            let factors = items.iter().map(|i| self.item(i)).collect::<KitResult<Vec<_>>>()?;
            Attribute::product_on(&s, &factors)?
        } else if let Some(items) = &spec.union {
            let members = items.iter().map(|i| self.item(i)).collect::<KitResult<Vec<_>>>()?;
            Attribute::union(&s, &members)?
        } else {
            Attribute::full(&s)
        };
        Ok(a.into_ref())
    }
}

fn build(file: FileModel) -> KitResult<Model> {
    let mut model = Model::new(file.oracle);
    let mut r = Resolver {
        substrates: HashMap::new(),
        states: HashMap::new(),
        attributes: HashMap::new(),
    };
    for e in file.substrates {
        let s = match (&e.components, e.kind) {
            (Some(names), None) => {
                let comps = names
                    .iter()
                    .map(|n| r.substrate(n).cloned())
                    .collect::<KitResult<Vec<_>>>()?;
                Substrate::composite_named(e.name.clone(), &comps)?
            }
            (None, Some(Kind::Classical)) => {
                let n = e.states.ok_or_else(|| invalid(Invariant::Dimension, format!("`{}` needs `states`", e.name)))?;
                Substrate::classical(e.name.clone(), n)?
            }
            (None, Some(Kind::Quantum)) => {
                let d = e
                    .dimension
                    .ok_or_else(|| invalid(Invariant::Dimension, format!("`{}` needs `dimension`", e.name)))?;
                Substrate::quantum(e.name.clone(), d)?
            }
            _ => {
                return Err(invalid(
                    Invariant::Kind,
                    format!("substrate `{}` needs either `kind` or `components`", e.name),
                ))
            }
        };
        if r.substrates.insert(e.name.clone(), s.clone()).is_some() {
            return Err(invalid(Invariant::Duplicate, format!("substrate `{}`", e.name)));
        }
        model.add_substrate(s)?;
    }
    for e in file.states {
        let s = r.substrate(&e.substrate)?;
        let st = match (&e.vector, e.index) {
            (Some(v), None) if s.is_quantum() => {
                if v.len() != s.size() {
                    return Err(invalid(
                        Invariant::Dimension,
                        format!("state `{}` has {} entries, `{}` has dimension {}", e.name, v.len(), s.name(), s.size()),
                    ));
                }
                let v = CVec::from_iterator(v.len(), v.iter().map(|[re, im]| c(*re, *im)));
                let norm = v.norm();
                if (norm - 1.0).abs() > TAU_NORM {
                    return Err(invalid(Invariant::Norm, format!("state `{}` has norm {norm}", e.name)));
                }
                NamedState::Quantum(v)
            }
            (None, Some(k)) if !s.is_quantum() => {
                if k >= s.size() {
                    return Err(invalid(Invariant::Dimension, format!("state `{}` index {k} out of range", e.name)));
                }
                NamedState::Classical(k)
            }
            _ => {
                return Err(invalid(
                    Invariant::Kind,
                    format!("state `{}`: quantum states need `vector`, classical ones `index`", e.name),
                ))
            }
        };
        if r.states.insert(e.name.clone(), (e.substrate.clone(), st)).is_some() {
            return Err(invalid(Invariant::Duplicate, format!("state `{}`", e.name)));
        }
    }
    for e in file.attributes {
        let a = r.attribute(&e.spec())?;
        let a = Arc::new(Attribute::clone(&a).with_label(e.name.clone()));
        if r.attributes.insert(e.name.clone(), a.clone()).is_some() {
            return Err(invalid(Invariant::Duplicate, format!("attribute `{}`", e.name)));
        }
        model.add_attribute(e.name, a, e.preparable, e.generic)?;
    }
    for e in file.variables {
        let attrs = e.attributes.iter().map(|i| r.item(i)).collect::<KitResult<Vec<_>>>()?;
        let mut v = Variable::new(attrs)?;
        if let Some(labels) = e.labels {
            v = v.with_labels(labels)?;
        }
        model.add_variable(e.name, v)?;
    }
    Ok(model)
}

struct Emitter<'a> {
    model: &'a Model,
    states: Vec<StateEntry>,
}

impl Emitter<'_> {
    fn named_vectors(&mut self, prefix: &str, substrate: &Substrate, vs: &[CVec]) -> Vec<String> {
        vs.iter()
            .enumerate()
            .map(|(k, v)| {
                let name = format!("{prefix}.{k}");
                self.states.push(StateEntry {
                    name: name.clone(),
                    substrate: substrate.name().to_owned(),
                    vector: Some(v.iter().map(|z| [z.re, z.im]).collect()),
                    index: None,
                });
                name
            })
            .collect()
    }

    fn item(&mut self, prefix: &str, a: &AttrRef) -> AttrItem {
        match self.model.attributes().iter().find(|na| Arc::ptr_eq(&na.attribute, a)) {
            Some(na) => AttrItem::Name(na.name.clone()),
            None => AttrItem::Inline(Box::new(self.spec(prefix, a))),
        }
    }

    fn spec(&mut self, prefix: &str, a: &Attribute) -> AttrSpec {
        let s = a.substrate();
        let mut spec = AttrSpec {
            substrate: s.name().to_owned(),
            ..AttrSpec::default()
        };
        match a.body() {
            Body::States(set) => spec.states = Some(set.iter().map(|k| StateRef::Index(*k)).collect()),
            Body::Rays(vs) => spec.rays = Some(self.named_vectors(prefix, s, vs)),
            Body::Subspace(vs) => spec.subspace = Some(self.named_vectors(prefix, s, vs)),
            Body::Product(fs) => {
                spec.product = Some(fs.iter().enumerate().map(|(k, f)| self.item(&format!("{prefix}.{k}"), f)).collect())
            }
            Body::Union(ms) => {
                spec.union = Some(ms.iter().enumerate().map(|(k, m)| self.item(&format!("{prefix}.{k}"), m)).collect())
            }
        }
        spec
    }
}

fn substrate_entries(s: &Substrate, out: &mut Vec<SubstrateEntry>) {
    if out.iter().any(|e| e.name == s.name()) {
        return;
    }
    if s.is_composite() {
        for c in s.components() {
            substrate_entries(c, out);
        }
        out.push(SubstrateEntry {
            name: s.name().to_owned(),
            kind: None,
            states: None,
            dimension: None,
            components: Some(s.components().iter().map(|c| c.name().to_owned()).collect()),
        });
    } else {
        let q = s.is_quantum();
        out.push(SubstrateEntry {
            name: s.name().to_owned(),
            kind: Some(if q { Kind::Quantum } else { Kind::Classical }),
            states: (!q).then_some(s.size()),
            dimension: q.then_some(s.size()),
            components: None,
        });
    }
}

/// Writes `model` in the model-file format. Named states are generated
/// from the attributes that use them.
pub fn emit_model(model: &Model) -> KitResult<String> {
    let mut substrates = Vec::new();
    for s in model.substrates() {
        substrate_entries(s, &mut substrates);
    }
    let mut em = Emitter {
        model,
        states: Vec::new(),
    };
    let mut attributes = Vec::new();
    for na in model.attributes() {
        let spec = em.spec(&na.name, &na.attribute);
        attributes.push(AttributeEntry::from_spec(na.name.clone(), na.preparable, na.generic, spec));
    }
    let mut variables = Vec::new();
    for (name, v) in model.variables() {
        let attrs = v
            .attributes()
            .iter()
            .enumerate()
            .map(|(k, a)| em.item(&format!("{name}.{k}"), a))
            .collect();
        variables.push(VariableEntry {
            name: name.clone(),
            attributes: attrs,
            labels: Some(v.labels()),
        });
    }
    let file = FileModel {
        oracle: model.config.clone(),
        substrates,
        states: em.states,
        attributes,
        variables,
    };
    toml::to_string(&file).map_err(|e| KitError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"
[[substrate]]
name = "q"
kind = "quantum"
dimension = 2

[[state]]
name = "zero"
substrate = "q"
vector = [[1.0, 0.0], [0.0, 0.0]]

[[state]]
name = "one"
substrate = "q"
vector = [[0.0, 0.0], [1.0, 0.0]]

[[attribute]]
name = "z0"
substrate = "q"
rays = ["zero"]
preparable = true

[[attribute]]
name = "z1"
substrate = "q"
rays = ["one"]

[[variable]]
name = "Z"
attributes = ["z0", "z1"]
labels = ["0", "1"]
"#;

    #[test]
    fn small_qubit_file_loads() {
        let m = parse_model(QUBIT).unwrap();
        assert_eq!(m.attributes().len(), 2);
        assert_eq!(m.variable("Z").unwrap().labels(), vec!["0", "1"]);
        assert!(m.attributes()[0].preparable);
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        let src = "[[substrate]]\nname = \"q\"\nkind = quantum\n";
        match parse_model(src) {
            Err(KitError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 8)),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let src = QUBIT.replace("labels =", "lables =");
        assert!(matches!(parse_model(&src), Err(KitError::Parse { .. })));
    }

    #[test]
    fn short_vectors_fail_the_norm_invariant() {
        let src = QUBIT.replace("[[1.0, 0.0], [0.0, 0.0]]", "[[0.9, 0.0], [0.0, 0.0]]");
        match parse_model(&src) {
            Err(KitError::Validation { invariant, .. }) => assert_eq!(invariant, Invariant::Norm),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn dangling_and_repeated_names_are_rejected() {
        let dangling = QUBIT.replace("[\"z0\", \"z1\"]", "[\"z0\", \"z2\"]");
        assert!(matches!(
            parse_model(&dangling),
            Err(KitError::Validation { invariant: Invariant::UnresolvedName, .. })
        ));
        let repeated = QUBIT.replace("name = \"z1\"", "name = \"z0\"");
        assert!(matches!(
            parse_model(&repeated),
            Err(KitError::Validation { invariant: Invariant::Duplicate, .. })
        ));
    }

    #[test]
    fn emitted_model_reloads() {
        let m = parse_model(QUBIT).unwrap();
        let again = parse_model(&emit_model(&m).unwrap()).unwrap();
        assert_eq!(again.attributes().len(), 2);
        assert!(again.attributes()[1].attribute.set_eq(&m.attributes()[1].attribute));
        assert_eq!(again.config, m.config);
    }
}
