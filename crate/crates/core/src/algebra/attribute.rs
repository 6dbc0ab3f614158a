use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::algebra::Substrate;
use crate::error::{KitError, KitResult};
use crate::linalg::{
    self, canonical_ray, in_span, intersection_dim, kron_all, max_principal_cosine,
    orthonormal_basis, same_ray, CVec, C64, TAU_NORM,
};

/// How an attribute's set of states is stored.
#[derive(Clone, Debug)]
pub enum Body {
    /// Classical state indices.
    States(BTreeSet<usize>),
    /// A finite list of rays (canonical-phase unit vectors).
    Rays(Vec<CVec>),
    /// Every ray in the span of an orthonormal basis.
    Subspace(Vec<CVec>),
    /// The ordered-pair attribute `(a, b, ...)` on a composite substrate.
    Product(Vec<Arc<Attribute>>),
    /// Set union of attributes on one substrate.
    Union(Vec<Arc<Attribute>>),
}

/// A set of states of one substrate.
#[derive(Clone, Debug)]
pub struct Attribute {
    substrate: Substrate,
    body: Body,
    label: Option<String>,
}

pub type AttrRef = Arc<Attribute>;

impl Attribute {
    pub fn states<I: IntoIterator<Item = usize>>(substrate: &Substrate, states: I) -> KitResult<Self> {
        if substrate.is_quantum() {
            return Err(KitError::KindMismatch(format!(
                "state-set attribute on quantum substrate `{substrate}`"
            )));
        }
        let set: BTreeSet<usize> = states.into_iter().collect();
        if let Some(&s) = set.iter().find(|&&s| s >= substrate.size()) {
            return Err(KitError::InvalidAttribute(format!(
                "state {s} out of range for `{substrate}` with {} states",
                substrate.size()
            )));
        }
        Ok(Self::raw(substrate, Body::States(set)))
    }

    /// A finite ray list. Vectors are normalised and phase-canonicalised;
    /// repeated rays are rejected.
    pub fn rays(substrate: &Substrate, vectors: Vec<CVec>) -> KitResult<Self> {
        Self::check_quantum(substrate, &vectors)?;
        let mut rays: Vec<CVec> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let r = canonical_ray(&v);
            if rays.iter().any(|q| same_ray(q, &r)) {
                return Err(KitError::InvalidAttribute("repeated ray in ray list".into()));
            }
            rays.push(r);
        }
        Ok(Self::raw(substrate, Body::Rays(rays)))
    }

    pub fn ray(substrate: &Substrate, v: CVec) -> KitResult<Self> {
        Self::rays(substrate, vec![v])
    }

    /// All rays in the span of `vectors` (any spanning set is accepted).
    pub fn subspace(substrate: &Substrate, vectors: Vec<CVec>) -> KitResult<Self> {
        Self::check_quantum(substrate, &vectors)?;
        let basis = orthonormal_basis(&vectors, linalg::TAU_RANK);
        Ok(Self::raw(substrate, Body::Subspace(basis)))
    }

    pub fn empty(substrate: &Substrate) -> Self {
        if substrate.is_quantum() {
            Self::raw(substrate, Body::Rays(Vec::new()))
        } else {
            Self::raw(substrate, Body::States(BTreeSet::new()))
        }
    }

    /// Every state of the substrate.
    pub fn full(substrate: &Substrate) -> Self {
        let n = substrate.size();
        if substrate.is_quantum() {
            Self::raw(
                substrate,
                Body::Subspace((0..n).map(|k| linalg::basis_vector(n, k)).collect()),
            )
        } else {
            Self::raw(substrate, Body::States((0..n).collect()))
        }
    }

    pub fn product(factors: &[AttrRef]) -> KitResult<Self> {
        let subs: Vec<Substrate> = factors.iter().map(|f| f.substrate.clone()).collect();
        let substrate = Substrate::composite(&subs)?;
        Ok(Self::raw(&substrate, Body::Product(factors.to_vec())))
    }

    /// Product attribute on an already-declared composite substrate.
    pub fn product_on(substrate: &Substrate, factors: &[AttrRef]) -> KitResult<Self> {
        let ok = substrate.components().len() == factors.len()
            && substrate
                .components()
                .iter()
                .zip(factors)
                .all(|(c, f)| *c == f.substrate);
        if !ok {
            return Err(KitError::DimensionMismatch(format!(
                "factors do not match the components of `{substrate}`"
            )));
        }
        Ok(Self::raw(substrate, Body::Product(factors.to_vec())))
    }

    pub fn union(substrate: &Substrate, members: &[AttrRef]) -> KitResult<Self> {
        if let Some(m) = members.iter().find(|m| m.substrate != *substrate) {
            return Err(KitError::DimensionMismatch(format!(
                "union member on `{}`, expected `{substrate}`",
                m.substrate
            )));
        }
        if !substrate.is_quantum() {
            let mut set = BTreeSet::new();
            for m in members {
                set.extend(m.state_set());
            }
            return Ok(Self::raw(substrate, Body::States(set)));
        }
        if members.iter().all(|m| matches!(m.body, Body::Rays(_))) {
            let mut rays: Vec<CVec> = Vec::new();
            for m in members {
                if let Body::Rays(rs) = &m.body {
                    for r in rs {
                        if !rays.iter().any(|q| same_ray(q, r)) {
                            rays.push(r.clone());
                        }
                    }
                }
            }
            return Ok(Self::raw(substrate, Body::Rays(rays)));
        }
        let mut flat = Vec::new();
        for m in members {
            match &m.body {
                Body::Union(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(m.clone()),
            }
        }
        Ok(Self::raw(substrate, Body::Union(flat)))
    }

    fn raw(substrate: &Substrate, body: Body) -> Self {
        Attribute {
            substrate: substrate.clone(),
            body,
            label: None,
        }
    }

    fn check_quantum(substrate: &Substrate, vectors: &[CVec]) -> KitResult<()> {
        if !substrate.is_quantum() {
            return Err(KitError::KindMismatch(format!(
                "vector attribute on classical substrate `{substrate}`"
            )));
        }
        for v in vectors {
            if v.len() != substrate.size() {
                return Err(KitError::DimensionMismatch(format!(
                    "vector of length {} on `{substrate}` of dimension {}",
                    v.len(),
                    substrate.size()
                )));
            }
            if v.norm() < TAU_NORM {
                return Err(KitError::InvalidAttribute("zero vector".into()));
            }
        }
        Ok(())
    }

    /// The same set of states on a substrate of identical shape.
    pub fn rebase(&self, target: &Substrate) -> KitResult<Attribute> {
        if !self.substrate.same_shape(target) {
            return Err(KitError::DimensionMismatch(format!(
                "cannot move an attribute from `{}` to `{target}`",
                self.substrate
            )));
        }
        let body = match &self.body {
            Body::Product(f) => Body::Product(
                f.iter()
                    .zip(target.components())
                    .map(|(a, s)| a.rebase(s).map(Arc::new))
                    .collect::<KitResult<_>>()?,
            ),
            Body::Union(m) => Body::Union(
                m.iter()
                    .map(|a| a.rebase(target).map(Arc::new))
                    .collect::<KitResult<_>>()?,
            ),
            b => b.clone(),
        };
        Ok(Attribute {
            substrate: target.clone(),
            body,
            label: self.label.clone(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn into_ref(self) -> AttrRef {
        Arc::new(self)
    }

    pub fn substrate(&self) -> &Substrate {
        &self.substrate
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn is_quantum(&self) -> bool {
        self.substrate.is_quantum()
    }

    pub fn factors(&self) -> Option<&[AttrRef]> {
        match &self.body {
            Body::Product(f) => Some(f),
            _ => None,
        }
    }

    /// The attribute seen on slot `k` of a composite; the attribute itself
    /// for slot 0 of an elementary substrate.
    pub fn slot(self: &Arc<Self>, k: usize) -> Option<AttrRef> {
        match &self.body {
            Body::Product(f) => f.get(k).cloned(),
            _ if !self.substrate.is_composite() && k == 0 => Some(self.clone()),
            _ => None,
        }
    }

    /// Human-readable name: the label when present, else a short rendering.
    pub fn describe(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match &self.body {
            Body::States(s) => format!(
                "{{{}}}",
                s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            Body::Rays(r) => match r.len() {
                0 => "∅".into(),
                1 => format!("ray{}", render_vec(&r[0])),
                n => format!("rays[{n}]"),
            },
            Body::Subspace(b) => format!("span[{}]", b.len()),
            Body::Product(f) => format!(
                "({})",
                f.iter().map(|a| a.describe()).collect::<Vec<_>>().join(",")
            ),
            Body::Union(m) => m.iter().map(|a| a.describe()).collect::<Vec<_>>().join("∪"),
        }
    }

    // ---- classical view ----

    /// The state set of a classical attribute, with composite states
    /// indexed in mixed radix (first component most significant).
    pub fn state_set(&self) -> BTreeSet<usize> {
        match &self.body {
            Body::States(s) => s.clone(),
            Body::Product(factors) => {
                let mut acc: BTreeSet<usize> = [0].into_iter().collect();
                for f in factors {
                    let n = f.substrate.size();
                    let fs = f.state_set();
                    acc = acc
                        .iter()
                        .flat_map(|&a| fs.iter().map(move |&s| a * n + s))
                        .collect();
                }
                acc
            }
            Body::Union(m) => m.iter().flat_map(|a| a.state_set()).collect(),
            Body::Rays(_) | Body::Subspace(_) => BTreeSet::new(),
        }
    }

    // ---- quantum view ----

    /// The attribute as a finite union of subspaces (orthonormal bases).
    /// `None` for products with two or more multi-dimensional factors,
    /// which are not finite unions of subspaces.
    pub fn pieces(&self) -> Option<Vec<Vec<CVec>>> {
        match &self.body {
            Body::Rays(r) => Some(r.iter().map(|v| vec![v.clone()]).collect()),
            Body::Subspace(b) if b.is_empty() => Some(Vec::new()),
            Body::Subspace(b) => Some(vec![b.clone()]),
            Body::Union(m) => {
                let mut out = Vec::new();
                for a in m {
                    out.extend(a.pieces()?);
                }
                Some(out)
            }
            Body::Product(factors) => {
                let mut acc: Vec<Vec<CVec>> = vec![vec![CVec::from_element(1, C64::from(1.0))]];
                for f in factors {
                    let fp = f.pieces()?;
                    let mut next = Vec::new();
                    for a in &acc {
                        for p in &fp {
                            if a.len() > 1 && p.len() > 1 {
                                return None;
                            }
                            let mut basis = Vec::new();
                            for u in a {
                                for v in p {
                                    basis.push(linalg::kron(u, v));
                                }
                            }
                            next.push(basis);
                        }
                    }
                    acc = next;
                }
                Some(acc)
            }
            Body::States(_) => Some(Vec::new()),
        }
    }

    /// Vectors whose span equals the span of the attribute.
    pub fn spanning_rays(&self) -> Vec<CVec> {
        match &self.body {
            Body::Rays(r) => r.clone(),
            Body::Subspace(b) => b.clone(),
            Body::Union(m) => m.iter().flat_map(|a| a.spanning_rays()).collect(),
            Body::Product(factors) => {
                let mut acc: Vec<Vec<CVec>> = vec![Vec::new()];
                for f in factors {
                    let fr = f.spanning_rays();
                    acc = acc
                        .iter()
                        .flat_map(|prefix| {
                            fr.iter().map(move |v| {
                                let mut p = prefix.clone();
                                p.push(v.clone());
                                p
                            })
                        })
                        .collect();
                }
                acc.iter().map(|parts| kron_all(parts)).collect()
            }
            Body::States(_) => Vec::new(),
        }
    }

    /// Orthonormal basis of the span.
    pub fn span_basis(&self) -> Vec<CVec> {
        orthonormal_basis(&self.spanning_rays(), 1e-7)
    }

    /// The unique ray of a one-ray attribute.
    pub fn single_ray(&self) -> Option<CVec> {
        let pieces = self.pieces()?;
        match pieces.as_slice() {
            [p] if p.len() == 1 => Some(p[0].clone()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.body {
            Body::States(s) => s.is_empty(),
            Body::Rays(r) => r.is_empty(),
            Body::Subspace(b) => b.is_empty(),
            Body::Product(f) => f.iter().any(|a| a.is_empty()),
            Body::Union(m) => m.iter().all(|a| a.is_empty()),
        }
    }

    /// Whether the unit vector `v` is a state with this attribute.
    pub fn contains_ray(&self, v: &CVec) -> bool {
        if v.len() != self.substrate.size() || !self.is_quantum() {
            return false;
        }
        match &self.body {
            Body::Rays(r) => r.iter().any(|q| same_ray(q, v)),
            Body::Subspace(b) => !b.is_empty() && in_span(v, b),
            Body::Union(m) => m.iter().any(|a| a.contains_ray(v)),
            Body::Product(factors) => {
                let dims: Vec<usize> = factors.iter().map(|f| f.substrate.size()).collect();
                match factorize(v, &dims) {
                    Some(parts) => factors.iter().zip(&parts).all(|(f, p)| f.contains_ray(p)),
                    None => false,
                }
            }
            Body::States(_) => false,
        }
    }

    pub fn contains_state(&self, s: usize) -> bool {
        !self.is_quantum() && self.state_set().contains(&s)
    }

    fn same_product_shape<'a>(&'a self, other: &'a Attribute) -> Option<(&'a [AttrRef], &'a [AttrRef])> {
        match (&self.body, &other.body) {
            (Body::Product(a), Body::Product(b))
                if a.len() == b.len()
                    && a.iter().zip(b.iter()).all(|(x, y)| x.substrate == y.substrate) =>
            {
                Some((a, b))
            }
            _ => None,
        }
    }

    /// Set inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Attribute) -> bool {
        if self.substrate != other.substrate {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        if !self.is_quantum() {
            return self.state_set().is_subset(&other.state_set());
        }
        if let Some((a, b)) = self.same_product_shape(other) {
            return a.iter().zip(b).all(|(x, y)| x.is_subset_of(y));
        }
        if let Body::Union(m) = &self.body {
            return m.iter().all(|a| a.is_subset_of(other));
        }
        match (self.pieces(), other.pieces()) {
            // Over C, a subspace inside a finite union of subspaces lies in one of them.
            (Some(mine), Some(theirs)) => mine.iter().all(|p| {
                theirs
                    .iter()
                    .any(|q| p.len() <= q.len() && p.iter().all(|v| in_span(v, q)))
            }),
            (Some(mine), None) => mine.iter().all(|p| {
                p.iter().all(|v| other.contains_ray(v))
                    && p.iter().enumerate().all(|(i, u)| {
                        p[i + 1..].iter().all(|w| {
                            let s = u + w;
                            other.contains_ray(&(&s / C64::from(s.norm())))
                        })
                    })
            }),
            (None, Some(theirs)) => {
                let span = self.span_basis();
                theirs
                    .iter()
                    .any(|q| span.len() <= q.len() && span.iter().all(|v| in_span(v, q)))
            }
            (None, None) => false,
        }
    }

    pub fn set_eq(&self, other: &Attribute) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// No state has both attributes.
    ///
    /// For products with several multi-dimensional factors compared against
    /// a subspace, disjointness is only confirmed through the spans, so the
    /// answer can be a conservative `false`.
    pub fn is_disjoint_from(&self, other: &Attribute) -> bool {
        if self.substrate != other.substrate {
            return true;
        }
        if self.is_empty() || other.is_empty() {
            return true;
        }
        if !self.is_quantum() {
            return self.state_set().is_disjoint(&other.state_set());
        }
        if let Some((a, b)) = self.same_product_shape(other) {
            return a.iter().zip(b).any(|(x, y)| x.is_disjoint_from(y));
        }
        if let Body::Union(m) = &self.body {
            return m.iter().all(|a| a.is_disjoint_from(other));
        }
        if let Body::Union(m) = &other.body {
            return m.iter().all(|a| self.is_disjoint_from(a));
        }
        match (self.pieces(), other.pieces()) {
            (Some(a), Some(b)) => a
                .iter()
                .all(|p| b.iter().all(|q| intersection_dim(p, q) == 0)),
            (Some(a), None) => pieces_disjoint_from_opaque(&a, other),
            (None, Some(b)) => pieces_disjoint_from_opaque(&b, self),
            (None, None) => intersection_dim(&self.span_basis(), &other.span_basis()) == 0,
        }
    }

    /// Supremum of `|<a|b>|` over states `a` in `self` and `b` in `other`.
    /// Exact for finite unions of subspaces and for products of equal
    /// shape; otherwise the bound given by the spans.
    pub fn max_overlap(&self, other: &Attribute) -> f64 {
        if self.is_empty() || other.is_empty() {
            return 0.0;
        }
        if let Some((a, b)) = self.same_product_shape(other) {
            return a.iter().zip(b).map(|(x, y)| x.max_overlap(y)).product();
        }
        match (self.pieces(), other.pieces()) {
            (Some(a), Some(b)) => a
                .iter()
                .flat_map(|p| b.iter().map(move |q| max_principal_cosine(p, q)))
                .fold(0.0, f64::max),
            _ => max_principal_cosine(&self.span_basis(), &other.span_basis()),
        }
    }
}

fn pieces_disjoint_from_opaque(pieces: &[Vec<CVec>], opaque: &Attribute) -> bool {
    let span = opaque.span_basis();
    pieces.iter().all(|p| {
        if intersection_dim(p, &span) == 0 {
            true
        } else if p.len() == 1 {
            !opaque.contains_ray(&p[0])
        } else {
            false
        }
    })
}

/// Splits a vector on a composite of the given dimensions into product
/// factors, if it is a product state.
pub fn factorize(v: &CVec, dims: &[usize]) -> Option<Vec<CVec>> {
    if dims.len() == 1 {
        return Some(vec![v.clone()]);
    }
    let d0 = dims[0];
    let rest: usize = dims[1..].iter().product();
    if d0 * rest != v.len() {
        return None;
    }
    let m = linalg::CMat::from_fn(d0, rest, |i, j| v[i * rest + j]);
    let svd = m.svd(true, true);
    let sv = &svd.singular_values;
    let (imax, smax) = sv
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    let tail: f64 = sv.iter().enumerate().filter(|&(i, _)| i != imax).map(|(_, s)| s * s).sum();
    if tail.sqrt() > 1e-7 * smax.max(1e-300) {
        return None;
    }
    let u = svd.u.as_ref()?.column(imax).into_owned();
    let vt = svd.v_t.as_ref()?.row(imax).transpose();
    let first = canonical_ray(&u);
    let second = vt * C64::from(smax);
    let mut out = vec![first];
    out.extend(factorize(&canonical_ray(&second), &dims[1..])?);
    Some(out)
}

fn render_vec(v: &CVec) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|z| {
            if z.im.abs() < 1e-12 {
                format!("{:.4}", z.re)
            } else {
                format!("{:.4}{:+.4}i", z.re, z.im)
            }
        })
        .collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
