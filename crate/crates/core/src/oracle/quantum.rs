//! Quantum possibility via the unitary-extension criterion: a task is
//! possible (with a generic ancilla prepared in a fixed state) iff there
//! are output rays `φ_i` in the required attributes and ancilla states
//! `a_i` with `<ψ_i|ψ_j> = <φ_i|φ_j><a_i|a_j>` for all rows. Without side
//! effects all `a_i` coincide.

use crate::algebra::{AttrRef, Task};
use crate::error::{KitError, KitResult};
use crate::linalg::{
    gram, gram_factor, inner, in_span, max_principal_cosine, min_eigenvalue, project, same_ray,
    CMat, CVec, C64,
};
use crate::oracle::{solver, Certificate, CertificateKind, OracleConfig, QuantumWitness, Verdict, Witness};

/// Largest number of discrete output choices enumerated exactly.
const MAX_CHOICES: usize = 4096;

/// One legitimate output set for a row: a subspace (all its rays) or a
/// product attribute that is not a finite union of subspaces.
#[derive(Clone, Debug)]
pub(crate) enum Alt {
    Span(Vec<CVec>),
    Opaque(AttrRef),
}

impl Alt {
    pub(crate) fn rigid(&self) -> Option<&CVec> {
        match self {
            Alt::Span(b) if b.len() == 1 => Some(&b[0]),
            _ => None,
        }
    }

    fn contains(&self, v: &CVec) -> bool {
        match self {
            Alt::Span(b) => in_span(v, b),
            Alt::Opaque(a) => a.contains_ray(v),
        }
    }

    fn basis(&self) -> Vec<CVec> {
        match self {
            Alt::Span(b) => b.clone(),
            Alt::Opaque(a) => a.span_basis(),
        }
    }

    fn overlap(&self, other: &Alt) -> f64 {
        match (self, other) {
            (Alt::Opaque(a), Alt::Opaque(b)) => a.max_overlap(b),
            _ => max_principal_cosine(&self.basis(), &other.basis()),
        }
    }
}

/// An input ray with the output sets it may be sent to.
#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub input: usize,
    pub ray: CVec,
    pub alts: Vec<Alt>,
}

/// Expands each input attribute into its stored spanning rays; every ray
/// of one input shares that input's outputs.
pub(crate) fn expand(task: &Task) -> KitResult<Vec<Row>> {
    if !task.substrate().is_quantum() {
        return Err(KitError::KindMismatch(format!(
            "quantum oracle given classical task on `{}`",
            task.substrate()
        )));
    }
    let mut rows = Vec::new();
    for (k, x) in task.inputs().iter().enumerate() {
        let mut alts = Vec::new();
        for y in task.outputs_for(x) {
            match y.pieces() {
                Some(ps) => alts.extend(ps.into_iter().map(Alt::Span)),
                None if !y.is_empty() => alts.push(Alt::Opaque(y.clone())),
                None => {}
            }
        }
        let mut rays: Vec<CVec> = Vec::new();
        for r in x.spanning_rays() {
            if !rays.iter().any(|q| same_ray(q, &r)) {
                rays.push(r);
            }
        }
        for r in rays {
            rows.push(Row {
                input: k,
                ray: r,
                alts: alts.clone(),
            });
        }
    }
    Ok(rows)
}

/// Whether every pair has the cloning shape `(x, x₀) → (x, x)`.
fn is_cloning_task(task: &Task) -> bool {
    task.pairs().iter().all(|(i, o)| match (i.factors(), o.factors()) {
        (Some([a, _]), Some([b, c])) => {
            a.set_eq(b) && c.rebase(a.substrate()).is_ok_and(|c| a.set_eq(&c))
        }
        _ => false,
    })
}

pub fn quantum_possible(task: &Task, side_effects: bool, cfg: &OracleConfig) -> KitResult<Verdict> {
    let rows = expand(task)?;
    if rows.is_empty() {
        return Ok(Verdict::possible(Witness::Quantum(QuantumWitness {
            row_input: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            ancillas: Vec::new(),
        })));
    }
    if let Some(i) = rows.iter().position(|r| r.alts.is_empty()) {
        return Ok(Verdict::impossible(
            Certificate::new(CertificateKind::EmptyOutput, "input has no legitimate output state").rows(&[i]),
        ));
    }
    let rays: Vec<CVec> = rows.iter().map(|r| r.ray.clone()).collect();
    let g = gram(&rays);

    if let Some(cert) = pairwise_certificate(task, &rows, &g, cfg) {
        return Ok(Verdict::impossible(cert));
    }
    if let Some(cert) = unit_norm_conflict(&rows, &g, cfg) {
        return Ok(Verdict::impossible(cert));
    }

    let choices: usize = rows
        .iter()
        .map(|r| r.alts.len())
        .try_fold(1usize, |acc, n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);
    if choices <= MAX_CHOICES {
        let mut first_cert: Option<Certificate> = None;
        let mut needs_search = false;
        let mut pick = vec![0usize; rows.len()];
        for _ in 0..choices {
            let chosen: Vec<&Alt> = rows.iter().zip(&pick).map(|(r, &k)| &r.alts[k]).collect();
            if let Some(phis) = chosen.iter().map(|a| a.rigid().cloned()).collect::<Option<Vec<_>>>() {
                match rigid_without_ancilla(&rows, &g, &phis, cfg) {
                    Ok(w) => return Ok(checked(task, w, cfg)),
                    Err(cert) if !side_effects => {
                        first_cert.get_or_insert(cert);
                    }
                    Err(_) => match rigid_with_ancilla(&rows, &g, &phis, cfg) {
                        Ok(w) => return Ok(checked(task, w, cfg)),
                        Err(Some(cert)) => {
                            first_cert.get_or_insert(cert);
                        }
                        Err(None) => needs_search = true,
                    },
                }
            } else {
                needs_search = true;
            }
            advance(&mut pick, &rows);
        }
        if !needs_search {
            let mut cert = first_cert.expect("every choice produced a certificate");
            if choices > 1 {
                cert.detail = format!("{} (all {choices} output choices excluded)", cert.detail);
            }
            return Ok(Verdict::impossible(cert));
        }
    }

    match solver::search(&rows, &g, side_effects, cfg, task_seed(&rows, cfg.seed)) {
        Some(w) => Ok(checked(task, w, cfg)),
        None => Ok(Verdict::unknown(format!(
            "no certificate applies and no witness found in {} restarts",
            cfg.restarts
        ))),
    }
}

fn advance(pick: &mut [usize], rows: &[Row]) {
    for (k, r) in pick.iter_mut().zip(rows) {
        *k += 1;
        if *k < r.alts.len() {
            return;
        }
        *k = 0;
    }
}

fn checked(task: &Task, w: QuantumWitness, cfg: &OracleConfig) -> Verdict {
    if validate_quantum(task, &w, cfg) {
        Verdict::possible(Witness::Quantum(w))
    } else {
        Verdict::unknown("candidate witness failed re-validation")
    }
}

fn pairwise_certificate(task: &Task, rows: &[Row], g: &CMat, cfg: &OracleConfig) -> Option<Certificate> {
    let cloning = is_cloning_task(task);
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let overlap = g[(i, j)].norm();
            let bound = rows[i]
                .alts
                .iter()
                .flat_map(|a| rows[j].alts.iter().map(move |b| a.overlap(b)))
                .fold(0.0, f64::max);
            if overlap > bound + cfg.tau_gram {
                let cert = if bound <= cfg.tau_gram {
                    Certificate::new(
                        CertificateKind::ForcedOrthogonality,
                        "outputs are orthogonal but the inputs overlap",
                    )
                } else if cloning {
                    Certificate::new(
                        CertificateKind::CloningGram,
                        "cloning would need |c| = |c|²·|<a_i|a_j>| with |<a_i|a_j>| ≤ 1",
                    )
                } else {
                    Certificate::new(
                        CertificateKind::OverlapBound,
                        "input overlap exceeds every available output overlap",
                    )
                };
                return Some(cert.rows(&[i, j]).value("overlap", overlap).value("bound", bound));
            }
        }
    }
    None
}

fn unit_norm_conflict(rows: &[Row], g: &CMat, cfg: &OracleConfig) -> Option<Certificate> {
    for (j, row) in rows.iter().enumerate() {
        let [Alt::Span(basis)] = row.alts.as_slice() else {
            continue;
        };
        if basis.len() < 2 {
            continue;
        }
        // Rows whose overlap with row j is as large as it can be pin the
        // output of row j to their normalised projection.
        let mut forced: Vec<(usize, CVec, f64)> = Vec::new();
        for (i, other) in rows.iter().enumerate() {
            if i == j {
                continue;
            }
            let [alt] = other.alts.as_slice() else { continue };
            let Some(phi) = alt.rigid() else { continue };
            let p = project(phi, basis);
            let reach = p.norm();
            let overlap = g[(i, j)].norm();
            if reach > 1e-6 && overlap >= reach - cfg.tau_gram {
                forced.push((i, p / C64::from(reach), overlap));
            }
        }
        for (a, (ia, ua, oa)) in forced.iter().enumerate() {
            for (ib, ub, ob) in &forced[a + 1..] {
                let agree = inner(ua, ub).norm();
                if agree < 1.0 - 1e-6 {
                    return Some(
                        Certificate::new(
                            CertificateKind::UnitNormConflict,
                            "two tight overlap constraints force one output onto two different rays",
                        )
                        .rows(&[*ia, *ib, j])
                        .value("overlap_a", *oa)
                        .value("overlap_b", *ob)
                        .value("forced_ray_overlap", agree),
                    );
                }
            }
        }
    }
    None
}

/// Fixed output rays, shared ancilla: the Gram matrices must agree up to
/// a diagonal phase. Decided exactly by propagating phases.
fn rigid_without_ancilla(
    rows: &[Row],
    g: &CMat,
    phis: &[CVec],
    cfg: &OracleConfig,
) -> Result<QuantumWitness, Certificate> {
    let n = rows.len();
    let pg = gram(phis);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (g[(i, j)].norm(), pg[(i, j)].norm());
            if (a - b).abs() > cfg.tau_gram {
                return Err(Certificate::new(
                    CertificateKind::RigidGramMismatch,
                    "output overlap differs from input overlap",
                )
                .rows(&[i, j])
                .value("input_overlap", a)
                .value("output_overlap", b));
            }
        }
    }
    let mut phase: Vec<Option<C64>> = vec![None; n];
    for root in 0..n {
        if phase[root].is_some() {
            continue;
        }
        phase[root] = Some(C64::from(1.0));
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let pi = phase[i].unwrap();
            for j in 0..n {
                if phase[j].is_none() && pg[(i, j)].norm() > 1e-6 {
                    let pj = g[(i, j)] * pi / pg[(i, j)];
                    phase[j] = Some(pj / C64::from(pj.norm()));
                    stack.push(j);
                }
            }
        }
    }
    let outputs: Vec<CVec> = phis
        .iter()
        .zip(&phase)
        .map(|(p, ph)| p * ph.unwrap())
        .collect();
    let og = gram(&outputs);
    for i in 0..n {
        for j in i + 1..n {
            if (g[(i, j)] - og[(i, j)]).norm() > cfg.tau_gram {
                return Err(Certificate::new(
                    CertificateKind::RigidGramMismatch,
                    "no choice of phases reproduces the input Gram matrix",
                )
                .rows(&[i, j])
                .value("residual", (g[(i, j)] - og[(i, j)]).norm()));
            }
        }
    }
    Ok(QuantumWitness {
        row_input: rows.iter().map(|r| r.input).collect(),
        inputs: rows.iter().map(|r| r.ray.clone()).collect(),
        outputs,
        ancillas: vec![CVec::from_element(1, C64::from(1.0)); n],
    })
}

/// Fixed output rays with ancillas: the ancilla Gram matrix is forced to
/// `G ⊘ Φ` wherever `Φ` is nonzero. Forced entries of modulus one make two
/// ancillas equal up to a phase, so rows are grouped into classes sharing
/// one ancilla and the problem reduces to the Gram matrix between classes.
/// `Err(None)` means free entries remain and the zero completion was not
/// positive semidefinite.
fn rigid_with_ancilla(
    rows: &[Row],
    g: &CMat,
    phis: &[CVec],
    cfg: &OracleConfig,
) -> Result<QuantumWitness, Option<Certificate>> {
    let n = rows.len();
    let pg = gram(phis);
    let forced = |i: usize, j: usize| -> Option<C64> {
        (pg[(i, j)].norm() > cfg.tau_gram).then(|| g[(i, j)] / pg[(i, j)])
    };
    let not_psd = |detail: &str, i: usize, j: usize| {
        Some(
            Certificate::new(CertificateKind::AncillaGramNotPsd, detail.to_owned())
                .rows(&[i, j]),
        )
    };

    // a_i = phase[i] · b_class[i]
    let mut class: Vec<Option<usize>> = vec![None; n];
    let mut phase = vec![C64::from(1.0); n];
    let mut reps = Vec::new();
    for root in 0..n {
        if class[root].is_some() {
            continue;
        }
        let c = reps.len();
        reps.push(root);
        class[root] = Some(c);
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let Some(a) = forced(i, j) else { continue };
                if a.norm() > 1.0 + cfg.tau_gram {
                    return Err(not_psd("a forced ancilla overlap exceeds one", i, j));
                }
                if a.norm() < 1.0 - cfg.tau_gram || class[j].is_some() {
                    continue;
                }
                class[j] = Some(c);
                phase[j] = phase[i] * a / C64::from(a.norm());
                stack.push(j);
            }
        }
    }
    let class: Vec<usize> = class.into_iter().map(|c| c.unwrap()).collect();

    // <b_c|b_d> from every forced entry between the two classes.
    let k = reps.len();
    let mut b: Vec<Vec<Option<C64>>> = vec![vec![None; k]; k];
    for (c, row) in b.iter_mut().enumerate() {
        row[c] = Some(C64::from(1.0));
    }
    for i in 0..n {
        for j in 0..n {
            let Some(a) = forced(i, j) else { continue };
            let (c, d) = (class[i], class[j]);
            let v = phase[i] * a * phase[j].conj();
            match b[c][d] {
                Some(w) if (w - v).norm() > cfg.tau_gram => {
                    return Err(not_psd("forced ancilla overlaps disagree on their phases", i, j));
                }
                Some(_) => {}
                None => b[c][d] = Some(v),
            }
        }
    }
    let free = b.iter().flatten().any(Option::is_none);
    let bm = CMat::from_fn(k, k, |c, d| b[c][d].unwrap_or(C64::from(0.0)));
    let min_eig = min_eigenvalue(&bm);
    if min_eig >= -cfg.tau_psd {
        let class_states: Vec<CVec> = gram_factor(&bm)
            .into_iter()
            .map(|v| {
                let nv = v.norm();
                v / C64::from(nv)
            })
            .collect();
        let ancillas = (0..n).map(|i| &class_states[class[i]] * phase[i]).collect();
        return Ok(QuantumWitness {
            row_input: rows.iter().map(|r| r.input).collect(),
            inputs: rows.iter().map(|r| r.ray.clone()).collect(),
            outputs: phis.to_vec(),
            ancillas,
        });
    }
    if free {
        Err(None)
    } else {
        Err(Some(
            Certificate::new(
                CertificateKind::AncillaGramNotPsd,
                "the ancilla Gram matrix forced by the outputs is not positive semidefinite",
            )
            .value("min_eigenvalue", min_eig),
        ))
    }
}

/// Re-checks a witness against the task's own constraints.
pub fn validate_quantum(task: &Task, w: &QuantumWitness, cfg: &OracleConfig) -> bool {
    let Ok(rows) = expand(task) else { return false };
    if rows.len() != w.inputs.len() || w.outputs.len() != rows.len() || w.ancillas.len() != rows.len() {
        return false;
    }
    for (k, row) in rows.iter().enumerate() {
        if !same_ray(&row.ray, &w.inputs[k]) {
            return false;
        }
        let phi = &w.outputs[k];
        if (phi.norm() - 1.0).abs() > cfg.tau_gram || (w.ancillas[k].norm() - 1.0).abs() > cfg.tau_gram {
            return false;
        }
        if !row.alts.iter().any(|a| a.contains(phi)) {
            return false;
        }
    }
    gram_residual(w) <= cfg.tau_gram
}

/// `max_ij |<ψ_i|ψ_j> - <φ_i|φ_j><a_i|a_j>|`.
pub fn gram_residual(w: &QuantumWitness) -> f64 {
    let gi = gram(&w.inputs);
    let go = gram(&w.outputs);
    let ga = gram(&w.ancillas);
    let n = w.inputs.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((gi[(i, j)] - go[(i, j)] * ga[(i, j)]).norm());
        }
    }
    worst
}

fn task_seed(rows: &[Row], seed: u64) -> u64 {
    // FNV-1a over the rounded row data.
    let mut h: u64 = 0xcbf29ce484222325 ^ seed;
    let mut eat = |x: f64| {
        let q = (x * 1e9).round() as i64;
        for b in q.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    for r in rows {
        for z in r.ray.iter() {
            eat(z.re);
            eat(z.im);
        }
        for a in &r.alts {
            for v in a.basis() {
                for z in v.iter() {
                    eat(z.re);
                    eat(z.im);
                }
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Attribute, Substrate};
    use crate::linalg::{basis_vector, c};

    fn plus() -> CVec {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CVec::from_vec(vec![c(h, 0.0), c(h, 0.0)])
    }

    fn ray(s: &Substrate, v: CVec) -> AttrRef {
        Attribute::ray(s, v).unwrap().into_ref()
    }

    #[test]
    fn swap_of_non_orthogonal_pair_is_possible() {
        let q = Substrate::quantum("q", 2).unwrap();
        let (z, p) = (ray(&q, basis_vector(2, 0)), ray(&q, plus()));
        let t = Task::new(vec![(z.clone(), p.clone()), (p, z)]).unwrap();
        let v = quantum_possible(&t, false, &OracleConfig::default()).unwrap();
        assert!(v.is_possible());
        assert!(validate_quantum(&t, v.quantum_witness().unwrap(), &OracleConfig::default()));
    }

    fn fourier(d: usize, k: usize) -> CVec {
        let w = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
        CVec::from_fn(d, |j, _| C64::from_polar(1.0 / (d as f64).sqrt(), w * j as f64))
    }

    #[test]
    fn swapping_basis_states_under_fourier_rays_has_no_ancilla() {
        let s = Substrate::quantum("t", 3).unwrap();
        let fixed: Vec<AttrRef> = (0..3).map(|k| ray(&s, fourier(3, k))).collect();
        let (e0, e1, e2) = (ray(&s, basis_vector(3, 0)), ray(&s, basis_vector(3, 1)), ray(&s, basis_vector(3, 2)));
        let mut pairs = vec![(e0.clone(), e1.clone()), (e1, e0), (e2.clone(), e2)];
        pairs.extend(fixed.iter().map(|f| (f.clone(), f.clone())));
        let t = Task::new(pairs).unwrap();
        let v = quantum_possible(&t, true, &OracleConfig::default()).unwrap();
        assert_eq!(v.certificate_kind(), Some(CertificateKind::AncillaGramNotPsd));
    }

    #[test]
    fn ancilla_classes_rebuild_a_valid_witness() {
        // X on a qubit fixes |+> and flips the sign of |->.
        let q = Substrate::quantum("q", 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = CVec::from_vec(vec![c(h, 0.0), c(-h, 0.0)]);
        let (z0, z1) = (ray(&q, basis_vector(2, 0)), ray(&q, basis_vector(2, 1)));
        let (p, m) = (ray(&q, plus()), ray(&q, minus));
        let t = Task::new(vec![(z0.clone(), z1.clone()), (z1, z0), (p.clone(), p), (m.clone(), m)]).unwrap();
        let cfg = OracleConfig::default();
        let v = quantum_possible(&t, true, &cfg).unwrap();
        assert!(v.is_possible());
        assert!(validate_quantum(&t, v.quantum_witness().unwrap(), &cfg));
    }

    #[test]
    fn distinguishing_zero_and_plus_is_forced_orthogonality() {
        let q = Substrate::quantum("q", 2).unwrap();
        let t = Task::new(vec![
            (ray(&q, basis_vector(2, 0)), ray(&q, basis_vector(2, 0))),
            (ray(&q, plus()), ray(&q, basis_vector(2, 1))),
        ])
        .unwrap();
        let v = quantum_possible(&t, true, &OracleConfig::default()).unwrap();
        let cert = v.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::ForcedOrthogonality);
        assert!((cert.get("overlap").unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn erasure_needs_side_effects() {
        let q = Substrate::quantum("q", 2).unwrap();
        let zero = ray(&q, basis_vector(2, 0));
        let t = Task::new(vec![(zero.clone(), zero.clone()), (ray(&q, plus()), zero)]).unwrap();
        let cfg = OracleConfig::default();
        let off = quantum_possible(&t, false, &cfg).unwrap();
        assert_eq!(off.certificate_kind(), Some(CertificateKind::RigidGramMismatch));
        let on = quantum_possible(&t, true, &cfg).unwrap();
        let w = on.quantum_witness().unwrap();
        assert!((inner(&w.ancillas[0], &w.ancillas[1]).norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn subspace_outputs_go_through_the_solver() {
        let q = Substrate::quantum("q", 3).unwrap();
        let plane = Attribute::subspace(&q, vec![basis_vector(3, 0), basis_vector(3, 1)]).unwrap().into_ref();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = ray(&q, CVec::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(h, 0.0)]));
        let b = ray(&q, basis_vector(3, 1));
        let t = Task::new(vec![(a, plane.clone()), (b, plane)]).unwrap();
        let v = quantum_possible(&t, false, &OracleConfig::default()).unwrap();
        assert!(v.is_possible(), "{v:?}");
    }
}
