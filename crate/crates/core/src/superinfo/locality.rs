use serde::Serialize;

use crate::algebra::{transpose, AttrRef, Attribute, Substrate, Task, Variable};
use crate::error::{KitError, KitResult};
use crate::info::{is_information_variable, measurement_task, perp, MeasurementSpec, Outcome};
use crate::linalg::{basis_vector, c, extend_isometry, inner, kron, same_ray, CMat, CVec};
use crate::model::Model;
use crate::oracle::{possible, possible_with_side_effects, OracleConfig, Verdict};
use crate::sim::{cnot, StateVector};

/// Whether `c` can be performed reversibly on every state of `w`: some
/// task containing `c`, defined on `w`, is possible together with its
/// transpose.
pub fn coherence_check(c: &Task, w: &[AttrRef], cfg: &OracleConfig) -> KitResult<Outcome> {
    if c.substrate().is_quantum() {
        quantum_coherence(c, w, cfg)
    } else {
        Ok(classical_coherence(c, w))
    }
}

fn quantum_coherence(c: &Task, w: &[AttrRef], cfg: &OracleConfig) -> KitResult<Outcome> {
    let v = possible(c, cfg)?;
    let Some(wit) = v.quantum_witness() else {
        return Ok(Outcome::new(v.as_bool().map(|_| false), Some(v), "the computation itself is not possible reversibly"));
    };
    let Some(u) = extend_isometry(&wit.inputs, &wit.outputs, 1e-7) else {
        return Ok(Outcome::new(None, None, "witness does not extend to a unitary"));
    };
    let s = c.substrate();
    let mut rays: Vec<CVec> = wit.inputs.clone();
    for a in w {
        for r in a.spanning_rays() {
            if !rays.iter().any(|q| same_ray(q, &r)) {
                rays.push(r);
            }
        }
    }
    let pairs = rays
        .iter()
        .map(|r| Ok((Attribute::ray(s, r.clone())?.into_ref(), Attribute::ray(s, &u * r)?.into_ref())))
        .collect::<KitResult<Vec<_>>>()?;
    let extension = Task::new(pairs)?;
    let forward = possible(&extension, cfg)?;
    let backward = possible(&transpose(&extension)?, cfg)?;
    match (forward.as_bool(), backward.as_bool()) {
        (Some(true), Some(true)) => Ok(Outcome::new(
            Some(true),
            Some(forward),
            format!("unitary extension on {} rays", rays.len()),
        )),
        _ => Ok(Outcome::new(None, Some(backward), "extension undecided")),
    }
}

/// Reversible classical extension exists iff the input states can be
/// matched injectively into their allowed outputs.
fn classical_coherence(c: &Task, _w: &[AttrRef]) -> Outcome {
    let mut states: Vec<usize> = Vec::new();
    let mut allowed: Vec<Vec<usize>> = Vec::new();
    for x in c.inputs() {
        let targets: Vec<usize> = c.outputs_for(&x).iter().flat_map(|y| y.state_set()).collect();
        for s in x.state_set() {
            states.push(s);
            allowed.push(targets.clone());
        }
    }
    let n = c.substrate().size();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, allowed: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &t in &allowed[i] {
            if seen[t] {
                continue;
            }
            seen[t] = true;
            if owner[t].is_none_or(|j| augment(j, allowed, owner, seen)) {
                owner[t] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..states.len() {
        let mut seen = vec![false; n];
        if !augment(i, &allowed, &mut owner, &mut seen) {
            return Outcome::new(
                Some(false),
                None,
                format!("state {} cannot be given its own image", states[i]),
            );
        }
    }
    Outcome::new(Some(true), None, "injective assignment extends to a permutation")
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    #[serde(serialize_with = "crate::oracle::ser_vecs")]
    pub psi: Vec<CVec>,
    /// `|<ψ₁|CNOT(0′,0)>|` for the extension obtained from the oracle.
    pub psi1_cnot_overlap: f64,
    pub overlap_00: f64,
    pub overlap_11: f64,
    /// Each claimed non-distinguishability and whether it holds.
    pub contradictions: Vec<(String, Option<bool>)>,
    pub union_task: Verdict,
    pub union_transpose: Verdict,
    pub coherence: Outcome,
    pub c_information: Outcome,
    pub d_information: Outcome,
    pub c_measurement: Verdict,
    /// The conditional protocol leaves a sharp pointer on every attribute of C.
    pub c_protocol_sharp: bool,
    pub holds: Option<bool>,
}

/// The two-qubit construction of locally inaccessible information.
pub fn verify_locally_inaccessible(model: &Model, cfg: &OracleConfig) -> KitResult<LocalityReport> {
    let pair = model
        .substrates()
        .iter()
        .find(|s| {
            s.is_quantum() && s.components().len() == 2 && s.components().iter().all(|c| c.size() == 2)
        })
        .ok_or_else(|| KitError::PreconditionFailed("no composite of two qubits in the model".into()))?
        .clone();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = basis_vector(2, 0);
    let one = basis_vector(2, 1);
    let p = CVec::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
    let m = CVec::from_vec(vec![c(h, 0.0), c(-h, 0.0)]);
    let ray = |v: CVec| -> KitResult<AttrRef> { Ok(Attribute::ray(&pair, v)?.into_ref()) };
    let local = |s: &Substrate, v: &CVec| -> KitResult<AttrRef> { Ok(Attribute::ray(s, v.clone())?.into_ref()) };

    // T: controlled-not on A1 × A2.
    let cnot_image = |a: &CVec, b: &CVec| {
        let mut st = StateVector::product(&[a.clone(), b.clone()]);
        cnot(&mut st, 0, 1);
        st.amplitudes().clone()
    };
    let basis_in = [(&zero, &zero), (&one, &zero), (&zero, &one), (&one, &one)];
    let t_pairs = basis_in
        .iter()
        .map(|(a, b)| Ok((ray(kron(a, b))?, ray(cnot_image(a, b))?)))
        .collect::<KitResult<Vec<_>>>()?;
    let t = Task::new(t_pairs.clone())?;

    // Extend T's witness to a unitary and read off ψ on B1 × A2.
    let tv = possible(&t, cfg)?;
    let wit = tv
        .quantum_witness()
        .ok_or_else(|| KitError::TheoremViolation("controlled-not is not possible".into()))?;
    let u: CMat = extend_isometry(&wit.inputs, &wit.outputs, 1e-7)
        .ok_or_else(|| KitError::TheoremViolation("controlled-not witness is not an isometry".into()))?;
    let b_in = [(&p, &zero), (&p, &one), (&m, &zero), (&m, &one)];
    let psi: Vec<CVec> = b_in.iter().map(|(a, b)| &u * kron(a, b)).collect();
    let psi1_cnot_overlap = inner(&psi[0], &cnot_image(&p, &zero)).norm();

    let mut union_pairs = t_pairs;
    for ((a, b), v) in b_in.iter().zip(&psi) {
        union_pairs.push((ray(kron(a, b))?, ray(v.clone())?));
    }
    let union = Task::new(union_pairs)?;
    let union_task = possible(&union, cfg)?;
    let union_transpose = possible(&transpose(&union)?, cfg)?;

    let w: Vec<AttrRef> = basis_in
        .iter()
        .chain(b_in.iter())
        .map(|(a, b)| ray(kron(a, b)))
        .collect::<KitResult<_>>()?;
    let coherence = coherence_check(&t, &w, cfg)?;

    let psi1 = ray(psi[0].clone())?;
    let overlap_00 = inner(&psi[0], &kron(&zero, &zero)).norm();
    let overlap_11 = inner(&psi[0], &kron(&one, &one)).norm();
    let s1 = &pair.components()[0];
    let checks: Vec<(String, AttrRef, AttrRef)> = vec![
        ("ψ₁ ⊥ (0,0)".into(), psi1.clone(), ray(kron(&zero, &zero))?),
        ("(0′,0) ⊥ (0,0)".into(), ray(kron(&p, &zero))?, ray(kron(&zero, &zero))?),
        ("0′ ⊥ 0".into(), local(s1, &p)?, local(s1, &zero)?),
        ("ψ₁ ⊥ (1,1)".into(), psi1, ray(kron(&one, &one))?),
        ("(0′,0) ⊥ (1,0)".into(), ray(kron(&p, &zero))?, ray(kron(&one, &zero))?),
        ("0′ ⊥ 1".into(), local(s1, &p)?, local(s1, &one)?),
    ];
    let mut contradictions = Vec::new();
    for (name, a, b) in checks {
        contradictions.push((name, perp(&a, &b, cfg)?));
    }

    let c_var = Variable::new(vec![
        ray(kron(&zero, &one))?,
        ray(kron(&one, &one))?,
        ray(kron(&p, &zero))?,
        ray(kron(&m, &zero))?,
    ])?
    .with_labels(vec!["(0,1)".into(), "(1,1)".into(), "(0′,0)".into(), "(1′,0)".into()])?;
    let d_var = Variable::new(vec![
        ray(kron(&zero, &one))?,
        ray(kron(&one, &zero))?,
        ray(psi[0].clone())?,
        ray(psi[2].clone())?,
    ])?
    .with_labels(vec!["(0,1)".into(), "(1,0)".into(), "ψ₁".into(), "ψ₃".into()])?;
    let c_information = is_information_variable(&c_var, model, cfg)?;
    let d_information = is_information_variable(&d_var, model, cfg)?;
    let spec = MeasurementSpec::non_perturbing(&c_var, "M")?;
    let c_measurement = possible_with_side_effects(&measurement_task(&spec)?, cfg)?;
    let c_protocol_sharp = conditional_protocol_is_sharp(&[
        (zero.clone(), one.clone()),
        (one.clone(), one.clone()),
        (p.clone(), zero.clone()),
        (m.clone(), zero.clone()),
    ]);

    let mut holds = Some(
        psi1_cnot_overlap >= 1.0 - 1e-9
            && (overlap_00 - h).abs() <= 1e-9
            && (overlap_11 - h).abs() <= 1e-9
            && union_task.is_possible()
            && union_transpose.is_possible()
            && c_protocol_sharp
            && c_measurement.is_possible(),
    );
    let decided = [&coherence, &c_information, &d_information]
        .iter()
        .all(|o| o.value.is_some())
        && contradictions.iter().all(|(_, v)| v.is_some());
    if holds == Some(true) {
        let ok = coherence.value != Some(false)
            && c_information.value != Some(false)
            && d_information.value != Some(false)
            && contradictions.iter().all(|(_, v)| *v != Some(true));
        if !ok {
            holds = Some(false);
        } else if !decided {
            holds = None;
        }
    }
    Ok(LocalityReport {
        psi,
        psi1_cnot_overlap,
        overlap_00,
        overlap_11,
        contradictions,
        union_task,
        union_transpose,
        coherence,
        c_information,
        d_information,
        c_measurement,
        c_protocol_sharp,
        holds,
    })
}

/// Measure A₂ into a pointer, then A₁ or B₁ depending on the outcome;
/// every attribute of C must leave the pointer sharp on its own label.
fn conditional_protocol_is_sharp(c_states: &[(CVec, CVec)]) -> bool {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = CMat::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
    c_states.iter().enumerate().all(|(k, (a, b))| {
        let mut st = StateVector::product(&[a.clone(), b.clone(), basis_vector(4, 0)]);
        st.apply_controlled_local(1, 0, 0, &had);
        st.apply_classical(&[0, 1, 2], |d| {
            let label = if d[1] == 1 { d[0] } else { 2 + d[0] };
            vec![d[0], d[1], (d[2] + label) % 4]
        });
        st.apply_controlled_local(1, 0, 0, &had);
        st.marginal(2)[k] >= 1.0 - 1e-9
    })
}
