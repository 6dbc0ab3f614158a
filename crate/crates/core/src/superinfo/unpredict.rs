use serde::Serialize;

use crate::algebra::{validate_network, AttrRef, Attribute, Network, Permutation, Substrate, Task, Variable};
use crate::error::{KitError, KitResult};
use crate::info::{bar_bar, is_maximal, perp, pointer, pointer_medium};
use crate::linalg::{projection_norm, CVec};
use crate::oracle::{possible, possible_with_side_effects, OracleConfig, Verdict};
use crate::sim::{basis_change, StateVector};

/// `χ_y`, `X_y` and the checks that make the outcome of measuring `X` on
/// `y` unpredictable while `{χ̿_y, χ̄_y}` is sharp.
#[derive(Clone, Debug)]
pub struct UnpredictabilityCertificate {
    pub x_var: Variable,
    pub y: AttrRef,
    pub chi_y: AttrRef,
    pub x_y: Variable,
    /// How far `y` sticks out of `χ̿_y` (0 when contained).
    pub containment_residual: f64,
    /// No single `x ∈ X` contains `y`.
    pub no_sharp_prediction: bool,
}

impl UnpredictabilityCertificate {
    pub fn x_y_size(&self) -> usize {
        self.x_y.len()
    }
}

pub fn unpredictability_certificate(
    x_var: &Variable,
    y: &AttrRef,
    cfg: &OracleConfig,
) -> KitResult<UnpredictabilityCertificate> {
    if !is_maximal(x_var) {
        return Err(KitError::PreconditionFailed("X is not maximal".into()));
    }
    if y.is_empty() || x_var.attributes().iter().any(|x| !x.is_disjoint_from(y)) {
        return Err(KitError::PreconditionFailed(format!(
            "`{}` is not disjoint from every attribute of X",
            y.describe()
        )));
    }
    let mut idx = Vec::new();
    for (i, x) in x_var.attributes().iter().enumerate() {
        match perp(x, y, cfg)? {
            Some(false) => idx.push(i),
            Some(true) => {}
            None => return Err(KitError::Unrepresentable(format!("`{}` ⊥ y undecided", x.describe()))),
        }
    }
    if idx.len() < 2 {
        return Err(KitError::TheoremViolation(format!(
            "X_y has {} attribute(s); at least two are required",
            idx.len()
        )));
    }
    let x_y = x_var.subset(&idx)?;
    let chi_y = x_y.union().into_ref();
    let closure = bar_bar(&chi_y);
    let containment_residual = if y.is_quantum() {
        let basis = closure.span_basis();
        y.spanning_rays()
            .iter()
            .map(|r| 1.0 - projection_norm(r, &basis))
            .fold(0.0, f64::max)
    } else if y.is_subset_of(&closure) {
        0.0
    } else {
        1.0
    };
    let no_sharp_prediction = x_var.attributes().iter().all(|x| !y.is_subset_of(x));
    Ok(UnpredictabilityCertificate {
        x_var: x_var.clone(),
        y: y.clone(),
        chi_y,
        x_y,
        containment_residual,
        no_sharp_prediction,
    })
}

/// `∪_{x∈X_y} {(x, x₀) → (x, 'x')} ∪ {(y, x₀) → (y, k)}` with `k` the
/// whole pointer space, so the verdict covers every `k`.
pub fn perturbation_task(x_y: &Variable, y: &AttrRef, cfg: &OracleConfig) -> KitResult<(Task, Verdict)> {
    if x_y.len() < 2 {
        return Err(KitError::PreconditionFailed(format!("X_y has {} attribute(s)", x_y.len())));
    }
    let medium = pointer_medium("M", x_y.len(), x_y.substrate().is_quantum())?;
    let x0 = pointer(&medium, 0)?;
    let mut pairs = Vec::new();
    for (i, x) in x_y.attributes().iter().enumerate() {
        pairs.push((
            Attribute::product(&[x.clone(), x0.clone()])?.into_ref(),
            Attribute::product(&[x.clone(), pointer(&medium, i)?])?.into_ref(),
        ));
    }
    let k = Attribute::full(&medium).into_ref();
    pairs.push((
        Attribute::product(&[y.clone(), x0])?.into_ref(),
        Attribute::product(&[y.clone(), k])?.into_ref(),
    ));
    let task = Task::new(pairs)?;
    let verdict = possible_with_side_effects(&task, cfg)?;
    Ok((task, verdict))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsecutiveReport {
    /// Indices of `X_y` within `X`.
    pub x_y: Vec<usize>,
    pub permutation: Vec<usize>,
    /// Probability that `R` reads 'true'.
    pub r_true: f64,
    /// `1 - r_true`.
    pub deviation: f64,
    pub m_max: f64,
    pub m_prime_max: f64,
    pub r_sharp_true: bool,
    pub m_sharp: bool,
    pub m_prime_sharp: bool,
    pub flattened_pairs: usize,
    pub flattened: Verdict,
}

/// Two copy measurers of `X` into `M` and `M′`, the permutation computer on
/// `M` (identity on `X_y`, a cyclic shift elsewhere) and the equality
/// comparator into `R`; flattened as a network and simulated on `y`.
pub fn consecutive_measurement_network(
    x_var: &Variable,
    y: &AttrRef,
    cfg: &OracleConfig,
) -> KitResult<(Network, ConsecutiveReport)> {
    let s = x_var.substrate();
    let d = s.size();
    if !s.is_quantum() {
        return Err(KitError::KindMismatch("consecutive measurements are simulated on quantum media".into()));
    }
    let rays: Vec<CVec> = x_var
        .attributes()
        .iter()
        .map(|a| a.single_ray())
        .collect::<Option<_>>()
        .filter(|r: &Vec<CVec>| r.len() == d)
        .ok_or_else(|| KitError::PreconditionFailed("X must be a basis of single rays".into()))?;
    let yv = y
        .single_ray()
        .ok_or_else(|| KitError::PreconditionFailed("y must be a single ray".into()))?;
    let x_y: Vec<usize> = (0..d)
        .filter(|&i| crate::linalg::inner(&rays[i], &yv).norm() > cfg.tau_gram)
        .collect();
    let rest: Vec<usize> = (0..d).filter(|i| !x_y.contains(i)).collect();
    if rest.len() == 1 {
        return Err(KitError::NoFixedPointFreePermutation(1));
    }
    let mut perm: Vec<usize> = (0..d).collect();
    for (k, &i) in rest.iter().enumerate() {
        perm[i] = rest[(k + 1) % rest.len()];
    }
    let pi = Permutation::new(perm.clone())?;

    let m = Substrate::quantum("M", d)?;
    let mp = Substrate::quantum("M′", d)?;
    let r = Substrate::quantum("R", 2)?;
    let network = build_network(x_var, &m, &mp, &r, &pi)?;
    let flattened_task = validate_network(&network)?;
    let flattened = possible(&flattened_task, cfg)?;

    let mut st = StateVector::product(&[yv, basis(d, 0), basis(d, 0), basis(2, 0)]);
    let v = basis_change(&rays);
    let vdag = v.adjoint();
    for record in [1, 2] {
        st.apply_local(0, &vdag);
        st.apply_classical(&[0, record], |q| vec![q[0], (q[1] + q[0]) % d]);
        st.apply_local(0, &v);
    }
    st.apply_classical(&[1], |q| vec![perm[q[0]]]);
    st.apply_classical(&[1, 2, 3], |q| vec![q[0], q[1], q[2] ^ usize::from(q[0] == q[1])]);

    let r_true = st.marginal(3)[1];
    let m_max = st.marginal(1).into_iter().fold(0.0, f64::max);
    let m_prime_max = st.marginal(2).into_iter().fold(0.0, f64::max);
    let sharp = |p: f64| p >= 1.0 - cfg.tau_sharp;
    let report = ConsecutiveReport {
        x_y,
        permutation: perm,
        r_true,
        deviation: (1.0 - r_true).abs(),
        m_max,
        m_prime_max,
        r_sharp_true: sharp(r_true),
        m_sharp: sharp(m_max),
        m_prime_sharp: sharp(m_prime_max),
        flattened_pairs: flattened_task.len(),
        flattened,
    };
    Ok((network, report))
}

fn basis(d: usize, k: usize) -> CVec {
    crate::linalg::basis_vector(d, k)
}

fn build_network(x_var: &Variable, m: &Substrate, mp: &Substrate, r: &Substrate, pi: &Permutation) -> KitResult<Network> {
    let d = x_var.len();
    let measurer = |medium: &Substrate| -> KitResult<Task> {
        let m0 = pointer(medium, 0)?;
        let pairs = x_var
            .attributes()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                Ok((
                    Attribute::product(&[x.clone(), m0.clone()])?.into_ref(),
                    Attribute::product(&[x.clone(), pointer(medium, i)?])?.into_ref(),
                ))
            })
            .collect::<KitResult<Vec<_>>>()?;
        Task::new(pairs)
    };
    let computer = Task::new(
        (0..d)
            .map(|i| Ok((pointer(m, i)?, pointer(m, pi.apply(i))?)))
            .collect::<KitResult<Vec<_>>>()?,
    )?;
    let r0 = pointer(r, 0)?;
    let mut cmp = Vec::new();
    for v in 0..d {
        for w in 0..d {
            let (pv, pw) = (pointer(m, v)?, pointer(mp, w)?);
            cmp.push((
                Attribute::product(&[pv.clone(), pw.clone(), r0.clone()])?.into_ref(),
                Attribute::product(&[pv, pw, pointer(r, usize::from(v == w))?])?.into_ref(),
            ));
        }
    }
    let mut n = Network::new();
    let a = n.add_node("measure X into M", measurer(m)?);
    let b = n.add_node("measure X into M′", measurer(mp)?);
    let c = n.add_node("relabel M", computer);
    let e = n.add_node("compare M, M′ into R", Task::new(cmp)?);
    n.connect((a, 0), (b, 0));
    n.connect((a, 1), (c, 0));
    n.connect((c, 0), (e, 0));
    n.connect((b, 1), (e, 1));
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, c};

    fn number_basis(s: &Substrate) -> Variable {
        Variable::new(
            (0..s.size())
                .map(|k| Attribute::ray(s, basis_vector(s.size(), k)).unwrap().into_ref())
                .collect(),
        )
        .unwrap()
    }

    fn uniform(s: &Substrate, levels: usize) -> AttrRef {
        let a = 1.0 / (levels as f64).sqrt();
        let v = CVec::from_fn(s.size(), |k, _| c(if k < levels { a } else { 0.0 }, 0.0));
        Attribute::ray(s, v).unwrap().into_ref()
    }

    #[test]
    fn qubit_plus_certificate_and_perturbation() {
        let q = Substrate::quantum("q", 2).unwrap();
        let cfg = OracleConfig::default();
        let z = number_basis(&q);
        let plus = uniform(&q, 2);
        let cert = unpredictability_certificate(&z, &plus, &cfg).unwrap();
        assert_eq!(cert.x_y_size(), 2);
        assert!(cert.containment_residual < 1e-12 && cert.no_sharp_prediction);
        let (_, v) = perturbation_task(&cert.x_y, &plus, &cfg).unwrap();
        assert_eq!(
            v.certificate_kind(),
            Some(crate::oracle::CertificateKind::UnitNormConflict)
        );
    }

    #[test]
    fn photon_number_coarse_boolean_is_sharp() {
        let s = Substrate::quantum("cavity", 4).unwrap();
        let cfg = OracleConfig::default();
        let cert = unpredictability_certificate(&number_basis(&s), &uniform(&s, 3), &cfg).unwrap();
        assert_eq!(cert.x_y_size(), 3);
        assert!(cert.containment_residual < 1e-12);
    }

    #[test]
    fn sharp_input_is_rejected() {
        let q = Substrate::quantum("q", 2).unwrap();
        let z = number_basis(&q);
        let zero = z.attributes()[0].clone();
        assert!(matches!(
            unpredictability_certificate(&z, &zero, &OracleConfig::default()),
            Err(KitError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn consecutive_measurements_agree_on_a_qubit() {
        let q = Substrate::quantum("q", 2).unwrap();
        let (_, rep) = consecutive_measurement_network(&number_basis(&q), &uniform(&q, 2), &OracleConfig::default()).unwrap();
        assert!(rep.r_sharp_true);
        assert!(!rep.m_sharp && !rep.m_prime_sharp);
        assert!(rep.deviation < 1e-9);
        assert!(rep.flattened.is_possible());
    }

    #[test]
    fn one_leftover_label_has_no_derangement() {
        let s = Substrate::quantum("cavity", 4).unwrap();
        let r = consecutive_measurement_network(&number_basis(&s), &uniform(&s, 3), &OracleConfig::default());
        assert!(matches!(r, Err(KitError::NoFixedPointFreePermutation(1))));
        let s5 = Substrate::quantum("cavity5", 5).unwrap();
        let (_, rep) =
            consecutive_measurement_network(&number_basis(&s5), &uniform(&s5, 3), &OracleConfig::default()).unwrap();
        assert!(rep.r_sharp_true && !rep.m_sharp);
    }

    #[test]
    fn sharp_case_on_a_qutrit() {
        let s = Substrate::quantum("t", 3).unwrap();
        let (_, rep) =
            consecutive_measurement_network(&number_basis(&s), &uniform(&s, 1), &OracleConfig::default()).unwrap();
        assert!(rep.r_sharp_true && rep.m_sharp && rep.m_prime_sharp);
    }
}
