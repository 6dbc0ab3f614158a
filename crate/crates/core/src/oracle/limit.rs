use crate::algebra::{AttrRef, Attribute, Task};
use crate::error::{KitError, KitResult};
use crate::linalg::basis_vector;
use crate::oracle::{
    possible_with_side_effects, Certificate, CertificateKind, LimitEvidence, OracleConfig, Verdict,
};

/// A sequence of tasks indexed by `n ≥ 1`.
pub enum TaskFamily {
    /// Distinguishing `x^(n)` from `y^(n)` on `n` copies of the substrate.
    EnsembleDistinguish { x: AttrRef, y: AttrRef },
    /// An arbitrary family; only finite-n possibility can be recognised.
    Explicit(Box<dyn Fn(usize) -> KitResult<Task>>),
}

/// `c^n` for `n = 1..=n_probe`: the Gram residual lower bound of the
/// n-copy distinguishing task, whose outputs are forced orthogonal.
pub fn ensemble_defects(base_overlap: f64, n_probe: usize) -> Vec<f64> {
    (1..=n_probe as i32).map(|n| base_overlap.powi(n)).collect()
}

pub fn limit_verdict(family: &TaskFamily, cfg: &OracleConfig) -> KitResult<Verdict> {
    match family {
        TaskFamily::EnsembleDistinguish { x, y } => ensemble(x, y, cfg),
        TaskFamily::Explicit(f) => {
            for n in 1..=cfg.n_probe {
                let v = possible_with_side_effects(&f(n)?, cfg)?;
                if v.is_possible() {
                    return Ok(v.with_note(format!("possible at n = {n}")));
                }
            }
            Ok(Verdict::unknown("unrecognised task family"))
        }
    }
}

fn ensemble(x: &AttrRef, y: &AttrRef, cfg: &OracleConfig) -> KitResult<Verdict> {
    if x.substrate() != y.substrate() {
        return Err(KitError::DimensionMismatch("ensemble attributes on different substrates".into()));
    }
    let s = x.substrate();
    if !x.is_disjoint_from(y) || x.is_empty() || y.is_empty() {
        let overlap = if s.is_quantum() { x.max_overlap(y) } else { 1.0 };
        return Ok(Verdict::impossible(
            Certificate::new(
                CertificateKind::EnsembleOverlapUnity,
                "attributes share a state, so every copy count leaves the overlap at 1",
            )
            .value("overlap", overlap),
        ));
    }
    if !s.is_quantum() {
        let t = Task::new(vec![(x.clone(), x.clone()), (y.clone(), y.clone())])?;
        return Ok(possible_with_side_effects(&t, cfg)?.with_note("possible at n = 1"));
    }
    // Single copy: try sending x, y onto two orthogonal basis rays.
    let e0 = Attribute::ray(s, basis_vector(s.size(), 0))?.into_ref();
    let e1 = Attribute::ray(s, basis_vector(s.size(), 1))?.into_ref();
    let single = possible_with_side_effects(&Task::new(vec![(x.clone(), e0), (y.clone(), e1)])?, cfg)?;
    if single.is_possible() {
        return Ok(single.with_note("possible at n = 1"));
    }
    let c = x.max_overlap(y);
    let defects = ensemble_defects(c, cfg.n_probe);
    let decreasing = defects.windows(2).all(|w| w[1] < w[0]);
    if c < 1.0 - cfg.tau_gram && decreasing {
        Ok(Verdict::in_limit(LimitEvidence {
            base_overlap: c,
            copies: (1..=cfg.n_probe).collect(),
            defects,
        }))
    } else {
        Ok(Verdict::unknown("defect does not decay over the probed copies"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Substrate;
    use crate::linalg::c;
    use crate::linalg::CVec;

    #[test]
    fn zero_versus_plus_decays_geometrically() {
        let q = Substrate::quantum("q", 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = Attribute::ray(&q, basis_vector(2, 0)).unwrap().into_ref();
        let y = Attribute::ray(&q, CVec::from_vec(vec![c(h, 0.0), c(h, 0.0)])).unwrap().into_ref();
        let v = limit_verdict(&TaskFamily::EnsembleDistinguish { x, y }, &OracleConfig::default()).unwrap();
        let ev = v.limit.unwrap();
        assert!((ev.defects[19] - 2f64.powi(-10)).abs() < 1e-12);
    }

    #[test]
    fn identical_attributes_never_separate() {
        let q = Substrate::quantum("q", 2).unwrap();
        let x = Attribute::ray(&q, basis_vector(2, 0)).unwrap().into_ref();
        let v = limit_verdict(
            &TaskFamily::EnsembleDistinguish { x: x.clone(), y: x },
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(v.certificate_kind(), Some(CertificateKind::EnsembleOverlapUnity));
    }
}
