use crate::algebra::{AttrRef, Variable};
use crate::error::{KitError, KitResult};
use crate::info::{is_maximal, perp};
use crate::model::Model;
use crate::oracle::{OracleConfig, VerdictKind};
use crate::superinfo::{
    consecutive_measurement_network, detect_superinformation, perturbation_task, unpredictability_certificate,
    verify_complementarity, verify_locally_inaccessible, verify_no_cloning, verify_undetectable_sharpness,
    NamedVerdict, SuperinfoWitness, TheoremCheck,
};

pub const SECTIONS: [&str; 8] = ["8.1", "8.2", "8.3", "8.4", "8.5", "8.6", "8.7", "8.9"];

/// Runs the checks of one section on `model`. A contradicted claim is a
/// `TheoremViolation` error.
pub fn run_section(section: &str, model: &Model, cfg: &OracleConfig) -> KitResult<TheoremCheck> {
    if section == "8.9" {
        let rep = verify_locally_inaccessible(model, cfg)?;
        let mut check = TheoremCheck::new("8.9", "{(0,1), ψ₁} holds locally inaccessible information")
            .value("psi1_cnot_overlap", rep.psi1_cnot_overlap)
            .value("overlap_00", rep.overlap_00)
            .value("overlap_11", rep.overlap_11);
        check.holds = rep.holds;
        check.note = rep
            .contradictions
            .iter()
            .map(|(n, v)| format!("{n}: {}", v.map_or("undecided".into(), |b| b.to_string())))
            .collect::<Vec<_>>()
            .join("; ");
        check.verdicts.push(NamedVerdict::new("T ∪ T′", rep.union_task));
        check.verdicts.push(NamedVerdict::new("(T ∪ T′)∼", rep.union_transpose));
        check.verdicts.push(NamedVerdict::new("measure C", rep.c_measurement));
        if rep.holds == Some(false) {
            return Err(KitError::TheoremViolation(format!("8.9: {}", check.note)));
        }
        return Ok(check);
    }
    if !SECTIONS.contains(&section) {
        return Err(KitError::UnknownName(section.to_owned()));
    }
    let w = detect_superinformation(model, cfg)?
        .witness
        .ok_or_else(|| KitError::PreconditionFailed("the model has no superinformation witness".into()))?;
    match section {
        "8.1" => {
            let mut check = TheoremCheck::new("8.1", "some x ∈ X and y ∈ Y are not distinguishable")
                .value("pair_overlap", w.pair_overlap);
            check.note = format!("{} ⊥̸ {}", w.pair.0.describe(), w.pair.1.describe());
            if perp(&w.pair.0, &w.pair.1, cfg)? != Some(false) {
                return Err(KitError::TheoremViolation("8.1 pair is distinguishable".into()));
            }
            Ok(check)
        }
        "8.2" => verify_undetectable_sharpness(&w, cfg),
        "8.3" => verify_no_cloning(&w, model, cfg),
        "8.4" => verify_complementarity(&w, cfg),
        _ => {
            let (x, y) = maximal_and_companion(&w)?;
            let cert = unpredictability_certificate(&x, &y, cfg)?;
            match section {
                "8.5" => {
                    if cert.containment_residual > 1e-9 || !cert.no_sharp_prediction {
                        return Err(KitError::TheoremViolation("8.5 certificate does not check".into()));
                    }
                    let mut check = TheoremCheck::new("8.5", "measuring X on y is unpredictable yet {χ̿_y, χ̄_y} is sharp")
                        .value("x_y_size", cert.x_y_size() as f64)
                        .value("containment_residual", cert.containment_residual);
                    check.note = format!("X_y = {{{}}}", cert.x_y.labels().join(", "));
                    Ok(check)
                }
                "8.6" => {
                    let (_, verdict) = perturbation_task(&cert.x_y, &y, cfg)?;
                    let mut check = TheoremCheck::new("8.6", "measuring X_y must perturb y, for every k");
                    check.expect_kind("perturbation task", verdict, VerdictKind::Impossible)?;
                    Ok(check)
                }
                _ => {
                    let (_, rep) = consecutive_measurement_network(&x, &y, cfg)?;
                    let holds = rep.r_sharp_true && rep.deviation < 1e-9 && !rep.m_sharp && !rep.m_prime_sharp;
                    if !holds {
                        return Err(KitError::TheoremViolation(format!(
                            "8.7: R true with probability {}, records sharp: {}/{}",
                            rep.r_true, rep.m_sharp, rep.m_prime_sharp
                        )));
                    }
                    let mut check = TheoremCheck::new("8.7", "consecutive measurements agree although neither is sharp")
                        .value("r_true", rep.r_true)
                        .value("deviation", rep.deviation)
                        .value("m_max", rep.m_max)
                        .value("m_prime_max", rep.m_prime_max);
                    check.verdicts.push(NamedVerdict::new("flattened network", rep.flattened));
                    Ok(check)
                }
            }
        }
    }
}

/// The maximal observable of the witness and the first attribute of the
/// other one.
fn maximal_and_companion(w: &SuperinfoWitness) -> KitResult<(Variable, AttrRef)> {
    if is_maximal(&w.x_var) {
        Ok((w.x_var.clone(), w.y_var.attributes()[0].clone()))
    } else if is_maximal(&w.y_var) {
        Ok((w.y_var.clone(), w.x_var.attributes()[0].clone()))
    } else {
        Err(KitError::PreconditionFailed("neither witness observable is maximal".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superinfo::tests::qubit_model;

    #[test]
    fn every_section_holds_on_the_qubit() {
        let m = qubit_model();
        let cfg = OracleConfig::default();
        for s in &SECTIONS[..7] {
            let c = run_section(s, &m, &cfg).unwrap();
            assert_eq!(c.holds, Some(true), "{s}: {c:?}");
        }
        assert!(matches!(run_section("8.9", &m, &cfg), Err(KitError::PreconditionFailed(_))));
        assert!(matches!(run_section("8.8", &m, &cfg), Err(KitError::UnknownName(_))));
    }
}
