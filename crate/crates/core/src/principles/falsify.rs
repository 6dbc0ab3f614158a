use serde::Serialize;

use crate::algebra::Substrate;
use crate::error::{KitError, KitResult};
use crate::model::Model;
use crate::oracle::OracleConfig;
use crate::principles::{check_in_scope, merge, Principle, PrincipleReport, Scope};
use crate::superinfo::{detect_on, Detection};

pub const DEFAULT_FALSIFY_BOUND: usize = 4;

/// Result of searching every classical model up to some size.
#[derive(Clone, Debug, Serialize)]
pub struct Falsification {
    pub max_states: usize,
    pub models: usize,
    /// Model/variable pairs examined.
    pub coverage: usize,
    pub reports: Vec<PrincipleReport>,
    /// Models found to be superinformation media.
    pub superinfo_media: Vec<String>,
    pub superinfo_pairs_checked: usize,
}

impl Falsification {
    pub fn counterexamples(&self) -> usize {
        self.reports.iter().filter(|r| r.fails()).count() + self.superinfo_media.len()
    }
}

/// Checks `principles` and searches for superinformation on the classical
/// model with `n` states, for every `n ≤ max_states`. Classical models of
/// equal size agree up to relabelling, so one per size suffices.
pub fn falsify(
    max_states: usize,
    principles: &[Principle],
    bound: usize,
    cfg: &OracleConfig,
) -> KitResult<Falsification> {
    let run_to = max_states.min(bound);
    let mut per: Vec<Vec<PrincipleReport>> = vec![Vec::new(); principles.len()];
    let mut coverage = 0;
    let mut media = Vec::new();
    let mut pairs_checked = 0;
    for n in 1..=run_to {
        let s = Substrate::classical(format!("s{n}"), n)?;
        let mut model = Model::new(cfg.clone());
        model.add_substrate(s.clone())?;
        let scope = Scope::classical(&s)?;
        coverage += scope.variable_count();
        for (k, &p) in principles.iter().enumerate() {
            per[k].push(check_in_scope(p, &model, &scope, cfg)?);
        }
        let candidates: Vec<_> = scope.variables().cloned().collect();
        let mut det = Detection {
            witness: None,
            pairs_checked: 0,
            undecided: 0,
        };
        if detect_on(&s, &candidates, &model, cfg, &mut det)?.is_some() {
            media.push(s.to_string());
        }
        pairs_checked += det.pairs_checked;
    }
    if max_states > bound {
        return Err(KitError::BudgetExceeded {
            requested: max_states,
            bound,
            covered: coverage,
        });
    }
    let reports = principles
        .iter()
        .zip(per)
        .map(|(&p, rs)| merge(p, rs, format!("every classical model with at most {max_states} states")))
        .collect();
    Ok(Falsification {
        max_states,
        models: max_states,
        coverage,
        reports,
        superinfo_media: media,
        superinfo_pairs_checked: pairs_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_states_give_no_counterexample_to_iv_or_v() {
        let f = falsify(3, &[Principle::IV, Principle::V], DEFAULT_FALSIFY_BOUND, &OracleConfig::default()).unwrap();
        assert_eq!(f.counterexamples(), 0);
        assert!(f.reports.iter().all(|r| r.holds()), "{:?}", f.reports);
        assert_eq!(f.coverage, 1 + 4 + 14);
    }

    #[test]
    fn exceeding_the_bound_reports_partial_coverage() {
        let r = falsify(10, &[Principle::IV], 2, &OracleConfig::default());
        assert_eq!(
            r.unwrap_err(),
            KitError::BudgetExceeded {
                requested: 10,
                bound: 2,
                covered: 5
            }
        );
    }
}
