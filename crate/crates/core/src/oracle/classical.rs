use std::collections::BTreeSet;

use crate::algebra::Task;
use crate::error::{KitError, KitResult};
use crate::oracle::{Certificate, CertificateKind, Verdict, Witness};

/// Possible iff some total function on the input states sends every state
/// of each input into one of that input's outputs; with disjoint inputs
/// that holds iff no input has only empty outputs.
pub fn classical_possible(task: &Task) -> KitResult<Verdict> {
    if task.substrate().is_quantum() {
        return Err(KitError::KindMismatch(format!(
            "classical oracle given quantum task on `{}`",
            task.substrate()
        )));
    }
    let mut map = Vec::new();
    for x in task.inputs() {
        let targets: BTreeSet<usize> = task
            .outputs_for(&x)
            .iter()
            .flat_map(|y| y.state_set())
            .collect();
        let Some(&target) = targets.iter().next() else {
            if x.is_empty() {
                continue;
            }
            return Ok(Verdict::impossible(
                Certificate::new(
                    CertificateKind::EmptyOutput,
                    format!("input `{x}` has no legitimate output state"),
                ),
            ));
        };
        for s in x.state_set() {
            // Keep states that are already legitimate outputs in place.
            let image = if targets.contains(&s) { s } else { target };
            map.push((s, image));
        }
    }
    map.sort_unstable();
    Ok(Verdict::possible(Witness::Classical { map }))
}

/// Re-checks a classical witness against the task.
pub fn validate_classical(task: &Task, map: &[(usize, usize)]) -> bool {
    task.inputs().iter().all(|x| {
        let targets: BTreeSet<usize> = task
            .outputs_for(x)
            .iter()
            .flat_map(|y| y.state_set())
            .collect();
        x.state_set().iter().all(|s| {
            map.iter()
                .find(|(a, _)| a == s)
                .is_some_and(|(_, b)| targets.contains(b))
        })
    })
}
