use crate::algebra::{AttrRef, Attribute, Substrate, Task, Variable};
use crate::error::{KitError, KitResult};
use crate::info::{pointer, pointer_medium, Outcome};
use crate::oracle::{possible_with_side_effects, OracleConfig, Verdict};

/// Largest number of label maps tried when relating a measurer to a
/// variable it was not built for.
const MAX_LABEL_MAPS: usize = 4096;

/// The data of `∪_x {(x, x₀) → (y_x, 'x')}`.
#[derive(Clone, Debug)]
pub struct MeasurementSpec {
    pub input: Variable,
    pub medium: Substrate,
    /// Receptive state `x₀` of the output medium.
    pub receptive: AttrRef,
    /// Labelled pointer attributes `'x'`, one per input attribute.
    pub pointers: Variable,
    /// Residual attributes `y_x` of the measured substrate.
    pub residuals: Vec<AttrRef>,
}

impl MeasurementSpec {
    pub fn new(
        input: Variable,
        medium: Substrate,
        receptive: AttrRef,
        pointers: Variable,
        residuals: Vec<AttrRef>,
    ) -> KitResult<Self> {
        if pointers.len() != input.len() || residuals.len() != input.len() {
            return Err(KitError::LabelMismatch(format!(
                "{} inputs, {} pointers, {} residuals",
                input.len(),
                pointers.len(),
                residuals.len()
            )));
        }
        if *pointers.substrate() != medium || *receptive.substrate() != medium {
            return Err(KitError::DimensionMismatch("pointers must live on the output medium".into()));
        }
        if residuals.iter().any(|r| r.substrate() != input.substrate()) {
            return Err(KitError::DimensionMismatch("residuals must live on the measured substrate".into()));
        }
        Ok(MeasurementSpec {
            input,
            medium,
            receptive,
            pointers,
            residuals,
        })
    }

    /// Copy measurer: pointer basis states labelled like `x`, residual
    /// `y_x = x`.
    pub fn non_perturbing(x: &Variable, medium_name: &str) -> KitResult<Self> {
        let medium = pointer_medium(medium_name, x.len(), x.substrate().is_quantum())?;
        let pointers = Self::pointer_variable(&medium, x)?;
        Self::new(x.clone(), medium.clone(), pointer(&medium, 0)?, pointers, x.attributes().to_vec())
    }

    /// Demolition measurer leaving the measured substrate in `y`.
    pub fn demolition(x: &Variable, medium_name: &str, y: &AttrRef) -> KitResult<Self> {
        let medium = pointer_medium(medium_name, x.len(), x.substrate().is_quantum())?;
        let pointers = Self::pointer_variable(&medium, x)?;
        Self::new(x.clone(), medium.clone(), pointer(&medium, 0)?, pointers, vec![y.clone(); x.len()])
    }

    fn pointer_variable(medium: &Substrate, x: &Variable) -> KitResult<Variable> {
        let attrs = (0..x.len()).map(|k| pointer(medium, k)).collect::<KitResult<Vec<_>>>()?;
        Variable::new(attrs)?.with_labels(x.labels())
    }
}

pub fn measurement_task(spec: &MeasurementSpec) -> KitResult<Task> {
    let pairs = spec
        .input
        .attributes()
        .iter()
        .zip(spec.pointers.attributes())
        .zip(&spec.residuals)
        .map(|((x, p), y)| {
            Ok((
                Attribute::product(&[x.clone(), spec.receptive.clone()])?.into_ref(),
                Attribute::product(&[y.clone(), p.clone()])?.into_ref(),
            ))
        })
        .collect::<KitResult<Vec<_>>>()?;
    Task::new(pairs)
}

pub fn is_non_perturbing(spec: &MeasurementSpec) -> bool {
    spec.residuals
        .iter()
        .zip(spec.input.attributes())
        .all(|(y, x)| y.is_subset_of(x))
}

/// Whether the measurer described by `spec` also measures `v`, after a
/// relabelling of its pointer states. Subsets and coarsenings of the
/// measured variable are accepted directly; otherwise every label map is
/// tried jointly with the measurer's own behaviour.
pub fn is_measurer_of(spec: &MeasurementSpec, v: &Variable, cfg: &OracleConfig) -> KitResult<Outcome> {
    let own = possible_with_side_effects(&measurement_task(spec)?, cfg)?;
    match own.as_bool() {
        Some(true) => {}
        Some(false) => return Ok(Outcome::from_verdict(own, "the measurement task itself is impossible")),
        None => return Ok(Outcome::new(None, Some(own), "the measurement task is undecided")),
    }
    if v.substrate() != spec.input.substrate() {
        return Err(KitError::DimensionMismatch("variable and measurer act on different substrates".into()));
    }
    let xs = spec.input.attributes();
    let coarsening = v.attributes().iter().all(|vj| {
        let parts: Vec<AttrRef> = xs.iter().filter(|x| x.is_subset_of(vj)).cloned().collect();
        !parts.is_empty()
            && Attribute::union(v.substrate(), &parts).is_ok_and(|u| u.set_eq(vj))
    });
    if coarsening {
        return Ok(Outcome::from_verdict(own, "subset or coarsening of the measured variable"));
    }

    let options = v.len() + 1;
    let maps = (0..xs.len()).try_fold(1usize, |acc, _| acc.checked_mul(options));
    let Some(maps) = maps.filter(|&m| m <= MAX_LABEL_MAPS) else {
        return Ok(Outcome::new(None, None, "too many label maps"));
    };
    let mut first_impossible: Option<Verdict> = None;
    let mut undecided = 0;
    for code in 0..maps {
        // kappa[i] = Some(j): pointer of x_i now reads as attribute j of v.
        let kappa: Vec<Option<usize>> = (0..xs.len())
            .map(|i| {
                let d = (code / options.pow(i as u32)) % options;
                (d < v.len()).then_some(d)
            })
            .collect();
        let Some(task) = joint_task(spec, v, &kappa)? else { continue };
        let verdict = possible_with_side_effects(&task, cfg)?;
        match verdict.as_bool() {
            Some(true) => return Ok(Outcome::from_verdict(verdict, format!("label map {kappa:?}"))),
            Some(false) => {
                first_impossible.get_or_insert(verdict);
            }
            None => undecided += 1,
        }
    }
    if undecided > 0 {
        return Ok(Outcome::new(None, None, format!("{undecided} label maps undecided")));
    }
    Ok(Outcome::new(Some(false), first_impossible, format!("all {maps} label maps impossible")))
}

/// The measurer's rows plus one row per ray of each attribute of `v`
/// requiring a pointer mapped to that attribute. `None` when `kappa`
/// contradicts a ray the measurer already reports.
fn joint_task(spec: &MeasurementSpec, v: &Variable, kappa: &[Option<usize>]) -> KitResult<Option<Task>> {
    let mut pairs = measurement_task(spec)?.pairs().to_vec();
    let s = v.substrate();
    let full = Attribute::full(s).into_ref();
    for (j, vj) in v.attributes().iter().enumerate() {
        let targets: Vec<AttrRef> = spec
            .pointers
            .attributes()
            .iter()
            .zip(kappa)
            .filter(|(_, k)| **k == Some(j))
            .map(|(p, _)| p.clone())
            .collect();
        let out = Attribute::product(&[full.clone(), Attribute::union(&spec.medium, &targets)?.into_ref()])?.into_ref();
        let rays: Vec<AttrRef> = if s.is_quantum() {
            vj.spanning_rays()
                .into_iter()
                .map(|r| Attribute::ray(s, r).map(|a| a.into_ref()))
                .collect::<KitResult<_>>()?
        } else {
            vj.state_set()
                .into_iter()
                .map(|k| Attribute::states(s, [k]).map(|a| a.into_ref()))
                .collect::<KitResult<_>>()?
        };
        for r in rays {
            if let Some(i) = spec.input.attributes().iter().position(|x| r.is_subset_of(x)) {
                if kappa[i] != Some(j) {
                    return Ok(None);
                }
                continue;
            }
            pairs.push((Attribute::product(&[r, spec.receptive.clone()])?.into_ref(), out.clone()));
        }
    }
    Ok(Task::new(pairs).ok())
}
