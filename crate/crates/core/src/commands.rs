//! The verbs of the command-line tool, as library calls producing reports.

use std::path::PathBuf;

use serde::Serialize;

use crate::algebra::Variable;
use crate::error::{KitError, KitResult};
use crate::info::{
    distinguish, info_capacity, is_clonable, is_information_variable, is_measurer_of, is_observable,
    measurement_task, MeasurementSpec, Outcome,
};
use crate::io::{load_model, CheckStatus, Record, Report};
use crate::model::Model;
use crate::oracle::{possible_with_side_effects, OracleConfig, Verdict, VerdictKind};
use crate::principles::{check_principle, falsify, Principle, PrincipleReport, Status, DEFAULT_FALSIFY_BOUND};
use crate::superinfo::{detect_superinformation, run_section, SECTIONS};

#[derive(Clone, Debug)]
pub enum Command {
    Distinguish { model: PathBuf, variable: Option<String>, attributes: Vec<String> },
    CloneCheck { model: PathBuf, variable: Option<String> },
    InfoVar { model: PathBuf, variable: Option<String> },
    Observable { model: PathBuf, variable: Option<String> },
    Measure { model: PathBuf, variable: String, target: Option<String> },
    Superinfo { model: PathBuf },
    Theorems { model: PathBuf, section: Option<String> },
    Check { model: PathBuf, principle: Option<Principle> },
    Falsify { max_states: usize, bound: Option<usize>, principles: Vec<Principle> },
    Capacity { model: PathBuf, substrate: Option<String> },
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the model's seed.
    pub seed: Option<u64>,
    pub timings: bool,
    /// Echoed into the report.
    pub argv: Vec<String>,
}

struct Ctx {
    model: Model,
    cfg: OracleConfig,
    timed: bool,
}

fn open(path: &PathBuf, opts: &RunOptions) -> KitResult<Ctx> {
    let model = load_model(path)?;
    let mut cfg = model.config.clone();
    if let Some(seed) = opts.seed {
        cfg = cfg.with_seed(seed);
    }
    Ok(Ctx {
        model,
        cfg,
        timed: opts.timings,
    })
}

impl Ctx {
    fn variables(&self, name: &Option<String>) -> KitResult<Vec<(String, Variable)>> {
        match name {
            Some(n) => Ok(vec![(n.clone(), self.model.variable(n)?.clone())]),
            None if self.model.variables().is_empty() => {
                Err(KitError::PreconditionFailed("the model declares no variables".into()))
            }
            None => Ok(self.model.variables().to_vec()),
        }
    }
}

fn verdict_status(v: &Verdict) -> CheckStatus {
    if v.is_unknown() {
        CheckStatus::Undecided
    } else {
        CheckStatus::Pass
    }
}

fn answer(v: &Verdict) -> String {
    match v.kind {
        VerdictKind::Unknown => format!("unknown ({})", v.note.as_deref().unwrap_or("undecided")),
        k => k.to_string(),
    }
}

fn outcome_record(op: &str, name: &str, out: &Outcome, yes: &str, no: &str) -> KitResult<Record> {
    let (status, text) = match out.value {
        Some(true) => (CheckStatus::Pass, yes.to_owned()),
        Some(false) => (CheckStatus::Pass, no.to_owned()),
        None => (CheckStatus::Undecided, format!("undecided ({})", out.note)),
    };
    Record::new(op, vec![name.to_owned()], status, text, out)
}

#[derive(Serialize)]
struct WitnessSummary {
    medium: String,
    x: String,
    y: String,
    pair: (String, String),
    pair_overlap: f64,
    union_failure: Outcome,
    pairs_checked: usize,
    undecided: usize,
}

fn principle_record(r: &PrincipleReport) -> KitResult<Record> {
    let status = match &r.status {
        Status::Fails { .. } => CheckStatus::Violation,
        _ if r.undecided > 0 => CheckStatus::Undecided,
        _ => CheckStatus::Pass,
    };
    let state = match &r.status {
        Status::Holds => "holds".to_owned(),
        Status::Axiomatic => "axiomatic".to_owned(),
        Status::Fails { counterexample } => format!("fails at {}", counterexample.operation),
        Status::PartiallyChecked { coverage } => format!("partially checked: {coverage}"),
    };
    Record::new(
        format!("principle {}", r.principle),
        vec![],
        status,
        format!("{state} ({} instances, {} vacuous)", r.instances, r.vacuous),
        r,
    )
}

/// Runs one command. Errors are usage, input or precondition problems;
/// contradicted claims are reported as violations inside the report.
pub fn run(cmd: &Command, opts: &RunOptions) -> KitResult<Report> {
    if let Command::Falsify { max_states, bound, principles } = cmd {
        let cfg = OracleConfig::default().with_seed(opts.seed.unwrap_or(0));
        let mut report = Report::new(opts.argv.clone(), cfg.seed);
        let ps: Vec<Principle> = if principles.is_empty() {
            vec![Principle::IV, Principle::V, Principle::VIII]
        } else {
            principles.clone()
        };
        let f = falsify(*max_states, &ps, bound.unwrap_or(DEFAULT_FALSIFY_BOUND), &cfg)?;
        for r in &f.reports {
            report.push(principle_record(r)?);
        }
        let media = f.superinfo_media.len();
        report.push(Record::new(
            "superinformation search",
            vec![],
            if media > 0 { CheckStatus::Violation } else { CheckStatus::Pass },
            format!("{media} superinformation media among {} models", f.models),
            &f.superinfo_media,
        )?);
        report.push(Record::new(
            "coverage",
            vec![],
            CheckStatus::Pass,
            format!("{} model/variable pairs over {} classical models", f.coverage, f.models),
            &serde_json::json!({ "coverage": f.coverage, "models": f.models, "max_states": f.max_states }),
        )?);
        return Ok(report);
    }

    let model_path = match cmd {
        Command::Distinguish { model, .. }
        | Command::CloneCheck { model, .. }
        | Command::InfoVar { model, .. }
        | Command::Observable { model, .. }
        | Command::Measure { model, .. }
        | Command::Superinfo { model }
        | Command::Theorems { model, .. }
        | Command::Check { model, .. }
        | Command::Capacity { model, .. } => model,
        Command::Falsify { .. } => unreachable!(),
    };
    let ctx = open(model_path, opts)?;
    let cfg = &ctx.cfg;
    let m = &ctx.model;
    let mut report = Report::new(opts.argv.clone(), cfg.seed);

    match cmd {
        Command::Distinguish { variable, attributes, .. } => {
            let vars = if attributes.is_empty() {
                ctx.variables(variable)?
            } else {
                let attrs = attributes.iter().map(|n| m.attribute(n).cloned()).collect::<KitResult<Vec<_>>>()?;
                vec![(attributes.join(","), Variable::new(attrs)?)]
            };
            for (name, v) in vars {
                report.timed(ctx.timed, || {
                    let verdict = distinguish(&v, cfg)?;
                    Record::new("distinguish", vec![name], verdict_status(&verdict), answer(&verdict), &verdict)
                })?;
            }
        }
        Command::CloneCheck { variable, .. } => {
            for (name, v) in ctx.variables(variable)? {
                report.timed(ctx.timed, || {
                    outcome_record("clone-check", &name, &is_clonable(&v, m, cfg)?, "clonable", "not clonable")
                })?;
            }
        }
        Command::InfoVar { variable, .. } => {
            for (name, v) in ctx.variables(variable)? {
                report.timed(ctx.timed, || {
                    let out = is_information_variable(&v, m, cfg)?;
                    outcome_record("info-var", &name, &out, "information variable", "not an information variable")
                })?;
            }
        }
        Command::Observable { variable, .. } => {
            for (name, v) in ctx.variables(variable)? {
                report.timed(ctx.timed, || {
                    let obs = is_observable(&v);
                    let text = if obs { "observable" } else { "not an observable" };
                    Record::new("observable", vec![name], CheckStatus::Pass, text, &obs)
                })?;
            }
        }
        Command::Measure { variable, target, .. } => {
            let x = m.variable(variable)?.clone();
            let spec = MeasurementSpec::non_perturbing(&x, "M")?;
            report.timed(ctx.timed, || {
                let v = possible_with_side_effects(&measurement_task(&spec)?, cfg)?;
                Record::new("measure", vec![variable.clone()], verdict_status(&v), answer(&v), &v)
            })?;
            if let Some(t) = target {
                let tv = m.variable(t)?.clone();
                report.timed(ctx.timed, || {
                    let out = is_measurer_of(&spec, &tv, cfg)?;
                    let op = format!("measurer of {variable} measures");
                    outcome_record(&op, t, &out, "measures it", "does not measure it")
                })?;
            }
        }
        Command::Superinfo { .. } => {
            report.timed(ctx.timed, || {
                let det = detect_superinformation(m, cfg)?;
                match &det.witness {
                    Some(w) => {
                        let summary = WitnessSummary {
                            medium: w.medium.to_string(),
                            x: w.x_var.name().unwrap_or("?").to_owned(),
                            y: w.y_var.name().unwrap_or("?").to_owned(),
                            pair: (w.pair.0.describe(), w.pair.1.describe()),
                            pair_overlap: w.pair_overlap,
                            union_failure: w.union_failure.clone(),
                            pairs_checked: det.pairs_checked,
                            undecided: det.undecided,
                        };
                        let text = format!(
                            "`{}` is a superinformation medium: {} ∪ {} is not an information variable; pair overlap {:.12}",
                            summary.medium, summary.x, summary.y, w.pair_overlap
                        );
                        Record::new("superinfo", vec![], CheckStatus::Pass, text, &summary)
                    }
                    None => {
                        let status = if det.undecided > 0 { CheckStatus::Undecided } else { CheckStatus::Pass };
                        let text = format!(
                            "no superinformation medium ({} pairs checked, {} undecided)",
                            det.pairs_checked, det.undecided
                        );
                        Record::new("superinfo", vec![], status, text, &())
                    }
                }
            })?;
        }
        Command::Theorems { section, .. } => {
            let sections: Vec<&str> = match section {
                Some(s) => vec![s.as_str()],
                None => SECTIONS.to_vec(),
            };
            let single = section.is_some();
            for s in sections {
                report.timed(ctx.timed, || match run_section(s, m, cfg) {
                    Ok(check) => {
                        let status = if check.holds.is_none() { CheckStatus::Undecided } else { CheckStatus::Pass };
                        let text = format!("{}: {}", check.claim, if status == CheckStatus::Pass { "holds" } else { "undecided" });
                        Record::new(format!("theorem {s}"), vec![], status, text, &check)
                    }
                    Err(KitError::TheoremViolation(msg)) => {
                        Record::new(format!("theorem {s}"), vec![], CheckStatus::Violation, msg.clone(), &msg)
                    }
                    Err(e) if !single && !matches!(e, KitError::UnknownName(_)) => {
                        let msg = e.to_string();
                        Record::new(format!("theorem {s}"), vec![], CheckStatus::Skipped, format!("not applicable: {msg}"), &msg)
                    }
                    Err(e) => Err(e),
                })?;
            }
        }
        Command::Check { principle, .. } => {
            let ps: Vec<Principle> = principle.map_or(Principle::ALL.to_vec(), |p| vec![p]);
            for p in ps {
                report.timed(ctx.timed, || principle_record(&check_principle(p, m, cfg)?))?;
            }
        }
        Command::Capacity { substrate, .. } => {
            let subs: Vec<_> = match substrate {
                Some(n) => vec![m.substrate(n)?.clone()],
                None => m.substrates().to_vec(),
            };
            for s in subs {
                report.timed(ctx.timed, || {
                    let bits = info_capacity(&s, m, cfg)?;
                    Record::new(
                        "capacity",
                        vec![s.name().to_owned()],
                        CheckStatus::Pass,
                        format!("{bits:.12} bits"),
                        &bits,
                    )
                })?;
            }
        }
        Command::Falsify { .. } => unreachable!(),
    }
    Ok(report)
}

/// Exit status for a run that ended in an error: 1 for a contradicted
/// claim, 2 for usage, input and precondition errors.
pub fn error_exit_code(e: &KitError) -> i32 {
    match e {
        KitError::TheoremViolation(_) => 1,
        _ => 2,
    }
}
