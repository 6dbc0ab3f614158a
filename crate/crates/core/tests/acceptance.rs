//! One line per acceptance criterion. Reference values come from small
//! oracles written here against plain complex arithmetic, not from the
//! library's own linear algebra.

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctkit_core::algebra::{AttrRef, Attribute, Permutation, Substrate, Variable};
use ctkit_core::commands::{run, Command, RunOptions};
use ctkit_core::info::{bar, bar_bar, boolean_variable, distinguish, is_clonable, is_maximal};
use ctkit_core::io::{emit_report, load_model, Format};
use ctkit_core::linalg::CVec;
use ctkit_core::model::Model;
use ctkit_core::oracle::{possible, witness_validates, OracleConfig, VerdictKind, Witness};
use ctkit_core::principles::{falsify, Principle};
use ctkit_core::superinfo::{
    consecutive_measurement_network, detect_superinformation, ensemble_distinguishable, run_section,
    verify_locally_inaccessible,
};
use ctkit_core::KitError;

const TAU: f64 = 1e-9;
const TAU_DEFECT: f64 = 1e-12;
const FIXTURES: [&str; 7] = ["bit", "trit", "qubit", "qutrit", "two_qubit", "photon", "photon5"];

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "fixtures", &format!("{name}.ctm")].iter().collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_s), || {
        format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn err(e: KitError) -> String {
    e.to_string()
}

// Plain complex vectors for the reference computations.

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    ip.norm() / (na * nb)
}

fn plain(v: &CVec) -> Vec<Complex64> {
    v.iter().copied().collect()
}

fn vector(v: &[Complex64]) -> CVec {
    CVec::from_vec(v.to_vec())
}

fn random_ray(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn real(xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Orthogonal projector onto the span of `vs`, by Gram-Schmidt.
fn projector(vs: &[Vec<Complex64>], d: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for b in &basis {
            let ip: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= ip * bi;
            }
        }
        let n = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-7 {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    let mut p = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for b in &basis {
        for i in 0..d {
            for j in 0..d {
                p[i][j] += b[i] * b[j].conj();
            }
        }
    }
    p
}

fn projector_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn trace(p: &[Vec<Complex64>]) -> f64 {
    (0..p.len()).map(|i| p[i][i].re).sum()
}

fn qubit_pair_model(c: f64) -> (Model, Variable) {
    let q = Substrate::quantum("q", 2).unwrap();
    let x = Attribute::ray(&q, vector(&real(&[1.0, 0.0]))).unwrap().into_ref();
    let y = Attribute::ray(&q, vector(&real(&[c, (1.0 - c * c).max(0.0).sqrt()]))).unwrap().into_ref();
    let mut m = Model::new(OracleConfig::default());
    m.add_substrate(q).unwrap();
    m.add_attribute("x", x.clone(), true, false).unwrap();
    m.add_attribute("y", y.clone(), false, false).unwrap();
    let v = if x.set_eq(&y) {
        Variable::new(vec![x]).unwrap()
    } else {
        Variable::new(vec![x, y]).unwrap()
    };
    (m, v)
}

fn distinguishability_is_orthogonality() -> Outcome {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cases: Vec<(usize, Vec<Complex64>, Vec<Complex64>)> = (0..100)
        .map(|i| {
            let d = 2 + i % 2;
            (d, random_ray(&mut rng, d), random_ray(&mut rng, d))
        })
        .collect();
    cases.push((2, real(&[1.0, 0.0]), real(&[0.0, 1.0])));
    cases.push((3, real(&[0.0, 1.0, 0.0]), real(&[0.0, 0.0, 1.0])));
    let a = random_ray(&mut rng, 3);
    let phased: Vec<Complex64> = a.iter().map(|x| x * Complex64::new(0.0, 1.0)).collect();
    cases.push((3, a.clone(), phased));
    cases.push((2, real(&[1.0, 0.0]), real(&[1.0, 0.0])));
    let mut orthogonal = 0;
    for (d, u, v) in &cases {
        let expected = overlap(u, v) < TAU;
        let s = Substrate::quantum("s", *d).map_err(err)?;
        let au = Attribute::ray(&s, vector(u)).map_err(err)?.into_ref();
        let av = Attribute::ray(&s, vector(v)).map_err(err)?.into_ref();
        // Rays that coincide cannot form a variable at all, which is the
        // overlap 1 boundary.
        let got = match Variable::new(vec![au, av]) {
            Ok(var) => distinguish(&var, &cfg).map_err(err)?.kind == VerdictKind::Possible,
            Err(KitError::NotDisjoint(_)) => false,
            Err(e) => return Err(err(e)),
        };
        ensure(got == expected, || format!("overlap {} gave possible = {got}", overlap(u, v)))?;
        orthogonal += usize::from(expected);
    }
    within(start.elapsed(), 5)?;
    Ok(format!("{} pairs, {orthogonal} orthogonal", cases.len()))
}

fn no_cloning_boundary() -> Outcome {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    for k in 0..=10 {
        let c = k as f64 / 10.0;
        let (m, v) = qubit_pair_model(c);
        let out = is_clonable(&v, &m, &cfg).map_err(err)?;
        let expected = k == 0 || k == 10;
        ensure(out.value == Some(expected), || format!("c = {c}: clonable {:?}", out.value))?;
        if !expected {
            let cert = out.verdict.as_ref().and_then(|v| v.certificate_kind());
            ensure(cert.map(|k| k.to_string()).as_deref() == Some("CloningGram"), || {
                format!("c = {c}: certificate {cert:?}")
            })?;
        }
    }
    within(start.elapsed(), 5)?;
    Ok("clonable exactly at c = 0 and c = 1".into())
}

fn non_orthogonal_swap() -> Outcome {
    let cfg = OracleConfig::default();
    let q = Substrate::quantum("q", 2).map_err(err)?;
    let zero = real(&[1.0, 0.0]);
    let plus = real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
    let a = Attribute::ray(&q, vector(&zero)).map_err(err)?.into_ref();
    let b = Attribute::ray(&q, vector(&plus)).map_err(err)?.into_ref();
    let var = Variable::new(vec![a, b]).map_err(err)?;
    let task = ctkit_core::algebra::permutation_task(&var, &Permutation::transposition(2, 0, 1)).map_err(err)?;
    let verdict = possible(&task, &cfg).map_err(err)?;
    ensure(verdict.kind == VerdictKind::Possible, || format!("verdict {}", verdict.kind))?;
    ensure(witness_validates(&task, &verdict, &cfg), || "witness does not validate".into())?;

    // Reference: the reflection through the bisector of |0> and |+> swaps
    // them, so a unitary exists.
    let diff: Vec<Complex64> = zero.iter().zip(&plus).map(|(x, y)| x - y).collect();
    let n2: f64 = diff.iter().map(|x| x.norm_sqr()).sum();
    let reflect = |v: &[Complex64]| -> Vec<Complex64> {
        let ip: Complex64 = diff.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
        v.iter().zip(&diff).map(|(vi, di)| vi - di * ip * 2.0 / n2).collect()
    };
    ensure(overlap(&reflect(&zero), &plus) > 1.0 - TAU, || "reference reflection misses |+>".into())?;

    let Some(Witness::Quantum(w)) = &verdict.witness else {
        return Err("no quantum witness".into());
    };
    let mut residual: f64 = 0.0;
    for i in 0..w.inputs.len() {
        for j in 0..w.inputs.len() {
            let ip = |v: &[CVec], i: usize, j: usize| -> Complex64 {
                plain(&v[i]).iter().zip(plain(&v[j])).map(|(x, y)| x.conj() * y).sum()
            };
            let lhs = ip(&w.inputs, i, j);
            let rhs = ip(&w.outputs, i, j) * ip(&w.ancillas, i, j);
            residual = residual.max((lhs - rhs).norm());
        }
    }
    ensure(residual < TAU, || format!("witness Gram residual {residual}"))?;
    Ok(format!("witness Gram residual {residual:.1e}"))
}

fn superinformation_on_the_qubit() -> Outcome {
    let m = load_model(fixture("qubit")).map_err(err)?;
    let det = detect_superinformation(&m, &m.config).map_err(err)?;
    let w = det.witness.ok_or("no witness")?;
    let (u, v) = (
        w.pair.0.single_ray().ok_or("pair is not two rays")?,
        w.pair.1.single_ray().ok_or("pair is not two rays")?,
    );
    let reference = overlap(&plain(&u), &plain(&v));
    ensure((reference - FRAC_1_SQRT_2).abs() < TAU, || format!("reference overlap {reference}"))?;
    ensure((w.pair_overlap - FRAC_1_SQRT_2).abs() < TAU, || format!("pair overlap {}", w.pair_overlap))?;
    Ok(format!("medium `{}`, pair overlap {:.12}", w.medium, w.pair_overlap))
}

fn theorem_suite_on_the_qubit() -> Outcome {
    let start = Instant::now();
    let m = load_model(fixture("qubit")).map_err(err)?;
    let cfg = &m.config;
    let named_impossible = [
        ("8.2", "sharpness measurement"),
        ("8.3", "cloning pair"),
        ("8.4", "joint measurement"),
        ("8.6", "perturbation task"),
    ];
    for s in ["8.1", "8.2", "8.3", "8.4", "8.5", "8.6", "8.7"] {
        let check = run_section(s, &m, cfg).map_err(|e| format!("{s}: {e}"))?;
        ensure(check.holds == Some(true), || format!("{s}: holds {:?}", check.holds))?;
        for (sec, name) in named_impossible.iter().filter(|(sec, _)| *sec == s) {
            let nv = check.verdicts.iter().find(|v| v.name == *name).ok_or(format!("{sec}: no `{name}`"))?;
            ensure(nv.verdict.kind == VerdictKind::Impossible, || format!("{sec}: {name} is {}", nv.verdict.kind))?;
            ensure(nv.verdict.certificate_kind().is_some(), || format!("{sec}: {name} has no certificate"))?;
            if *sec == "8.3" {
                ensure(nv.verdict.certificate_kind().map(|k| k.to_string()).as_deref() == Some("CloningGram"), || {
                    "8.3 certificate is not CloningGram".into()
                })?;
            }
        }
        if s == "8.5" {
            ensure(check.get("x_y_size") == Some(2.0), || format!("|X_y| = {:?}", check.get("x_y_size")))?;
        }
    }

    // Each record of measuring X = {|+>, |->} on |0> reads either way with
    // probability 1/2; R is sharp because both records agree.
    let z0 = m.attribute("z0").map_err(err)?.clone();
    let x = m.variable("X").map_err(err)?.clone();
    let record_max = x
        .attributes()
        .iter()
        .map(|a| overlap(&plain(&a.single_ray().unwrap()), &plain(&z0.single_ray().unwrap())).powi(2))
        .fold(0.0, f64::max);
    let (_, rep) = consecutive_measurement_network(&x, &z0, cfg).map_err(err)?;
    ensure(rep.deviation < TAU && rep.r_sharp_true, || format!("deviation {}", rep.deviation))?;
    ensure(!rep.m_sharp && !rep.m_prime_sharp, || "a record is sharp".into())?;
    ensure((rep.m_max - record_max).abs() < TAU && (rep.m_prime_max - record_max).abs() < TAU, || {
        format!("record maxima {} / {}, reference {record_max}", rep.m_max, rep.m_prime_max)
    })?;
    within(start.elapsed(), 30)?;
    Ok(format!("7 sections hold, comparator deviation {:.1e}", rep.deviation))
}

fn locally_inaccessible_information() -> Outcome {
    let m = load_model(fixture("two_qubit")).map_err(err)?;
    let rep = verify_locally_inaccessible(&m, &m.config).map_err(err)?;
    // CNOT(0', 0) = (|00> + |11>)/sqrt2.
    let h = FRAC_1_SQRT_2;
    let bell = real(&[h, 0.0, 0.0, h]);
    let psi1 = plain(rep.psi.first().ok_or("no ψ₁")?);
    let reference = overlap(&psi1, &bell);
    let r00 = overlap(&psi1, &real(&[1.0, 0.0, 0.0, 0.0]));
    let r11 = overlap(&psi1, &real(&[0.0, 0.0, 0.0, 1.0]));
    ensure((reference - 1.0).abs() < TAU && (rep.psi1_cnot_overlap - 1.0).abs() < TAU, || {
        format!("ψ₁ overlap with the CNOT image {reference} / {}", rep.psi1_cnot_overlap)
    })?;
    for (name, got, refv) in [("00", rep.overlap_00, r00), ("11", rep.overlap_11, r11)] {
        ensure((got - h).abs() < TAU && (refv - h).abs() < TAU, || format!("|<ψ₁|{name}>| = {got}"))?;
    }
    // Each entry is a distinguishability the construction would need; all
    // of them must fail.
    ensure(rep.contradictions.iter().all(|(_, v)| *v == Some(false)), || {
        format!("contradictions {:?}", rep.contradictions)
    })?;
    ensure(rep.c_information.is_true() && rep.d_information.is_true(), || "C or D is not an information variable".into())?;
    ensure(rep.holds == Some(true), || "construction does not hold".into())?;
    Ok(format!("|<ψ₁|00>| = |<ψ₁|11>| = {:.12}", rep.overlap_00))
}

/// Bell numbers from the Bell triangle.
fn bell(n: usize) -> usize {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    row[0]
}

fn classical_exhaustiveness() -> Outcome {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let f = falsify(4, &[Principle::IV, Principle::V, Principle::VIII], 4, &cfg).map_err(err)?;
    // A variable on n states is a partition of n + 1 points with one
    // block marked unused, minus the empty variable.
    let expected: usize = (1..=4).map(|n| bell(n + 1) - 1).sum();
    ensure(f.counterexamples() == 0, || format!("{} counterexamples", f.counterexamples()))?;
    ensure(f.superinfo_media.is_empty(), || format!("{} superinformation media", f.superinfo_media.len()))?;
    ensure(f.coverage == expected, || format!("coverage {} against {expected}", f.coverage))?;
    within(start.elapsed(), 300)?;
    Ok(format!("coverage {} = analytic {expected}", f.coverage))
}

fn random_attribute(rng: &mut ChaCha8Rng, s: &Substrate) -> (AttrRef, Vec<Vec<Complex64>>) {
    let d = s.size();
    if s.is_quantum() {
        let k = rng.gen_range(1..d);
        let rays: Vec<Vec<Complex64>> = (0..k).map(|_| random_ray(rng, d)).collect();
        let vs = rays.iter().map(|r| vector(r)).collect();
        let a = if rng.gen_bool(0.5) {
            Attribute::rays(s, vs)
        } else {
            Attribute::subspace(s, vs)
        };
        (a.unwrap().into_ref(), rays)
    } else {
        loop {
            let states: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.5)).collect();
            if !states.is_empty() && states.len() < d {
                return (Attribute::states(s, states).unwrap().into_ref(), Vec::new());
            }
        }
    }
}

fn bar_laws() -> Outcome {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let substrates: Vec<Substrate> = FIXTURES
        .iter()
        .flat_map(|f| load_model(fixture(f)).unwrap().substrates().to_vec())
        .collect();
    for i in 0..200 {
        let s = &substrates[i % substrates.len()];
        let (x, rays) = random_attribute(&mut rng, s);
        let bb = bar_bar(&x);
        ensure(x.is_subset_of(&bb), || format!("{x} is not inside its double bar"))?;
        let lhs = bar(&bb);
        let rhs = bar(&x);
        if s.is_quantum() {
            let d = s.size();
            let pl = projector(&lhs.span_basis().iter().map(plain).collect::<Vec<_>>(), d);
            let pr = projector(&rhs.span_basis().iter().map(plain).collect::<Vec<_>>(), d);
            let reference = projector(&rays, d);
            ensure(projector_distance(&pl, &pr) < TAU, || format!("bar of double bar differs on {x}"))?;
            ensure((trace(&pr) + trace(&reference) - d as f64).abs() < TAU, || {
                format!("bar of {x} has the wrong dimension")
            })?;
        } else {
            ensure(lhs.state_set() == rhs.state_set(), || format!("bar of double bar differs on {x}"))?;
        }
        let b = boolean_variable(&x).map_err(err)?;
        ensure(distinguish(&b, &cfg).map_err(err)?.kind == VerdictKind::Possible, || {
            format!("{{x, x̄}} not distinguishable for {x}")
        })?;
        ensure(is_maximal(&b), || format!("{{x, x̄}} not maximal for {x}"))?;
    }
    Ok(format!("200 attributes over {} substrates", substrates.len()))
}

fn ensemble_principle() -> Outcome {
    let mut pairs = 0;
    for f in FIXTURES {
        let m = load_model(fixture(f)).map_err(err)?;
        let attrs = m.attributes();
        for (i, a) in attrs.iter().enumerate() {
            for b in &attrs[i + 1..] {
                let (x, y) = (&a.attribute, &b.attribute);
                if x.substrate() != y.substrate() || !x.is_disjoint_from(y) || x.is_empty() || y.is_empty() {
                    continue;
                }
                let v = ensemble_distinguishable(x, y, &m.config).map_err(err)?;
                ensure(matches!(v.kind, VerdictKind::Possible | VerdictKind::PossibleInLimit), || {
                    format!("{f}: {} / {} gave {}", a.name, b.name, v.kind)
                })?;
                pairs += 1;
            }
        }
    }
    let m = load_model(fixture("qubit")).map_err(err)?;
    let v = ensemble_distinguishable(m.attribute("z0").map_err(err)?, m.attribute("x0").map_err(err)?, &m.config)
        .map_err(err)?;
    ensure(v.kind == VerdictKind::PossibleInLimit, || format!("|0>/|+> gave {}", v.kind))?;
    let ev = v.limit.ok_or("no limit evidence")?;
    let n = ev.copies.iter().position(|&c| c == 20).ok_or("no n = 20 probe")?;
    let reference = FRAC_1_SQRT_2.powi(20);
    let got = ev.defects[n];
    ensure((got - reference).abs() < TAU_DEFECT, || format!("defect {got}, reference {reference}"))?;
    Ok(format!("{pairs} disjoint pairs; n = 20 defect {got:.6e}"))
}

fn determinism() -> Outcome {
    let qubit = fixture("qubit");
    let qutrit = fixture("qutrit");
    let two = fixture("two_qubit");
    let commands = vec![
        Command::Distinguish { model: qutrit.clone(), variable: None, attributes: vec![] },
        Command::CloneCheck { model: qubit.clone(), variable: None },
        Command::InfoVar { model: two.clone(), variable: None },
        Command::Observable { model: qutrit.clone(), variable: None },
        Command::Measure { model: qubit.clone(), variable: "Z".into(), target: Some("X".into()) },
        Command::Superinfo { model: fixture("photon") },
        Command::Theorems { model: qubit.clone(), section: None },
        Command::Check { model: qutrit.clone(), principle: None },
        Command::Falsify { max_states: 3, bound: None, principles: vec![] },
        Command::Capacity { model: two, substrate: None },
    ];
    for seed in [0, 17] {
        let opts = RunOptions { seed: Some(seed), timings: false, argv: vec!["ctkit".into()] };
        for cmd in &commands {
            for format in [Format::Json, Format::Text] {
                let a = emit_report(&run(cmd, &opts).map_err(err)?, format).map_err(err)?;
                let b = emit_report(&run(cmd, &opts).map_err(err)?, format).map_err(err)?;
                ensure(a == b, || format!("{cmd:?} differs between runs"))?;
            }
        }
    }
    Ok(format!("{} commands, 2 seeds, 2 formats", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("distinguishability is orthogonality", distinguishability_is_orthogonality),
        ("no-cloning boundary", no_cloning_boundary),
        ("non-orthogonal swap", non_orthogonal_swap),
        ("superinformation detection", superinformation_on_the_qubit),
        ("theorem suite on the qubit", theorem_suite_on_the_qubit),
        ("locally inaccessible information", locally_inaccessible_information),
        ("classical exhaustiveness", classical_exhaustiveness),
        ("bar-operation laws", bar_laws),
        ("ensemble principle", ensemble_principle),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2} s)", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} ({secs:.2} s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
