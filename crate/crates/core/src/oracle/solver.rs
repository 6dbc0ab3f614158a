//! Random-restart alternating least squares on the Gram residual. Only
//! ever used to find witnesses; a failed search proves nothing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{inner, CMat, CVec, C64};
use crate::oracle::quantum::{Alt, Row};
use crate::oracle::{OracleConfig, QuantumWitness};

const DAMPING: f64 = 1e-10;

pub(crate) fn search(
    rows: &[Row],
    g: &CMat,
    side_effects: bool,
    cfg: &OracleConfig,
    seed: u64,
) -> Option<QuantumWitness> {
    let spans: Vec<Vec<&Vec<CVec>>> = rows
        .iter()
        .map(|r| {
            r.alts
                .iter()
                .filter_map(|a| match a {
                    Alt::Span(b) => Some(b),
                    Alt::Opaque(_) => None,
                })
                .collect()
        })
        .collect();
    if spans.iter().any(|s| s.is_empty()) {
        return None;
    }
    let n = rows.len();
    let m = if side_effects { n.max(1) } else { 1 };
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let bases: Vec<&Vec<CVec>> = spans.iter().map(|s| s[rng.gen_range(0..s.len())]).collect();
        let mut coeffs: Vec<CVec> = bases.iter().map(|b| random_unit(&mut rng, b.len())).collect();
        let mut phis: Vec<CVec> = bases.iter().zip(&coeffs).map(|(b, c)| combine(b, c)).collect();
        let mut ancillas: Vec<CVec> = if side_effects {
            (0..n).map(|_| random_unit(&mut rng, m)).collect()
        } else {
            vec![CVec::from_element(1, C64::from(1.0)); n]
        };

        let mut best = residual(g, &phis, &ancillas);
        let mut budget = cfg.iterations;
        let mut it = 0;
        while it < budget && best > cfg.tau_gram / 4.0 {
            for i in 0..n {
                let b = bases[i];
                let eqs: Vec<(CVec, C64)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let w = phis[j].clone() * inner(&ancillas[i], &ancillas[j]);
                        let row = CVec::from_iterator(b.len(), b.iter().map(|bk| inner(bk, &w)));
                        (row, g[(i, j)].conj())
                    })
                    .collect();
                coeffs[i] = solve_unit(&eqs, &coeffs[i]);
                phis[i] = combine(b, &coeffs[i]);
            }
            if side_effects {
                for i in 0..n {
                    let eqs: Vec<(CVec, C64)> = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| {
                            let w = ancillas[j].clone() * inner(&phis[i], &phis[j]);
                            (w, g[(i, j)].conj())
                        })
                        .collect();
                    ancillas[i] = solve_unit(&eqs, &ancillas[i]);
                }
            }
            let r = residual(g, &phis, &ancillas);
            it += 1;
            // Close to a solution: allow more iterations to polish.
            if it == budget && r < 1e-5 && budget < cfg.iterations * 10 {
                budget += cfg.iterations;
            }
            best = r;
        }
        if best <= cfg.tau_gram / 2.0 {
            return Some(QuantumWitness {
                row_input: rows.iter().map(|r| r.input).collect(),
                inputs: rows.iter().map(|r| r.ray.clone()).collect(),
                outputs: phis,
                ancillas,
            });
        }
    }
    None
}

fn random_unit(rng: &mut ChaCha8Rng, k: usize) -> CVec {
    loop {
        let v = CVec::from_fn(k, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let nv = v.norm();
        if nv > 1e-3 {
            return v / C64::from(nv);
        }
    }
}

fn combine(basis: &[CVec], c: &CVec) -> CVec {
    let mut v = basis[0].clone() * c[0];
    for (b, ck) in basis.iter().zip(c.iter()).skip(1) {
        v += b * *ck;
    }
    let nv = v.norm();
    v / C64::from(nv)
}

/// Damped least squares for `row_j · x = rhs_j`, renormalised to unit
/// length; falls back to the previous iterate on degenerate systems.
fn solve_unit(eqs: &[(CVec, C64)], prev: &CVec) -> CVec {
    let k = prev.len();
    if eqs.is_empty() {
        return prev.clone();
    }
    let mut ata = CMat::zeros(k, k);
    let mut atb = CVec::zeros(k);
    for (row, rhs) in eqs {
        // Equation: row† x = rhs.
        ata += row * row.adjoint();
        atb += row * *rhs;
    }
    for d in 0..k {
        ata[(d, d)] += C64::from(DAMPING);
    }
    atb += prev * C64::from(DAMPING);
    match ata.lu().solve(&atb) {
        Some(x) if x.norm() > 1e-12 && x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
            let nx = x.norm();
            x / C64::from(nx)
        }
        _ => prev.clone(),
    }
}

fn residual(g: &CMat, phis: &[CVec], ancillas: &[CVec]) -> f64 {
    let n = phis.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let v = inner(&phis[i], &phis[j]) * inner(&ancillas[i], &ancillas[j]);
            worst = worst.max((g[(i, j)] - v).norm());
        }
    }
    worst
}
