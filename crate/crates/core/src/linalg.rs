//! Dense complex linear algebra used by the quantum model: rays, spans,
//! orthocomplements, principal angles, Kronecker products and isometry
//! completion.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVec = DVector<C64>;
pub type CMat = DMatrix<C64>;

/// Norm tolerance for unit vectors.
pub const TAU_NORM: f64 = 1e-9;
/// Two unit vectors are the same ray when `|<a|b>| >= 1 - TAU_RAY`.
pub const TAU_RAY: f64 = 1e-9;
/// Residual below which a vector counts as lying in a span.
pub const TAU_RANK: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.dotc(b)
}

pub fn norm(v: &CVec) -> f64 {
    v.norm()
}

/// Unit vector with a canonical global phase: the first component whose
/// modulus exceeds 1e-6 is made real and positive.
pub fn canonical_ray(v: &CVec) -> CVec {
    let n = v.norm();
    let mut out = v / C64::from(n);
    if let Some(k) = out.iter().position(|z| z.norm() > 1e-6) {
        let phase = out[k] / C64::from(out[k].norm());
        out /= phase;
    }
    out
}

pub fn same_ray(a: &CVec, b: &CVec) -> bool {
    a.len() == b.len() && inner(a, b).norm() >= 1.0 - TAU_RAY
}

pub fn basis_vector(dim: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[k] = C64::from(1.0);
    v
}

/// Orthonormal basis of the span of `vectors` (twice-iterated modified
/// Gram-Schmidt). Vectors whose residual falls below `tol` are dropped.
pub fn orthonormal_basis(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = inner(q, &r);
                r -= q * p;
            }
        }
        let n = r.norm();
        if n > tol {
            basis.push(r / C64::from(n));
        }
    }
    basis
}

pub fn rank(vectors: &[CVec], tol: f64) -> usize {
    orthonormal_basis(vectors, tol).len()
}

/// Norm of the orthogonal projection of `v` onto the span of the
/// orthonormal `basis`.
pub fn projection_norm(v: &CVec, basis: &[CVec]) -> f64 {
    basis
        .iter()
        .map(|q| inner(q, v).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn project(v: &CVec, basis: &[CVec]) -> CVec {
    let mut out = CVec::zeros(v.len());
    for q in basis {
        out += q * inner(q, v);
    }
    out
}

/// Whether the unit vector `v` lies in the span of `basis`.
pub fn in_span(v: &CVec, basis: &[CVec]) -> bool {
    let residual = (v - project(v, basis)).norm();
    residual <= 1e-7 * v.norm().max(1.0)
}

/// Orthonormal basis of the orthogonal complement of span(`basis`) in C^dim.
pub fn orth_complement(basis: &[CVec], dim: usize) -> Vec<CVec> {
    let mut all: Vec<CVec> = orthonormal_basis(basis, TAU_RANK);
    let k = all.len();
    for i in 0..dim {
        let e = basis_vector(dim, i);
        let mut r = e;
        for _ in 0..2 {
            for q in &all {
                let p = inner(q, &r);
                r -= q * p;
            }
        }
        let n = r.norm();
        if n > 1e-6 {
            all.push(r / C64::from(n));
        }
        if all.len() == dim {
            break;
        }
    }
    all.split_off(k)
}

pub fn columns(vectors: &[CVec], dim: usize) -> CMat {
    let mut m = CMat::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Largest cosine of the principal angles between two spans given by
/// orthonormal bases. Zero when either span is trivial.
pub fn max_principal_cosine(a: &[CVec], b: &[CVec]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dim = a[0].len();
    let qa = columns(a, dim);
    let qb = columns(b, dim);
    let m = qa.adjoint() * qb;
    let sv = m.svd(false, false).singular_values;
    sv.iter().cloned().fold(0.0_f64, f64::max).min(1.0)
}

/// Dimension of the intersection of two spans (orthonormal bases).
pub fn intersection_dim(a: &[CVec], b: &[CVec]) -> usize {
    let mut all: Vec<CVec> = a.to_vec();
    all.extend(b.iter().cloned());
    (a.len() + b.len()).saturating_sub(rank(&all, 1e-7))
}

pub fn kron(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

pub fn kron_all(parts: &[CVec]) -> CVec {
    let mut acc = CVec::from_element(1, C64::from(1.0));
    for p in parts {
        acc = kron(&acc, p);
    }
    acc
}

pub fn kron_mat(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn gram(vectors: &[CVec]) -> CMat {
    let n = vectors.len();
    CMat::from_fn(n, n, |i, j| inner(&vectors[i], &vectors[j]))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()) * C64::from(0.5);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Factor a PSD Hermitian matrix `g` as the Gram matrix of vectors:
/// returns `v_i` with `<v_i|v_j> = g_ij` (up to the clipping of tiny
/// negative eigenvalues).
pub fn gram_factor(g: &CMat) -> Vec<CVec> {
    let n = g.nrows();
    let h = (g + g.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(h);
    // g = V diag(l) V^dagger; v_i(k) = sqrt(l_k) * conj(V_ik)
    (0..n)
        .map(|i| {
            CVec::from_fn(n, |k, _| {
                let l = eig.eigenvalues[k].max(0.0).sqrt();
                eig.eigenvectors[(i, k)].conj() * C64::from(l)
            })
        })
        .collect()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    let n = u.nrows();
    u.ncols() == n && max_abs_diff(&(u.adjoint() * u), &CMat::identity(n, n)) <= tol
}

/// Completes the partial isometry `inputs[i] -> outputs[i]` (equal Gram
/// matrices required) to a unitary on C^dim. Returns `None` when the Gram
/// matrices differ by more than `tol`.
pub fn extend_isometry(inputs: &[CVec], outputs: &[CVec], tol: f64) -> Option<CMat> {
    if inputs.is_empty() {
        return None;
    }
    let dim = inputs[0].len();
    if max_abs_diff(&gram(inputs), &gram(outputs)) > tol {
        return None;
    }
    // Orthonormalise the inputs while carrying the same linear
    // combinations over to the outputs.
    let mut qin: Vec<CVec> = Vec::new();
    let mut qout: Vec<CVec> = Vec::new();
    for (v, w) in inputs.iter().zip(outputs) {
        let mut r = v.clone();
        let mut s = w.clone();
        for _ in 0..2 {
            for (q, p) in qin.iter().zip(&qout) {
                let coef = inner(q, &r);
                r -= q * coef;
                s -= p * coef;
            }
        }
        let n = r.norm();
        if n > 1e-7 {
            qin.push(r / C64::from(n));
            qout.push(s / C64::from(n));
        }
    }
    let cin = orth_complement(&qin, dim);
    let cout = orth_complement(&orthonormal_basis(&qout, 1e-7), dim);
    qin.extend(cin);
    qout.extend(cout);
    if qin.len() != dim || qout.len() != dim {
        return None;
    }
    let a = columns(&qin, dim);
    let b = columns(&qout, dim);
    Some(b * a.adjoint())
}

/// Permutation matrix sending basis state `k` to `perm[k]`.
pub fn permutation_matrix(perm: &[usize]) -> CMat {
    let n = perm.len();
    let mut m = CMat::zeros(n, n);
    for (k, &p) in perm.iter().enumerate() {
        m[(p, k)] = C64::from(1.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> CVec {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CVec::from_vec(vec![c(s, 0.0), c(s, 0.0)])
    }

    #[test]
    fn rays_ignore_global_phase() {
        let a = plus();
        let b = &a * c(0.0, 1.0);
        assert!(same_ray(&a, &b));
        assert!((canonical_ray(&b) - &a).norm() < 1e-12);
        assert!(!same_ray(&a, &basis_vector(2, 0)));
    }

    #[test]
    fn complement_of_a_line_in_the_plane() {
        let comp = orth_complement(&[basis_vector(2, 0)], 2);
        assert_eq!(comp.len(), 1);
        assert!(same_ray(&comp[0], &basis_vector(2, 1)));
        assert!(orth_complement(&[basis_vector(2, 0), basis_vector(2, 1)], 2).is_empty());
    }

    #[test]
    fn principal_cosine_of_zero_and_plus() {
        let cos = max_principal_cosine(&[basis_vector(2, 0)], &[plus()]);
        assert!((cos - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn isometry_completion_is_unitary() {
        let inputs = vec![basis_vector(2, 0), plus()];
        let outputs = vec![plus(), basis_vector(2, 0)];
        let u = extend_isometry(&inputs, &outputs, 1e-9).unwrap();
        assert!(is_unitary(&u, 1e-9));
        assert!(same_ray(&(&u * &inputs[1]), &outputs[1]));
        assert!(extend_isometry(&[basis_vector(2, 0), plus()], &[basis_vector(2, 0), basis_vector(2, 1)], 1e-9).is_none());
    }

    #[test]
    fn gram_factor_reproduces_matrix() {
        let g = gram(&[basis_vector(2, 0), plus()]);
        let f = gram_factor(&g);
        assert!(max_abs_diff(&gram(&f), &g) < 1e-12);
    }

    #[test]
    fn intersection_of_planes_in_three_dimensions() {
        let a = [basis_vector(3, 0), basis_vector(3, 1)];
        let b = [basis_vector(3, 1), basis_vector(3, 2)];
        assert_eq!(intersection_dim(&a, &b), 1);
        assert_eq!(intersection_dim(&a, &[basis_vector(3, 2)]), 0);
    }
}
