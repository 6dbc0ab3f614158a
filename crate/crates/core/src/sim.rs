//! Dense state vectors over a register of finite-dimensional sites.

use crate::linalg::{inner, kron_all, CMat, CVec};

#[derive(Clone, Debug)]
pub struct StateVector {
    dims: Vec<usize>,
    amp: CVec,
}

impl StateVector {
    /// The product state of one vector per site.
    pub fn product(parts: &[CVec]) -> Self {
        StateVector {
            dims: parts.iter().map(|p| p.len()).collect(),
            amp: kron_all(parts),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amp
    }

    pub fn overlap(&self, v: &CVec) -> f64 {
        inner(&self.amp, v).norm()
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut d = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            d[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        d
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (d, n)| acc * n + d)
    }

    /// Applies `u` to one site.
    pub fn apply_local(&mut self, site: usize, u: &CMat) {
        let mut out = CVec::zeros(self.amp.len());
        for i in 0..self.amp.len() {
            let a = self.amp[i];
            if a.norm() == 0.0 {
                continue;
            }
            let mut d = self.digits(i);
            let k = d[site];
            for r in 0..self.dims[site] {
                d[site] = r;
                let j = self.index(&d);
                out[j] += u[(r, k)] * a;
            }
        }
        self.amp = out;
    }

    /// Applies `u` to `target` on the branch where `control` reads `value`.
    pub fn apply_controlled_local(&mut self, control: usize, value: usize, target: usize, u: &CMat) {
        let mut out = CVec::zeros(self.amp.len());
        for i in 0..self.amp.len() {
            let a = self.amp[i];
            let mut d = self.digits(i);
            if d[control] != value {
                out[i] += a;
                continue;
            }
            let k = d[target];
            for r in 0..self.dims[target] {
                d[target] = r;
                let j = self.index(&d);
                out[j] += u[(r, k)] * a;
            }
        }
        self.amp = out;
    }

    /// Applies the basis permutation `f` acting on the digits of `sites`.
    /// `f` must be a bijection on those digit tuples.
    pub fn apply_classical(&mut self, sites: &[usize], f: impl Fn(&[usize]) -> Vec<usize>) {
        let mut out = CVec::zeros(self.amp.len());
        for i in 0..self.amp.len() {
            let mut d = self.digits(i);
            let local: Vec<usize> = sites.iter().map(|&s| d[s]).collect();
            for (s, v) in sites.iter().zip(f(&local)) {
                d[*s] = v;
            }
            let j = self.index(&d);
            out[j] += self.amp[i];
        }
        self.amp = out;
    }

    /// Outcome probabilities of one site in its computational basis.
    pub fn marginal(&self, site: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dims[site]];
        for i in 0..self.amp.len() {
            p[self.digits(i)[site]] += self.amp[i].norm_sqr();
        }
        p
    }

    pub fn norm(&self) -> f64 {
        self.amp.norm()
    }
}

/// The unitary whose columns are the given orthonormal vectors.
pub fn basis_change(columns: &[CVec]) -> CMat {
    let n = columns.len();
    CMat::from_fn(n, n, |r, c| columns[c][r])
}

/// `|a⟩|b⟩ → |a⟩|a ⊕ b⟩` on two qubits.
pub fn cnot(state: &mut StateVector, control: usize, target: usize) {
    state.apply_classical(&[control, target], |d| vec![d[0], d[0] ^ d[1]]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, C64};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn cnot_on_plus_zero_is_bell() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVec::from_vec(vec![c(h), c(h)]);
        let mut s = StateVector::product(&[plus, basis_vector(2, 0)]);
        cnot(&mut s, 0, 1);
        let bell = CVec::from_vec(vec![c(h), c(0.0), c(0.0), c(h)]);
        assert!((s.overlap(&bell) - 1.0).abs() < 1e-12);
        assert!((s.marginal(0)[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn local_unitary_rotates_one_site() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = CMat::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]);
        let mut s = StateVector::product(&[basis_vector(2, 0), basis_vector(3, 2)]);
        s.apply_local(0, &had);
        assert!((s.marginal(0)[1] - 0.5).abs() < 1e-12);
        assert!((s.marginal(1)[2] - 1.0).abs() < 1e-12);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}
