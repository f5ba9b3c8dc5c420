//! Generalized Pauli words W_α = σ^(a_1) ⊗ … ⊗ σ^(a_n).
//!
//! A word is stored by its letters (0 ↔ I, 1 ↔ X, 2 ↔ Y, 3 ↔ Z) and indexed by
//! the base-4 number formed with the first letter most significant, matching
//! the qubit ordering used everywhere else in the crate.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I, ONE, ZERO};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct PauliWord {
    letters: Vec<u8>,
}

impl PauliWord {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidArgument(
                "Pauli word needs at least one letter".into(),
            ));
        }
        if let Some(bad) = letters.iter().find(|&&l| l > 3) {
            return Err(Error::InvalidArgument(format!(
                "Pauli letter {bad} is not in 0..=3"
            )));
        }
        Ok(Self { letters })
    }

    /// Word with base-4 index `alpha` on `n` qubits.
    pub fn from_index(n: usize, alpha: usize) -> Self {
        assert!(
            alpha < 1usize << (2 * n),
            "index {alpha} out of range for {n} qubits"
        );
        let letters = (0..n)
            .map(|q| ((alpha >> (2 * (n - 1 - q))) & 3) as u8)
            .collect();
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            letters: vec![0; n],
        }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.letters.len()
    }

    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, &l| acc * 4 + l as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == 0)
    }

    /// (x-mask, z-mask, phase) with W[r][c] = phase · δ(r, c ⊕ x) · (−1)^{|z ∧ c|}.
    fn action(&self) -> (usize, usize, Complex64) {
        let n = self.letters.len();
        let mut x = 0usize;
        let mut z = 0usize;
        let mut phase = ONE;
        for (q, &l) in self.letters.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match l {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    phase *= I;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        (x, z, phase)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        self.add_scaled_to(&mut m, 1.0);
        m
    }

    /// m += coeff · W, touching only the d nonzero entries of W.
    pub fn add_scaled_to(&self, m: &mut ComplexMatrix, coeff: f64) {
        let (x, z, phase) = self.action();
        let scaled = phase * coeff;
        for c in 0..self.dim() {
            let sign = if (z & c).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m[(c ^ x, c)] += scaled * sign;
        }
    }

    /// tr(A · W) in O(d).
    pub fn trace_with(&self, a: &ComplexMatrix) -> Complex64 {
        let (x, z, phase) = self.action();
        let mut acc = ZERO;
        for r in 0..self.dim() {
            let sign = if (z & r).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += a[(r, r ^ x)] * sign;
        }
        acc * phase
    }
}

impl TryFrom<Vec<u8>> for PauliWord {
    type Error = Error;
    fn try_from(letters: Vec<u8>) -> Result<Self> {
        Self::new(letters)
    }
}

impl From<PauliWord> for Vec<u8> {
    fn from(w: PauliWord) -> Vec<u8> {
        w.letters
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .letters
            .iter()
            .map(|&l| ['I', 'X', 'Y', 'Z'][l as usize])
            .collect();
        write!(f, "{s}")
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn pauli_matrix(w: &PauliWord) -> ComplexMatrix {
    w.matrix()
}

/// σ^(k) for k in 0..=3.
pub fn sigma(k: u8) -> ComplexMatrix {
    PauliWord::new(vec![k]).expect("valid letter").matrix()
}

pub fn pauli_x() -> ComplexMatrix {
    sigma(1)
}

pub fn pauli_y() -> ComplexMatrix {
    sigma(2)
}

pub fn pauli_z() -> ComplexMatrix {
    sigma(3)
}

/// Projectors (W⁺, W⁻) = ½(I ± W) onto the ±1 eigenspaces of a non-identity word.
pub fn pauli_projectors(w: &PauliWord) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if w.is_identity() {
        return Err(Error::InvalidArgument(
            "identity word has no −1 eigenspace".into(),
        ));
    }
    let id = ComplexMatrix::identity(w.dim());
    let wm = w.matrix();
    Ok(((&id + &wm).scale_real(0.5), (&id - &wm).scale_real(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, kron};

    #[test]
    fn letters_and_index_agree() {
        for n in 1..=3 {
            for alpha in 0..(1usize << (2 * n)) {
                let w = PauliWord::from_index(n, alpha);
                assert_eq!(w.index(), alpha);
            }
        }
        assert_eq!(PauliWord::new(vec![1, 3]).unwrap().index(), 7);
    }

    #[test]
    fn single_letters_match_textbook() {
        let y = pauli_y();
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(pauli_z()[(1, 1)], Complex64::new(-1.0, 0.0));
        let xz = PauliWord::new(vec![1, 3]).unwrap().matrix();
        assert!(xz.max_abs_diff(&kron(&pauli_x(), &pauli_z())) < 1e-15);
        let yxz = PauliWord::new(vec![2, 1, 3]).unwrap().matrix();
        let expected = kron(&pauli_y(), &kron(&pauli_x(), &pauli_z()));
        assert!(yxz.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn non_identity_words_are_traceless_involutions() {
        for n in 1..=2 {
            for alpha in 1..(1usize << (2 * n)) {
                let m = PauliWord::from_index(n, alpha).matrix();
                assert!(m.trace().norm() < 1e-15);
                assert!(m.matmul(&m).max_abs_diff(&ComplexMatrix::identity(1 << n)) < 1e-15);
                assert!(m.is_hermitian(0.0));
            }
        }
    }

    #[test]
    fn words_are_trace_orthogonal() {
        let n = 2;
        let d = 4.0;
        for a in 0..16 {
            let wa = PauliWord::from_index(n, a);
            for b in 0..16 {
                let wb = PauliWord::from_index(n, b).matrix();
                let t = wa.trace_with(&wb);
                let expected = if a == b { d } else { 0.0 };
                assert!((t - Complex64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn trace_with_matches_dense() {
        let w = PauliWord::new(vec![2, 1]).unwrap();
        let a = ComplexMatrix::from_fn(4, 4, |r, c| Complex64::new(r as f64 + 0.5, c as f64 - 1.0));
        let dense = a.matmul(&w.matrix()).trace();
        assert!((dense - w.trace_with(&a)).norm() < 1e-13);
    }

    #[test]
    fn projectors_for_z_x_and_zz() {
        let (p, m) = pauli_projectors(&PauliWord::new(vec![3]).unwrap()).unwrap();
        assert_eq!(p[(0, 0)], ONE);
        assert_eq!(m[(1, 1)], ONE);
        assert!(p[(1, 1)].norm() == 0.0);

        let (p, m) = pauli_projectors(&PauliWord::new(vec![1]).unwrap()).unwrap();
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let minus = ComplexMatrix::from_real(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!(p.max_abs_diff(&plus) < 1e-15);
        assert!(m.max_abs_diff(&minus) < 1e-15);

        // Oracle: eigendecomposition of Z⊗Z, grouped by eigenvalue sign.
        let zz = PauliWord::new(vec![3, 3]).unwrap();
        let (p, m) = pauli_projectors(&zz).unwrap();
        let (vals, vecs) = hermitian_eig(&zz.matrix()).unwrap();
        let mut p_ref = ComplexMatrix::zeros(4, 4);
        let mut m_ref = ComplexMatrix::zeros(4, 4);
        for (k, v) in vals.iter().enumerate() {
            let col: Vec<Complex64> = (0..4).map(|r| vecs[(r, k)]).collect();
            let proj = ComplexMatrix::outer(&col, &col);
            if *v > 0.0 {
                p_ref = &p_ref + &proj;
            } else {
                m_ref = &m_ref + &proj;
            }
        }
        assert!(p.max_abs_diff(&p_ref) < 1e-12);
        assert!(m.max_abs_diff(&m_ref) < 1e-12);
        assert!((p.trace().re - 2.0).abs() < 1e-15);
        assert!(p.matmul(&p).max_abs_diff(&p) < 1e-15);
        assert!((&p + &m).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn identity_word_has_no_projectors() {
        assert!(pauli_projectors(&PauliWord::identity(2)).is_err());
    }

    #[test]
    fn rejects_bad_letters() {
        assert!(PauliWord::new(vec![4]).is_err());
        assert!(PauliWord::new(vec![]).is_err());
    }
}
