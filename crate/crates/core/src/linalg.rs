//! Dense complex matrices sized for a handful of qubits.
//!
//! Everything here works on row-major `Complex64` storage. Dimensions never
//! exceed 2^5 in this crate, so the kernels are plain triple loops; the only
//! iterative routine is the cyclic Jacobi eigensolver for Hermitian matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Error, Result};
use crate::pauli::PauliWord;

/// Tolerance used for unitarity and Hermiticity assertions.
pub const TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(dim_mismatch(n_cols, bad.len()));
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self {
            rows,
            cols,
            data: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    /// tr(self · other) without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += self[(r, c)] * other[(c, r)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row_b = &other.data[k * other.cols..(k + 1) * other.cols];
                let row_out = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (o, &b) in row_out.iter_mut().zip(row_b) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// U · self · U†
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Average with the adjoint; removes round-off asymmetry.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    /// Applies `v` to columns (p, q) from the right: A ← A·V on that plane.
    fn rotate_cols(&mut self, p: usize, q: usize, v: &[[Complex64; 2]; 2]) {
        for k in 0..self.rows {
            let a = self[(k, p)];
            let b = self[(k, q)];
            self[(k, p)] = a * v[0][0] + b * v[1][0];
            self[(k, q)] = a * v[0][1] + b * v[1][1];
        }
    }

    /// Applies `v†` to rows (p, q) from the left: A ← V†·A on that plane.
    fn rotate_rows(&mut self, p: usize, q: usize, v: &[[Complex64; 2]; 2]) {
        for k in 0..self.cols {
            let a = self[(p, k)];
            let b = self[(q, k)];
            self[(p, k)] = v[0][0].conj() * a + v[1][0].conj() * b;
            self[(q, k)] = v[0][1].conj() * a + v[1][1].conj() * b;
        }
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c {
                    acc += self[(r, c)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols) {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Serialized as nested `[[ [re, im], ... ], ...]` rows.
impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .data
            .chunks(self.cols)
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Which factor of a bipartite system survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on H_A ⊗ H_B (A is the most significant factor).
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Keep,
) -> Result<ComplexMatrix> {
    let dim = dim_a * dim_b;
    if !m.is_square() || m.rows != dim {
        return Err(dim_mismatch(
            format!("{dim}x{dim}"),
            format!("{}x{}", m.rows, m.cols),
        ));
    }
    let out = match keep {
        Keep::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Keep::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    };
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues in descending order and the unitary whose columns are
/// the matching eigenvectors, so that `h = P diag(λ) P†`.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(dim_mismatch(
            "square matrix",
            format!("{}x{}", h.rows, h.cols),
        ));
    }
    let herm_err = h.hermiticity_error();
    // Inputs assembled from products carry round-off proportional to their size.
    if herm_err > 1e-12 * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(herm_err));
    }
    let n = h.rows;
    let mut a = h.hermitian_part();
    let mut p = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * h.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() <= threshold {
            break;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let z = a[(i, j)];
                let g = z.norm();
                if g < 1e-300 {
                    continue;
                }
                let phase = z / g;
                let (aii, ajj) = (a[(i, i)].re, a[(j, j)].re);
                let tau = (ajj - aii) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // V = diag(1, e^{-iφ}) · [[c, s], [-s, c]] zeroes a_ij.
                let e = phase.conj();
                let v = [
                    [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                    [e * -s, e * c],
                ];
                a.rotate_cols(i, j, &v);
                a.rotate_rows(i, j, &v);
                a[(i, j)] = ZERO;
                a[(j, i)] = ZERO;
                a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
                a[(j, j)] = Complex64::new(a[(j, j)].re, 0.0);
                p.rotate_cols(i, j, &v);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| p[(r, order[c])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    let (values, _) = hermitian_eig(h)?;
    Ok(*values.last().expect("non-empty spectrum"))
}

/// exp(iH) for a Hermitian matrix H, through its eigendecomposition.
pub fn exp_i_matrix(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, p) = hermitian_eig(h)?;
    let n = h.rows;
    let phases: Vec<Complex64> = values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l))
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = ZERO;
            for (k, ph) in phases.iter().enumerate() {
                acc += p[(r, k)] * ph * p[(c, k)].conj();
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// A traceless Hermitian operator H = Σ_α c_α W_α over the non-identity Pauli words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianGenerator {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl HermitianGenerator {
    /// `coeffs[k]` multiplies the Pauli word with index `k + 1`.
    pub fn new(n_qubits: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = (1usize << (2 * n_qubits)) - 1;
        if n_qubits == 0 || coeffs.len() != expected {
            return Err(dim_mismatch(expected, coeffs.len()));
        }
        Ok(Self { n_qubits, coeffs })
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            coeffs: vec![0.0; (1usize << (2 * n_qubits)) - 1],
        }
    }

    /// A single Pauli term `coeff · W_word`.
    pub fn single(word: &PauliWord, coeff: f64) -> Result<Self> {
        if word.is_identity() {
            return Err(Error::InvalidArgument(
                "identity word has no generator slot".into(),
            ));
        }
        let mut g = Self::zero(word.n_qubits());
        g.coeffs[word.index() - 1] = coeff;
        Ok(g)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn negated(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut h = ComplexMatrix::zeros(d, d);
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                PauliWord::from_index(self.n_qubits, k + 1).add_scaled_to(&mut h, c);
            }
        }
        h
    }
}

/// exp(iH) for a generator given in the Pauli basis.
pub fn exp_i_hermitian(h: &HermitianGenerator) -> ComplexMatrix {
    exp_i_matrix(&h.matrix()).expect("Pauli sums are Hermitian by construction")
}
