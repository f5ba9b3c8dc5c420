//! Density matrices, their generalized Bloch coordinates and the samplers
//! used to build datasets.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{kron, min_eigenvalue, partial_trace, ComplexMatrix, Keep, ONE, TOL, ZERO};
use crate::pauli::PauliWord;

/// A validated density operator on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.rows();
        if !matrix.is_square() || !dim.is_power_of_two() || dim < 2 {
            return Err(dim_mismatch(
                "2^n x 2^n matrix",
                format!("{}x{}", matrix.rows(), matrix.cols()),
            ));
        }
        let herm = matrix.hermiticity_error();
        if herm > TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let matrix = matrix.hermitian_part();
        let min = min_eigenvalue(&matrix)?;
        if min < -TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    /// Skips validation; for outputs of maps already known to be CPTP.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square() && matrix.rows().is_power_of_two());
        let n_qubits = matrix.rows().trailing_zeros() as usize;
        Self {
            n_qubits,
            matrix: matrix.hermitian_part(),
        }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) amplitude vector.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("zero amplitude vector".into()));
        }
        let psi: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        if !psi.len().is_power_of_two() || psi.len() < 2 {
            return Err(dim_mismatch("2^n amplitudes", psi.len()));
        }
        Ok(Self::from_trusted(ComplexMatrix::outer(&psi, &psi)))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self::from_trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// Single-qubit state with Bloch vector `r` (|r| ≤ 1 is checked).
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        density_from_coeffs(&PauliCoeffs::new(1, r.to_vec())?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Bloch vector (⟨X⟩, ⟨Y⟩, ⟨Z⟩); single-qubit states only.
    pub fn bloch(&self) -> [f64; 3] {
        assert_eq!(self.n_qubits, 1, "Bloch vector requires a single qubit");
        let m = &self.matrix;
        [
            2.0 * m[(0, 1)].re,
            -2.0 * m[(0, 1)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ]
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(kron(&self.matrix, &other.matrix))
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            matrix: ComplexMatrix,
        }
        let raw = Raw::deserialize(d)?;
        DensityMatrix::new(raw.matrix).map_err(serde::de::Error::custom)
    }
}

/// Generalized Bloch coordinates λ_α = tr(ρ W_α), α = 1..4^n − 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliCoeffs {
    n_qubits: usize,
    lambda: Vec<f64>,
}

impl PauliCoeffs {
    pub fn new(n_qubits: usize, lambda: Vec<f64>) -> Result<Self> {
        let expected = (1usize << (2 * n_qubits)) - 1;
        if n_qubits == 0 || lambda.len() != expected {
            return Err(dim_mismatch(expected, lambda.len()));
        }
        if let Some(bad) = lambda
            .iter()
            .find(|l| l.abs() > 1.0 + TOL || !l.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "|λ| must be ≤ 1, got {bad}"
            )));
        }
        Ok(Self { n_qubits, lambda })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lambda
    }

    /// λ_α for α ≥ 1; `get(0)` returns the normalization 1.
    pub fn get(&self, alpha: usize) -> f64 {
        if alpha == 0 {
            1.0
        } else {
            self.lambda[alpha - 1]
        }
    }

    /// Coefficients with the implicit λ_0 = 1 prepended.
    pub fn with_identity(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(self.lambda.iter().copied())
            .collect()
    }
}

pub fn pauli_coeffs(rho: &DensityMatrix) -> PauliCoeffs {
    let n = rho.n_qubits();
    let lambda = (1..1usize << (2 * n))
        .map(|a| {
            PauliWord::from_index(n, a)
                .trace_with(rho.matrix())
                .re
                .clamp(-1.0, 1.0)
        })
        .collect();
    PauliCoeffs {
        n_qubits: n,
        lambda,
    }
}

/// ρ = (I + Σ λ_α W_α)/d, rejecting coefficient vectors that are not states.
pub fn density_from_coeffs(c: &PauliCoeffs) -> Result<DensityMatrix> {
    let m = coeffs_matrix(c);
    let min = min_eigenvalue(&m)?;
    if min < -TOL {
        return Err(Error::NotPositive(min));
    }
    Ok(DensityMatrix::from_trusted(m))
}

fn coeffs_matrix(c: &PauliCoeffs) -> ComplexMatrix {
    let d = 1usize << c.n_qubits;
    let mut m = ComplexMatrix::identity(d);
    for (k, &l) in c.lambda.iter().enumerate() {
        if l != 0.0 {
            PauliWord::from_index(c.n_qubits, k + 1).add_scaled_to(&mut m, l);
        }
    }
    m.scale_real(1.0 / d as f64)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().trace_of_product(rho.matrix()).re
}

/// Swap operator on two copies of a 2-qubit register that exchanges only the
/// first qubit of each copy. Basis ordering: (a1 b1)(a2 b2).
pub fn local_swap_first_qubit() -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(16, 16);
    for a1 in 0..2 {
        for b1 in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let from = (a1 << 3) | (b1 << 2) | (a2 << 1) | b2;
                    let to = (a2 << 3) | (b1 << 2) | (a1 << 1) | b2;
                    s[(to, from)] = ONE;
                }
            }
        }
    }
    s
}

/// Rényi-2 entanglement entropy −ln tr((ρ⊗ρ) S_A) of a pure 2-qubit state
/// across its first qubit.
pub fn renyi2_entropy(psi: &DensityMatrix) -> Result<f64> {
    if psi.n_qubits() != 2 {
        return Err(dim_mismatch("2 qubits", psi.n_qubits()));
    }
    let p = purity(psi);
    if (p - 1.0).abs() > 1e-8 {
        return Err(Error::NotPure(p));
    }
    let doubled = kron(psi.matrix(), psi.matrix());
    let overlap = doubled.trace_of_product(&local_swap_first_qubit()).re;
    Ok(-overlap.ln())
}

/// Same quantity through the reduced state: −ln tr(ρ_A²).
pub fn renyi2_entropy_reduced(psi: &DensityMatrix) -> Result<f64> {
    let rho_a = partial_trace(psi.matrix(), 2, psi.dim() / 2, Keep::A)?;
    Ok(-rho_a.trace_of_product(&rho_a).re.ln())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar-random pure state on `n` qubits (normalized complex Gaussian vector).
pub fn sample_haar_pure(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(normal(rng), normal(rng)))
        .collect();
    DensityMatrix::from_pure(&amps).expect("Gaussian vector is nonzero almost surely")
}

/// Full-rank mixed state G G† / tr(G G†) for a complex Gaussian G
/// (Hilbert–Schmidt measure).
pub fn sample_mixed(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let d = 1usize << n;
    let g = ComplexMatrix::from_fn(d, d, |_, _| Complex64::new(normal(rng), normal(rng)));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.scale_real(1.0 / tr).hermitian_part())
}

/// Uniformly distributed direction on the unit sphere.
pub fn sample_unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [normal(rng), normal(rng), normal(rng)];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-12 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// Single-qubit state with Bloch vector uniform in the unit ball.
pub fn sample_bloch_ball(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let dir = sample_unit_vector(rng);
    let radius = rng.random::<f64>().cbrt();
    bloch_state([dir[0] * radius, dir[1] * radius, dir[2] * radius])
}

/// Pure single-qubit state with Bloch vector uniform on the unit sphere.
pub fn sample_bloch_sphere(rng: &mut ChaCha8Rng) -> DensityMatrix {
    bloch_state(sample_unit_vector(rng))
}

fn bloch_state(r: [f64; 3]) -> DensityMatrix {
    let half = 0.5;
    let m = ComplexMatrix::from_rows(&[
        vec![
            Complex64::new(half * (1.0 + r[2]), 0.0),
            Complex64::new(half * r[0], -half * r[1]),
        ],
        vec![
            Complex64::new(half * r[0], half * r[1]),
            Complex64::new(half * (1.0 - r[2]), 0.0),
        ],
    ])
    .expect("2x2");
    DensityMatrix::from_trusted(m)
}

/// ρ(t) = |ψ(t)⟩⟨ψ(t)| with |ψ(t)⟩ = t|0⟩ + √(1−t²)|1⟩.
pub fn psi_t(t: f64) -> Result<DensityMatrix> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "t must lie in (0, 1), got {t}"
        )));
    }
    let amps = [
        Complex64::new(t, 0.0),
        Complex64::new((1.0 - t * t).sqrt(), 0.0),
    ];
    DensityMatrix::from_pure(&amps)
}

/// ρ(t) parameterized by λ = 2t² − 1 ∈ (−1, 1).
pub fn psi_lambda(lambda: f64) -> Result<DensityMatrix> {
    psi_t(((1.0 + lambda) / 2.0).sqrt())
}

/// A dataset element.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledState {
    pub state: DensityMatrix,
    pub label: f64,
    /// Named scalar describing the state (purity, entropy, r₃, λ, ...).
    pub meta: Option<(String, f64)>,
}

impl LabeledState {
    pub fn new(state: DensityMatrix, label: f64) -> Self {
        Self {
            state,
            label,
            meta: None,
        }
    }

    pub fn with_meta(mut self, name: &str, value: f64) -> Self {
        self.meta = Some((name.to_string(), value));
        self
    }

    pub fn meta_value(&self) -> Option<f64> {
        self.meta.as_ref().map(|(_, v)| *v)
    }
}

/// Zero matrix helper kept here to avoid importing `ZERO` downstream.
#[allow(dead_code)]
pub(crate) fn zero_like(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_for;

    fn random_mixed(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        // Convex mixture of Haar pure states.
        let d = 1 << n;
        let mut m = ComplexMatrix::zeros(d, d);
        let weights: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            m = &m + &sample_haar_pure(n, rng).matrix().scale_real(w / total);
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn coeffs_of_basic_states() {
        let zero = DensityMatrix::from_pure(&[ONE, ZERO]).unwrap();
        assert_eq!(pauli_coeffs(&zero).as_slice(), &[0.0, 0.0, 1.0]);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert_eq!(pauli_coeffs(&mixed).as_slice(), &[0.0, 0.0, 0.0]);
        for t in [0.2, 0.5, 0.9] {
            let l = pauli_coeffs(&psi_t(t).unwrap());
            let expected = [2.0 * t * (1.0 - t * t).sqrt(), 0.0, 2.0 * t * t - 1.0];
            for (a, b) in l.as_slice().iter().zip(expected) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn density_from_coeffs_examples() {
        let mixed = density_from_coeffs(&PauliCoeffs::new(1, vec![0.0; 3]).unwrap()).unwrap();
        assert!(
            mixed
                .matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(1).matrix())
                < 1e-15
        );
        let plus = density_from_coeffs(&PauliCoeffs::new(1, vec![1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!((purity(&plus) - 1.0).abs() < 1e-14);
        assert!((plus.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        let lam = PauliCoeffs::new(1, vec![0.7, 0.5, 0.3]).unwrap();
        let rho = density_from_coeffs(&lam).unwrap();
        assert!((purity(&rho) - 0.5 * (1.0 + 0.49 + 0.25 + 0.09)).abs() < 1e-14);
    }

    #[test]
    fn density_from_coeffs_rejects_unphysical() {
        let lam = PauliCoeffs::new(1, vec![0.9, 0.9, 0.0]).unwrap();
        assert!(matches!(
            density_from_coeffs(&lam),
            Err(Error::NotPositive(_))
        ));
        assert!(PauliCoeffs::new(1, vec![1.5, 0.0, 0.0]).is_err());
        assert!(PauliCoeffs::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn coefficient_round_trip() {
        let mut rng = rng_for(3, 0);
        for n in 1..=2 {
            for _ in 0..20 {
                let rho = random_mixed(n, &mut rng);
                let back = density_from_coeffs(&pauli_coeffs(&rho)).unwrap();
                assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn density_matrix_validation() {
        let not_unit = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(not_unit),
            Err(Error::InvalidTrace(_))
        ));
        let negative = ComplexMatrix::from_real(2, 2, &[1.2, 0.0, 0.0, -0.2]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(Error::NotPositive(_))
        ));
        let skew = ComplexMatrix::from_real(2, 2, &[0.5, 0.3, -0.3, 0.5]);
        assert!(matches!(
            DensityMatrix::new(skew),
            Err(Error::NotHermitian(_))
        ));
        assert!(DensityMatrix::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0)).is_err());
    }

    #[test]
    fn purity_examples() {
        let pure = psi_t(0.3).unwrap();
        assert!((purity(&pure) - 1.0).abs() < 1e-14);
        assert!((purity(&DensityMatrix::maximally_mixed(1)) - 0.5).abs() < 1e-15);
        let r = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch(r).unwrap();
        let r2 = r.iter().map(|x| x * x).sum::<f64>();
        assert!((purity(&rho) - 0.5 * (1.0 + r2)).abs() < 1e-14);
        let mut rng = rng_for(9, 1);
        for n in 1..=3 {
            let p = purity(&random_mixed(n, &mut rng));
            assert!(p >= 1.0 / (1 << n) as f64 - 1e-10 && p <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn renyi_examples() {
        let zero = [ONE, ZERO];
        let plus = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let product: Vec<Complex64> = zero
            .iter()
            .flat_map(|a| plus.iter().map(move |b| a * b))
            .collect();
        let s = renyi2_entropy(&DensityMatrix::from_pure(&product).unwrap()).unwrap();
        assert!(s.abs() < 1e-12);

        let bell = [ONE, ZERO, ZERO, ONE];
        let s = renyi2_entropy(&DensityMatrix::from_pure(&bell).unwrap()).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn renyi_routes_agree_on_haar_states() {
        let mut rng = rng_for(21, 0);
        for _ in 0..50 {
            let psi = sample_haar_pure(2, &mut rng);
            let a = renyi2_entropy(&psi).unwrap();
            let b = renyi2_entropy_reduced(&psi).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn renyi_rejects_mixed() {
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(matches!(renyi2_entropy(&mixed), Err(Error::NotPure(_))));
    }

    #[test]
    fn psi_t_examples_and_domain() {
        let plus = psi_t(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let l = pauli_coeffs(&plus);
        assert!((l.get(1) - 1.0).abs() < 1e-12 && l.get(3).abs() < 1e-12);
        assert!((pauli_coeffs(&psi_t(0.5).unwrap()).get(3) + 0.5).abs() < 1e-14);
        let l = pauli_coeffs(&psi_t(0.9).unwrap());
        assert!((l.get(1) - 2.0 * 0.9 * 0.19f64.sqrt()).abs() < 1e-14);
        assert!((l.get(3) - 0.62).abs() < 1e-14);
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(psi_t(bad).is_err());
        }
    }

    #[test]
    fn haar_states_are_pure_and_deterministic() {
        let a = sample_haar_pure(1, &mut rng_for(4, 0));
        let b = sample_haar_pure(1, &mut rng_for(4, 0));
        assert_eq!(a, b);
        assert!((purity(&a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_average_reduced_purity() {
        // E[tr ρ_A²] = (d_A + d_B)/(d_A d_B + 1) = 0.8 for two qubits.
        let mut rng = rng_for(2024, 0);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| {
                let psi = sample_haar_pure(2, &mut rng);
                (-renyi2_entropy_reduced(&psi).unwrap()).exp()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.8).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn bloch_ball_class_balance() {
        let th = (1.0 + 2f64.powf(-2.0 / 3.0)) / 2.0;
        let mut rng = rng_for(99, 0);
        let n = 100_000;
        let mut above = 0usize;
        for _ in 0..n {
            let rho = sample_bloch_ball(&mut rng);
            let r = rho.bloch();
            assert!(r.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12);
            if purity(&rho) >= th {
                above += 1;
            }
        }
        let frac = above as f64 / n as f64;
        // Binomial 3σ at p = 0.5 is ≈ 0.0047; the stated band is 0.01.
        assert!((frac - 0.5).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn bloch_ball_is_deterministic_and_psd() {
        let a = sample_bloch_ball(&mut rng_for(1, 2));
        let b = sample_bloch_ball(&mut rng_for(1, 2));
        assert_eq!(a, b);
        let mut rng = rng_for(1, 3);
        for _ in 0..200 {
            let rho = sample_bloch_ball(&mut rng);
            assert!(min_eigenvalue(rho.matrix()).unwrap() >= -1e-12);
        }
    }
}
