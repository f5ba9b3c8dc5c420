//! Re-uploading layers as CPTP maps on the signal qubit, their affine Bloch
//! representation, model evaluation, measurement and the Hadamard test.
//!
//! The signal qubit A is always the most significant tensor factor, so a layer
//! acts on `τ ⊗ ρ` with the input register B in the low-order bits.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{
    exp_i_hermitian, kron, partial_trace, ComplexMatrix, HermitianGenerator, Keep, ONE, TOL, ZERO,
};
use crate::pauli::{pauli_projectors, sigma, PauliWord};
use crate::states::{DensityMatrix, PauliCoeffs};

/// Entangling gate between the signal qubit and the input register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CouplingSpec {
    /// I ⊗ |0⟩⟨0| + X ⊗ |1⟩⟨1| (single-qubit inputs).
    Cnot,
    /// I ⊗ P₊(σ_j) + σ_i ⊗ P₋(σ_j) (single-qubit inputs).
    CuIj { i: u8, j: u8 },
    /// I ⊗ W⁺ + X ⊗ W⁻ for a non-identity word W on the input register.
    CuAlpha { word: PauliWord },
    /// exp(iH) for an arbitrary generator on signal + input.
    General { generator: HermitianGenerator },
}

impl CouplingSpec {
    pub fn cu_alpha(n: usize, alpha: usize) -> Self {
        CouplingSpec::CuAlpha {
            word: PauliWord::from_index(n, alpha),
        }
    }

    pub fn is_general(&self) -> bool {
        matches!(self, CouplingSpec::General { .. })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            CouplingSpec::Cnot => {
                if n != 1 {
                    return Err(dim_mismatch("1 input qubit for CNOT", n));
                }
            }
            CouplingSpec::CuIj { i, j } => {
                if n != 1 {
                    return Err(dim_mismatch("1 input qubit for CU(i,j)", n));
                }
                if !(1..=3).contains(i) || !(1..=3).contains(j) {
                    return Err(Error::InvalidArgument(format!(
                        "CU(i,j) needs i, j in 1..=3, got ({i},{j})"
                    )));
                }
            }
            CouplingSpec::CuAlpha { word } => {
                if word.n_qubits() != n {
                    return Err(dim_mismatch(format!("{n}-letter word"), word.n_qubits()));
                }
                if word.is_identity() {
                    return Err(Error::InvalidArgument(
                        "CU(alpha) needs a non-identity word".into(),
                    ));
                }
            }
            CouplingSpec::General { generator } => {
                if generator.n_qubits() != n + 1 {
                    return Err(dim_mismatch(
                        format!("{}-qubit generator", n + 1),
                        generator.n_qubits(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Pauli index α whose coefficient λ_α the coupling multiplies into the
    /// (y, z) components, for the restricted couplings.
    pub fn scaling_index(&self) -> Option<usize> {
        match self {
            CouplingSpec::Cnot => Some(3),
            CouplingSpec::CuIj { i: 1, j } => Some(*j as usize),
            CouplingSpec::CuAlpha { word } => Some(word.index()),
            _ => None,
        }
    }
}

/// Unitary of a coupling on 1 + n qubits.
pub fn build_coupling(c: &CouplingSpec, n: usize) -> Result<ComplexMatrix> {
    c.validate(n)?;
    Ok(match c {
        CouplingSpec::Cnot => controlled_pair(&sigma(1), &PauliWord::new(vec![3])?)?,
        CouplingSpec::CuIj { i, j } => controlled_pair(&sigma(*i), &PauliWord::new(vec![*j])?)?,
        CouplingSpec::CuAlpha { word } => controlled_pair(&sigma(1), word)?,
        CouplingSpec::General { generator } => exp_i_hermitian(generator),
    })
}

fn controlled_pair(target: &ComplexMatrix, word: &PauliWord) -> Result<ComplexMatrix> {
    let (plus, minus) = pauli_projectors(word)?;
    Ok(&kron(&ComplexMatrix::identity(2), &plus) + &kron(target, &minus))
}

/// R_z(θ) = diag(e^{−iθ/2}, e^{iθ/2}).
pub fn rz(theta: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[
        Complex64::from_polar(1.0, -theta / 2.0),
        Complex64::from_polar(1.0, theta / 2.0),
    ])
}

/// exp(−i(φ/2) n·σ): rotates Bloch vectors by φ about the unit axis n.
pub fn bloch_rotation(axis: [f64; 3], angle: f64) -> ComplexMatrix {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let mut u = ComplexMatrix::identity(2).scale_real(c);
    for (k, a) in axis.iter().enumerate() {
        if *a != 0.0 {
            let term = sigma(k as u8 + 1).scale(Complex64::new(0.0, -s * a / norm));
            u = &u + &term;
        }
    }
    u
}

/// One re-uploading layer: R_z(θ) on the signal qubit, then the coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub theta: f64,
    pub coupling: CouplingSpec,
}

impl LayerSpec {
    pub fn new(theta: f64, coupling: CouplingSpec) -> Self {
        Self { theta, coupling }
    }

    /// U = C · (R_z(θ) ⊗ I).
    pub fn unitary(&self, n: usize) -> Result<ComplexMatrix> {
        let c = build_coupling(&self.coupling, n)?;
        if self.theta == 0.0 {
            return Ok(c);
        }
        let rot = kron(&rz(self.theta), &ComplexMatrix::identity(1 << n));
        Ok(c.matmul(&rot))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSignal {
    Plus,
    Zero,
}

impl InitialSignal {
    pub fn bloch(self) -> [f64; 3] {
        match self {
            InitialSignal::Plus => [1.0, 0.0, 0.0],
            InitialSignal::Zero => [0.0, 0.0, 1.0],
        }
    }

    pub fn state(self) -> DensityMatrix {
        bloch_to_state(self.bloch())
    }
}

/// An L-layer circuit with linear readout f = w · r⁽ᴸ⁾ + b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct ReuploadModel {
    pub n: usize,
    pub layers: Vec<LayerSpec>,
    pub w: [f64; 3],
    pub b: f64,
    pub initial_signal: InitialSignal,
}

#[derive(Deserialize)]
struct RawModel {
    n: usize,
    layers: Vec<LayerSpec>,
    w: [f64; 3],
    b: f64,
    initial_signal: Option<InitialSignal>,
}

impl TryFrom<RawModel> for ReuploadModel {
    type Error = Error;
    fn try_from(raw: RawModel) -> Result<Self> {
        let initial = raw
            .initial_signal
            .unwrap_or_else(|| default_initial_signal(&raw.layers));
        let m = ReuploadModel {
            n: raw.n,
            layers: raw.layers,
            w: raw.w,
            b: raw.b,
            initial_signal: initial,
        };
        m.validate()?;
        Ok(m)
    }
}

fn default_initial_signal(layers: &[LayerSpec]) -> InitialSignal {
    if layers.iter().all(|l| l.coupling.is_general()) {
        InitialSignal::Zero
    } else {
        InitialSignal::Plus
    }
}

impl ReuploadModel {
    /// Builds a model; the initial signal is |+⟩ unless every layer is General.
    pub fn new(n: usize, layers: Vec<LayerSpec>, w: [f64; 3], b: f64) -> Result<Self> {
        let initial_signal = default_initial_signal(&layers);
        let m = Self {
            n,
            layers,
            w,
            b,
            initial_signal,
        };
        m.validate()?;
        Ok(m)
    }

    /// Restricted CNOT model with the given angles.
    pub fn restricted_cnot(thetas: &[f64], w: [f64; 3], b: f64) -> Result<Self> {
        let layers = thetas
            .iter()
            .map(|&t| LayerSpec::new(t, CouplingSpec::Cnot))
            .collect();
        Self::new(1, layers, w, b)
    }

    pub fn with_initial_signal(mut self, s: InitialSignal) -> Self {
        self.initial_signal = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument(
                "input register needs at least one qubit".into(),
            ));
        }
        if self.layers.is_empty() {
            return Err(Error::InvalidArgument(
                "model needs at least one layer".into(),
            ));
        }
        for layer in &self.layers {
            layer.coupling.validate(self.n)?;
        }
        if !self.w.iter().chain([&self.b]).all(|v| v.is_finite())
            || self.layers.iter().any(|l| !l.theta.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite model parameter".into()));
        }
        Ok(())
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.theta).collect()
    }

    pub fn set_thetas(&mut self, thetas: &[f64]) {
        assert_eq!(thetas.len(), self.layers.len());
        for (l, &t) in self.layers.iter_mut().zip(thetas) {
            l.theta = t;
        }
    }

    pub fn readout(&self, r: [f64; 3]) -> f64 {
        dot3(self.w, r) + self.b
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// r ↦ M r + d on the signal Bloch vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineBlochMap {
    pub m: [[f64; 3]; 3],
    pub d: [f64; 3],
}

impl AffineBlochMap {
    pub fn identity() -> Self {
        Self {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            d: [0.0; 3],
        }
    }

    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        let mut out = self.d;
        for (i, o) in out.iter_mut().enumerate() {
            *o += dot3(self.m[i], r);
        }
        out
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &AffineBlochMap) -> AffineBlochMap {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * first.m[k][j]).sum();
            }
        }
        AffineBlochMap {
            m,
            d: self.apply(first.d),
        }
    }
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn bloch_to_state(r: [f64; 3]) -> DensityMatrix {
    let m = ComplexMatrix::from_rows(&[
        vec![
            Complex64::new(0.5 * (1.0 + r[2]), 0.0),
            Complex64::new(0.5 * r[0], -0.5 * r[1]),
        ],
        vec![
            Complex64::new(0.5 * r[0], 0.5 * r[1]),
            Complex64::new(0.5 * (1.0 - r[2]), 0.0),
        ],
    ])
    .expect("2x2");
    DensityMatrix::from_trusted(m)
}

fn check_signal_and_input(tau: &DensityMatrix, rho: &DensityMatrix, n: usize) -> Result<()> {
    if tau.n_qubits() != 1 {
        return Err(dim_mismatch("1-qubit signal state", tau.n_qubits()));
    }
    if rho.n_qubits() != n {
        return Err(dim_mismatch(format!("{n}-qubit input"), rho.n_qubits()));
    }
    Ok(())
}

/// τ ↦ tr_B(U(τ ⊗ ρ)U†) for an explicit unitary on signal + input.
pub fn apply_unitary_layer(
    tau: &DensityMatrix,
    rho: &DensityMatrix,
    u: &ComplexMatrix,
) -> Result<DensityMatrix> {
    let d = rho.dim();
    if u.rows() != 2 * d || !u.is_square() {
        return Err(dim_mismatch(
            format!("{0}x{0} unitary", 2 * d),
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    let joint = kron(tau.matrix(), rho.matrix()).conjugate_by(u);
    Ok(DensityMatrix::from_trusted(partial_trace(
        &joint,
        2,
        d,
        Keep::A,
    )?))
}

pub fn apply_layer(
    tau: &DensityMatrix,
    rho: &DensityMatrix,
    layer: &LayerSpec,
) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    check_signal_and_input(tau, rho, n)?;
    apply_unitary_layer(tau, rho, &layer.unitary(n)?)
}

/// Affine map of a unitary layer with input ρ, from its definition
/// M_ij = ½ tr[(σ_i⊗I) U (σ_j⊗ρ) U†], d_i = ½ tr[(σ_i⊗I) U (I⊗ρ) U†].
pub fn unitary_affine_map(u: &ComplexMatrix, rho: &DensityMatrix) -> Result<AffineBlochMap> {
    let d = rho.dim();
    if u.rows() != 2 * d || !u.is_square() {
        return Err(dim_mismatch(
            format!("{0}x{0} unitary", 2 * d),
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    let mut out = AffineBlochMap {
        m: [[0.0; 3]; 3],
        d: [0.0; 3],
    };
    for j in 0..4u8 {
        let evolved = kron(&sigma(j), rho.matrix()).conjugate_by(u);
        let reduced = partial_trace(&evolved, 2, d, Keep::A)?;
        for i in 0..3 {
            let v = 0.5 * PauliWord::new(vec![i as u8 + 1])?.trace_with(&reduced).re;
            if j == 0 {
                out.d[i] = v;
            } else {
                out.m[i][j as usize - 1] = v;
            }
        }
    }
    Ok(out)
}

pub fn layer_affine_map(layer: &LayerSpec, rho: &DensityMatrix) -> Result<AffineBlochMap> {
    layer.coupling.validate(rho.n_qubits())?;
    unitary_affine_map(&layer.unitary(rho.n_qubits())?, rho)
}

/// Bloch vector of the signal after every layer, starting from the initial signal.
pub fn signal_trajectory(model: &ReuploadModel, rho: &DensityMatrix) -> Result<Vec<[f64; 3]>> {
    if rho.n_qubits() != model.n {
        return Err(dim_mismatch(
            format!("{}-qubit input", model.n),
            rho.n_qubits(),
        ));
    }
    let mut tau = model.initial_signal.state();
    let mut out = vec![tau.bloch()];
    for layer in &model.layers {
        tau = apply_layer(&tau, rho, layer)?;
        out.push(tau.bloch());
    }
    Ok(out)
}

/// Final signal Bloch vector and readout f = w · r⁽ᴸ⁾ + b.
pub fn run_model(model: &ReuploadModel, rho: &DensityMatrix) -> Result<([f64; 3], f64)> {
    let r = *signal_trajectory(model, rho)?
        .last()
        .expect("at least the initial point");
    Ok((r, model.readout(r)))
}

/// tr(τ W) + b with W = w·σ; exact for `shots == 0`, otherwise estimated
/// from computational-basis samples with shots split evenly across axes.
pub fn expectation(
    tau: &DensityMatrix,
    w: [f64; 3],
    b: f64,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    if tau.n_qubits() != 1 {
        return Err(dim_mismatch("1-qubit state", tau.n_qubits()));
    }
    let r = tau.bloch();
    if shots == 0 {
        return Ok(dot3(w, r) + b);
    }
    Ok(dot3(w, sample_bloch(r, shots, rng)?) + b)
}

/// Unbiased per-axis estimate of a Bloch vector from `shots` measurements.
pub fn sample_bloch(r: [f64; 3], shots: usize, rng: &mut ChaCha8Rng) -> Result<[f64; 3]> {
    if shots < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 shots (one per axis), got {shots}"
        )));
    }
    let mut est = [0.0; 3];
    for (k, e) in est.iter_mut().enumerate() {
        let n_k = shots / 3 + usize::from(k < shots % 3);
        *e = sample_pm_one_mean(r[k], n_k, rng);
    }
    Ok(est)
}

/// Mean of `n` samples of a ±1 variable with expectation `mean`.
pub(crate) fn sample_pm_one_mean(mean: f64, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let p = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
    let plus = Binomial::new(n as u64, p)
        .expect("valid binomial")
        .sample(rng) as f64;
    (2.0 * plus - n as f64) / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TracePart {
    Real,
    Imag,
}

/// Hadamard test: ancilla prepared by H (or H then S† for the imaginary
/// part), controlled-U onto ρ, H, then ⟨Z⟩ on the ancilla.
pub fn hadamard_test(
    rho: &DensityMatrix,
    u: &ComplexMatrix,
    part: TracePart,
    shots: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let d = rho.dim();
    if u.rows() != d || !u.is_square() {
        return Err(dim_mismatch(
            format!("{d}x{d} unitary"),
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    let err = u.unitarity_error();
    if err > TOL {
        return Err(Error::NotUnitary(err));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]);
    let prep = match part {
        TracePart::Real => h.clone(),
        TracePart::Imag => ComplexMatrix::diag(&[ONE, Complex64::new(0.0, -1.0)]).matmul(&h),
    };
    let id = ComplexMatrix::identity(d);
    let p0 = ComplexMatrix::diag(&[ONE, ZERO]);
    let p1 = ComplexMatrix::diag(&[ZERO, ONE]);
    let cu = &kron(&p0, &id) + &kron(&p1, u);
    let circuit = kron(&h, &id).matmul(&cu).matmul(&kron(&prep, &id));
    let start = kron(&p0, rho.matrix());
    let out = partial_trace(&start.conjugate_by(&circuit), 2, d, Keep::A)?;
    let z = (out[(0, 0)] - out[(1, 1)]).re;
    if shots == 0 {
        Ok(z)
    } else {
        Ok(sample_pm_one_mean(z, shots, rng))
    }
}

/// Per-layer transfer tensor: the layer's affine map is linear in the input's
/// Pauli coefficients, M_ij = Σ_α λ_α G[i][j][α] and d_i = Σ_α λ_α G[i][0][α]
/// with λ_0 = 1 and G[i][j][α] = tr[U†(σ_i⊗I)U (σ_j⊗W_α)] / (2d).
#[derive(Clone, Debug, PartialEq)]
pub struct LayerTransfer {
    n: usize,
    g: Vec<f64>,
}

impl LayerTransfer {
    pub fn from_unitary(u: &ComplexMatrix, n: usize) -> Self {
        let d = 1usize << n;
        let n_alpha = d * d;
        let mut g = vec![0.0; 3 * 4 * n_alpha];
        let id = ComplexMatrix::identity(d);
        let u_dag = u.adjoint();
        for i in 0..3 {
            let o = kron(&sigma(i as u8 + 1), &id).conjugate_by(&u_dag);
            for j in 0..4 {
                for alpha in 0..n_alpha {
                    let word = PauliWord::from_index(n + 1, j * n_alpha + alpha);
                    g[(i * 4 + j) * n_alpha + alpha] = word.trace_with(&o).re / (2 * d) as f64;
                }
            }
        }
        Self { n, g }
    }

    pub fn from_layer(layer: &LayerSpec, n: usize) -> Result<Self> {
        Ok(Self::from_unitary(&layer.unitary(n)?, n))
    }

    pub fn n_alpha(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }

    /// Affine map for coefficients `lambda_full` (with λ_0 = 1 in front).
    pub fn affine(&self, lambda_full: &[f64]) -> AffineBlochMap {
        let na = self.n_alpha();
        debug_assert_eq!(lambda_full.len(), na);
        let mut out = AffineBlochMap {
            m: [[0.0; 3]; 3],
            d: [0.0; 3],
        };
        for i in 0..3 {
            for j in 0..4 {
                let row = &self.g[(i * 4 + j) * na..(i * 4 + j + 1) * na];
                let v: f64 = row.iter().zip(lambda_full).map(|(g, l)| g * l).sum();
                if j == 0 {
                    out.d[i] = v;
                } else {
                    out.m[i][j - 1] = v;
                }
            }
        }
        out
    }
}

/// Transfer tensors for every layer of a model; evaluates the model on
/// Pauli coefficients without touching density matrices.
#[derive(Clone, Debug)]
pub struct ModelTransfer {
    pub layers: Vec<LayerTransfer>,
}

impl ModelTransfer {
    pub fn new(model: &ReuploadModel) -> Result<Self> {
        let layers = model
            .layers
            .iter()
            .map(|l| LayerTransfer::from_layer(l, model.n))
            .collect::<Result<_>>()?;
        Ok(Self { layers })
    }

    /// Signal Bloch vectors r⁽⁰⁾..r⁽ᴸ⁾.
    pub fn trajectory(&self, initial: [f64; 3], lambda_full: &[f64]) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.layers.len() + 1);
        out.push(initial);
        for t in &self.layers {
            let r = t.affine(lambda_full).apply(*out.last().expect("non-empty"));
            out.push(r);
        }
        out
    }

    pub fn final_bloch(&self, initial: [f64; 3], lambda_full: &[f64]) -> [f64; 3] {
        *self
            .trajectory(initial, lambda_full)
            .last()
            .expect("non-empty")
    }
}

/// f for a model given directly by Pauli coefficients (which need not form a
/// state; the map is affine in λ so this extends f polynomially).
pub fn evaluate_on_coeffs(
    model: &ReuploadModel,
    transfer: &ModelTransfer,
    lambda: &PauliCoeffs,
) -> f64 {
    model.readout(transfer.final_bloch(model.initial_signal.bloch(), &lambda.with_identity()))
}

/// Haar-random unitary: modified Gram–Schmidt on a complex Gaussian matrix,
/// which matches QR with a phase-corrected R diagonal.
pub fn sample_haar_unitary(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    use rand_distr::StandardNormal;
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect()
        })
        .collect();
    for k in 0..d {
        for prev in 0..k {
            let proj: Complex64 = (0..d).map(|r| cols[prev][r].conj() * cols[k][r]).sum();
            for r in 0..d {
                let p = cols[prev][r];
                cols[k][r] -= proj * p;
            }
        }
        let norm = cols[k].iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        for v in cols[k].iter_mut() {
            *v /= norm;
        }
    }
    ComplexMatrix::from_fn(d, d, |r, c| cols[c][r])
}

/// Uniformly random generator coefficients in [−scale, scale].
pub fn random_generator(n_qubits: usize, scale: f64, rng: &mut ChaCha8Rng) -> HermitianGenerator {
    let coeffs = (0..(1usize << (2 * n_qubits)) - 1)
        .map(|_| rng.random_range(-scale..=scale))
        .collect();
    HermitianGenerator::new(n_qubits, coeffs).expect("length matches")
}
