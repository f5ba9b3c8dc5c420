//! Numerical certificates: the CU_α evolution formula, the swap and
//! Hadamard tests, and the correlation-matrix argument showing that a
//! two-layer single-qubit model cannot realize the purity function.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::{
    apply_layer, hadamard_test, layer_affine_map, random_generator, sample_haar_unitary,
    CouplingSpec, LayerSpec, TracePart,
};
use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{kron, partial_trace, ComplexMatrix, Keep, ONE, TOL, ZERO};
use crate::pauli::sigma;
use crate::rng::rng_for;
use crate::states::{pauli_coeffs, purity, sample_mixed, DensityMatrix};

/// Bound on |det T| for the impossibility certificate.
pub const DET_BOUND: f64 = 1e-9;
/// Agreement required from exact-mode oracles.
pub const EXACT_TOL: f64 = 1e-10;

pub const CHECK_NAMES: [&str; 7] = [
    "observation1",
    "evolution-formula",
    "swap-test",
    "hadamard-test",
    "purity-observable",
    "ksigma",
    "affine-map",
];

/// Real 3×3 matrix of two-qubit Pauli correlations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrMatrix {
    pub entries: [[f64; 3]; 3],
}

impl CorrMatrix {
    pub fn zero() -> Self {
        Self {
            entries: [[0.0; 3]; 3],
        }
    }

    pub fn det(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.entries[i][j] = self.entries[j][i];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                p.entries[i][j] = (0..3)
                    .map(|k| self.entries[i][k] * other.entries[k][j])
                    .sum();
            }
        }
        p
    }

    pub fn scaled_add(&self, s: f64, other: &Self) -> Self {
        let mut r = *self;
        for i in 0..3 {
            for j in 0..3 {
                r.entries[i][j] += s * other.entries[i][j];
            }
        }
        r
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        d
    }
}

/// corr(M)_ij = ½ tr(M (σ_i ⊗ σ_j)), i, j ∈ {x, y, z}. The imaginary parts
/// are dropped; they vanish for Hermitian M.
pub fn corr(m: &ComplexMatrix) -> Result<CorrMatrix> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(dim_mismatch("4x4", format!("{}x{}", m.rows(), m.cols())));
    }
    let mut c = CorrMatrix::zero();
    for i in 0..3 {
        for j in 0..3 {
            let p = kron(&sigma(i as u8 + 1), &sigma(j as u8 + 1));
            c.entries[i][j] = 0.5 * m.trace_of_product(&p).re;
        }
    }
    Ok(c)
}

/// Unitary swapping two registers of dimension `d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = ONE;
        }
    }
    s
}

/// Ancilla ⟨Z⟩ after H, controlled-SWAP of two copies of ρ, H. Equals tr(ρ²)
/// exactly when `shots == 0`.
pub fn swap_test_purity(rho: &DensityMatrix, shots: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = rho.dim();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]);
    let id = ComplexMatrix::identity(d * d);
    let p0 = ComplexMatrix::diag(&[ONE, ZERO]);
    let p1 = ComplexMatrix::diag(&[ZERO, ONE]);
    let cswap = &kron(&p0, &id) + &kron(&p1, &swap_operator(d));
    let hh = kron(&h, &id);
    let circuit = hh.matmul(&cswap).matmul(&hh);
    let start = kron(&p0, &kron(rho.matrix(), rho.matrix()));
    let out = partial_trace(&start.conjugate_by(&circuit), 2, d * d, Keep::A)?;
    let z = (out[(0, 0)] - out[(1, 1)]).re;
    if shots == 0 {
        return Ok(z);
    }
    let p = ((1.0 + z) / 2.0).clamp(0.0, 1.0);
    let plus = rand_distr::Binomial::new(shots as u64, p)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng) as f64;
    Ok((2.0 * plus - shots as f64) / shots as f64)
}

/// Pieces of the two-layer certificate, kept for independent checks.
#[derive(Clone, Debug)]
pub struct TwoLayerCertificate {
    /// K_k = (I ⊗ ⟨k|) U (|0⟩ ⊗ I), k = 0, 1.
    pub kraus: [ComplexMatrix; 2],
    /// Q = V† (O ⊗ I) V.
    pub q: ComplexMatrix,
    pub t: CorrMatrix,
}

impl TwoLayerCertificate {
    pub fn build(u: &ComplexMatrix, v: &ComplexMatrix, o: &ComplexMatrix) -> Result<Self> {
        for m in [u, v] {
            if m.rows() != 4 || !m.is_square() {
                return Err(dim_mismatch(
                    "4x4 unitary",
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
            let err = m.unitarity_error();
            if err > TOL {
                return Err(Error::NotUnitary(err));
            }
        }
        if o.rows() != 2 || !o.is_square() {
            return Err(dim_mismatch(
                "2x2 observable",
                format!("{}x{}", o.rows(), o.cols()),
            ));
        }
        let herr = o.hermiticity_error();
        if herr > TOL {
            return Err(Error::NotHermitian(herr));
        }
        let kraus = [0usize, 1].map(|k| ComplexMatrix::from_fn(2, 2, |a, b| u[(2 * a + k, b)]));
        let o_tilde = kron(o, &ComplexMatrix::identity(2));
        let q = v.adjoint().matmul(&o_tilde).matmul(v);
        let id = ComplexMatrix::identity(2);
        let mut total = ComplexMatrix::zeros(4, 4);
        for k in &kraus {
            let j = v.matmul(&kron(k, &id));
            total = &total + &j.adjoint().matmul(&o_tilde).matmul(&j);
        }
        Ok(Self {
            kraus,
            q,
            t: corr(&total)?,
        })
    }

    /// max |Σ_k K_k† K_k − I|.
    pub fn kraus_completeness_error(&self) -> f64 {
        let sum = &self.kraus[0].adjoint().matmul(&self.kraus[0])
            + &self.kraus[1].adjoint().matmul(&self.kraus[1]);
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// C̃_μi = ½ tr(σ_μ Λ(σ_i)) with Λ(X) = Σ_k K_k X K_k†.
    pub fn c_tilde(&self) -> CorrMatrix {
        let mut c = CorrMatrix::zero();
        for i in 0..3 {
            let s = sigma(i as u8 + 1);
            let image = &self.kraus[0].matmul(&s).matmul(&self.kraus[0].adjoint())
                + &self.kraus[1].matmul(&s).matmul(&self.kraus[1].adjoint());
            for mu in 0..3 {
                c.entries[mu][i] = 0.5 * image.trace_of_product(&sigma(mu as u8 + 1)).re;
            }
        }
        c
    }

    pub fn c(&self) -> CorrMatrix {
        corr(&self.q).expect("Q is 4x4")
    }
}

/// T = corr(Σ_k J_k† Õ J_k) and det T for the two-layer model with couplings
/// U, V and readout O.
pub fn observation1_certificate(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    o: &ComplexMatrix,
) -> Result<(CorrMatrix, f64)> {
    let obs = TwoLayerCertificate::build(u, v, o)?;
    Ok((obs.t, obs.t.det()))
}

/// Random 2×2 Hermitian observable with Gaussian entries.
pub fn random_observable(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut n = || -> f64 { StandardNormal.sample(&mut *rng) };
    let (a, b, re, im) = (n(), n(), n(), n());
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(a, 0.0), Complex64::new(re, -im)],
        vec![Complex64::new(re, im), Complex64::new(b, 0.0)],
    ])
    .expect("2x2")
}

/// Ô = SWAP plus the six-parameter family of corrections that leave
/// tr((ρ⊗ρ) Ô) = tr(ρ²) unchanged.
pub fn purity_observable(c: [f64; 6]) -> ComplexMatrix {
    let e = |a: usize, b: usize| {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(a - 1, b - 1)] = ONE;
        m
    };
    let cx = |re: f64, im: f64| Complex64::new(re, im);
    let mut o = swap_operator(2);
    let terms = [
        (cx(0.0, c[0]), &e(2, 3) - &e(3, 2)),
        (cx(c[1], 0.0), &e(2, 2) - &e(3, 3)),
        (cx(c[2], c[3]), &e(1, 2) - &e(1, 3)),
        (cx(c[2], -c[3]), &e(2, 1) - &e(3, 1)),
        (cx(c[4], c[5]), &e(2, 4) - &e(3, 4)),
        (cx(c[4], -c[5]), &e(4, 2) - &e(4, 3)),
    ];
    for (coef, m) in terms {
        o = &o + &m.scale(coef);
    }
    o
}

/// 1 + c₁² + (c₃+c₅)² + (c₄+c₆)².
pub fn purity_observable_det_closed_form(c: [f64; 6]) -> f64 {
    1.0 + c[0] * c[0] + (c[2] + c[4]).powi(2) + (c[3] + c[5]).powi(2)
}

/// det corr(Ô), after confirming Ô reproduces tr(ρ²) on `probes` random
/// single-qubit states. Returns the determinant and the largest purity
/// mismatch seen.
pub fn purity_observable_det(
    c: [f64; 6],
    probes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    let o = purity_observable(c);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let rho = sample_mixed(1, rng);
        let pair = kron(rho.matrix(), rho.matrix());
        let lhs = pair.trace_of_product(&o);
        worst = worst.max((lhs - Complex64::new(purity(&rho), 0.0)).norm());
    }
    Ok((corr(&o)?.det(), worst))
}

/// corr(e^{−ik·Σ} (σ_i ⊗ I) e^{ik·Σ}) with Σ = (XX, YY, ZZ), computed
/// numerically. XX, YY and ZZ commute, so the exponential factorizes.
pub fn ksigma_corr(k: [f64; 3], i: usize) -> Result<CorrMatrix> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidArgument(format!(
            "Pauli index must be 1..=3, got {i}"
        )));
    }
    let mut e = ComplexMatrix::identity(4);
    for (a, &ka) in k.iter().enumerate() {
        let s = sigma(a as u8 + 1);
        let ss = kron(&s, &s);
        // exp(i k S) = cos k + i sin k S since S² = I.
        let f = &ComplexMatrix::identity(4).scale_real(ka.cos())
            + &ss.scale(Complex64::new(0.0, ka.sin()));
        e = e.matmul(&f);
    }
    let op = kron(&sigma(i as u8), &ComplexMatrix::identity(2));
    corr(&e.adjoint().matmul(&op).matmul(&e))
}

/// Closed forms for [`ksigma_corr`].
pub fn ksigma_closed_form(k: [f64; 3], i: usize) -> CorrMatrix {
    let c2 = k.map(|x| (2.0 * x).cos());
    let s2 = k.map(|x| (2.0 * x).sin());
    let mut m = CorrMatrix::zero();
    // (a, b, sign): entries [a][b] and [b][a] for the cyclic pair not containing i.
    let (a, b, sign) = match i {
        1 => (1, 2, 2.0),
        2 => (0, 2, -2.0),
        _ => (0, 1, 2.0),
    };
    m.entries[a][b] = sign * c2[a] * s2[b];
    m.entries[b][a] = -sign * s2[a] * c2[b];
    m
}

/// Outcome of a named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub trials: usize,
    pub max_violation: f64,
    pub pass: bool,
}

impl VerificationReport {
    fn new(name: &str, trials: usize, max_violation: f64, bound: f64) -> Self {
        Self {
            check_name: name.to_string(),
            trials,
            max_violation,
            pass: max_violation.is_finite() && max_violation <= bound,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// CU_α layer output against (r̃₁, λ_α r̃₂, λ_α r̃₃), r̃ the R_z-rotated input.
pub fn check_evolution_formula(trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let n = 1 + t % 2;
        let rho = sample_mixed(n, &mut rng);
        let alpha = rng.random_range(1..(1usize << (2 * n)));
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let tau = sample_mixed(1, &mut rng);
        let r = tau.bloch();
        let lam = pauli_coeffs(&rho).get(alpha);
        let (c, s) = (theta.cos(), theta.sin());
        let rot = [c * r[0] - s * r[1], s * r[0] + c * r[1], r[2]];
        let expected = [rot[0], lam * rot[1], lam * rot[2]];
        let out = apply_layer(
            &tau,
            &rho,
            &LayerSpec::new(theta, CouplingSpec::cu_alpha(n, alpha)),
        )?
        .bloch();
        for k in 0..3 {
            worst = worst.max((out[k] - expected[k]).abs());
        }
    }
    Ok(VerificationReport::new(
        "evolution-formula",
        trials,
        worst,
        EXACT_TOL,
    ))
}

/// Random General layers: simulated channel against its (M, d) map.
pub fn check_affine_map(trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let n = 1 + t % 2;
        let layer = LayerSpec::new(
            rng.random_range(-3.0..3.0),
            CouplingSpec::General {
                generator: random_generator(n + 1, 1.5, &mut rng),
            },
        );
        let rho = sample_mixed(n, &mut rng);
        let tau = sample_mixed(1, &mut rng);
        let direct = apply_layer(&tau, &rho, &layer)?.bloch();
        let mapped = layer_affine_map(&layer, &rho)?.apply(tau.bloch());
        for k in 0..3 {
            worst = worst.max((direct[k] - mapped[k]).abs());
        }
    }
    Ok(VerificationReport::new(
        "affine-map",
        trials,
        worst,
        EXACT_TOL,
    ))
}

pub fn check_swap_test(trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let rho = sample_mixed(1 + t % 2, &mut rng);
        worst = worst.max((swap_test_purity(&rho, 0, &mut rng)? - purity(&rho)).abs());
    }
    Ok(VerificationReport::new(
        "swap-test",
        trials,
        worst,
        EXACT_TOL,
    ))
}

/// Exact-mode Hadamard test against Re and Im of tr(ρU).
pub fn check_hadamard_test(trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let n = 1 + t % 2;
        let rho = sample_mixed(n, &mut rng);
        let u = sample_haar_unitary(1 << n, &mut rng);
        let direct = rho.matrix().trace_of_product(&u);
        let re = hadamard_test(&rho, &u, TracePart::Real, 0, &mut rng)?;
        let im = hadamard_test(&rho, &u, TracePart::Imag, 0, &mut rng)?;
        worst = worst
            .max((re - direct.re).abs())
            .max((im - direct.im).abs());
    }
    Ok(VerificationReport::new(
        "hadamard-test",
        trials,
        worst,
        EXACT_TOL,
    ))
}

/// Haar-random couplings and random readouts; the violation is max |det T|.
/// Kraus completeness and the factorization T = C̃ᵀC are checked on every
/// trial and any failure there is reported as an infinite violation.
pub fn check_two_layer_certificate(trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let u = sample_haar_unitary(4, &mut rng);
        let v = sample_haar_unitary(4, &mut rng);
        let o = random_observable(&mut rng);
        let obs = TwoLayerCertificate::build(&u, &v, &o)?;
        let factored = obs.c_tilde().transpose().matmul(&obs.c());
        if obs.kraus_completeness_error() > 1e-12 || factored.max_abs_diff(&obs.t) > EXACT_TOL {
            worst = f64::INFINITY;
        }
        worst = worst.max(obs.t.det().abs());
    }
    Ok(VerificationReport::new(
        "observation1",
        trials,
        worst,
        DET_BOUND,
    ))
}

/// det corr(Ô) against the closed form, plus the purity identity for Ô.
pub fn check_purity_observable(trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let c: [f64; 6] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let (det, mismatch) = purity_observable_det(c, 50, &mut rng)?;
        worst = worst
            .max(mismatch)
            .max((det - purity_observable_det_closed_form(c)).abs());
    }
    Ok(VerificationReport::new(
        "purity-observable",
        trials,
        worst,
        EXACT_TOL,
    ))
}

/// Closed forms for the KAK-conjugated σ_i ⊗ I, plus the singularity of random
/// real combinations. The violation is the larger of the closed-form error
/// and the combination determinant scaled down to the 1e-10 budget.
pub fn check_ksigma(trials: usize, seed: u64) -> Result<VerificationReport> {
    let mut form_err: f64 = 0.0;
    let mut det_err: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_for(seed, t as u64);
        let k: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.2..3.2));
        let mut combo = CorrMatrix::zero();
        for i in 1..=3 {
            let num = ksigma_corr(k, i)?;
            form_err = form_err.max(num.max_abs_diff(&ksigma_closed_form(k, i)));
            combo = combo.scaled_add(StandardNormal.sample(&mut rng), &num);
        }
        det_err = det_err.max(combo.det().abs());
    }
    let pass = form_err <= EXACT_TOL && det_err <= DET_BOUND;
    Ok(VerificationReport {
        check_name: "ksigma".into(),
        trials,
        max_violation: form_err.max(det_err),
        pass,
    })
}

/// Default trial counts per check.
pub fn default_trials(name: &str) -> Option<usize> {
    Some(match name {
        "observation1" => 1000,
        "evolution-formula" | "affine-map" => 200,
        "swap-test" | "hadamard-test" => 100,
        "purity-observable" => 200,
        "ksigma" => 200,
        _ => return None,
    })
}

pub fn run_check(name: &str, trials: usize, seed: u64) -> Result<VerificationReport> {
    match name {
        "observation1" => check_two_layer_certificate(trials, seed),
        "evolution-formula" => check_evolution_formula(trials, seed),
        "swap-test" => check_swap_test(trials, seed),
        "hadamard-test" => check_hadamard_test(trials, seed),
        "purity-observable" => check_purity_observable(trials, seed),
        "ksigma" => check_ksigma(trials, seed),
        "affine-map" => check_affine_map(trials, seed),
        _ => Err(Error::InvalidArgument(format!(
            "unknown check '{name}', expected one of: {}",
            CHECK_NAMES.join(", ")
        ))),
    }
}
