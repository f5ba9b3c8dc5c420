//! Realizing polynomials in the input's Pauli coefficients with restricted
//! re-uploading circuits: layer scheduling, the Δ-parameterization, coefficient
//! extraction, the Jacobian at the trivial point and damped Gauss–Newton fits.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{evaluate_on_coeffs, CouplingSpec, LayerSpec, ModelTransfer, ReuploadModel};
use crate::error::{Error, Result};
use crate::rng::rng_for;
use crate::states::{pauli_coeffs, psi_lambda, PauliCoeffs};

/// Step for the seed of Gauss–Newton fits.
pub const SEED_DELTA: f64 = 1e-2;
/// Step of the central differences used for Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-5;
const LM_DAMPING: f64 = 1e-6;
const CHECK_TOL: f64 = 1e-8;
const PROBE_RADIUS: f64 = 0.9;
const PROBE_SEED: u64 = 0x5eed_c0de;
const FIT_RESTARTS: usize = 24;

/// c · Π λ_α^{e_α}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialSpec {
    pub c: f64,
    pub exps: BTreeMap<usize, u32>,
}

impl MonomialSpec {
    pub fn new(c: f64, exps: &[(usize, u32)]) -> Self {
        Self {
            c,
            exps: exps.iter().copied().filter(|&(_, e)| e > 0).collect(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.exps.values().sum()
    }

    /// Π λ_α^{e_α} at the given coefficients.
    pub fn eval_basis(&self, lambda: &PauliCoeffs) -> f64 {
        self.exps
            .iter()
            .map(|(&a, &e)| lambda.get(a).powi(e as i32))
            .product()
    }
}

/// c₀ + Σ_ω c_ω Π_α λ_α^{e_ω^{(α)}} over an n-qubit input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial")]
pub struct PolynomialSpec {
    pub n: usize,
    pub c0: f64,
    pub monomials: Vec<MonomialSpec>,
}

#[derive(Deserialize)]
struct RawPolynomial {
    n: usize,
    c0: f64,
    monomials: Vec<MonomialSpec>,
}

impl TryFrom<RawPolynomial> for PolynomialSpec {
    type Error = Error;
    fn try_from(r: RawPolynomial) -> Result<Self> {
        PolynomialSpec::new(r.n, r.c0, r.monomials)
    }
}

impl PolynomialSpec {
    pub fn new(n: usize, c0: f64, monomials: Vec<MonomialSpec>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("polynomial needs n ≥ 1".into()));
        }
        let max_alpha = (1usize << (2 * n)) - 1;
        for m in &monomials {
            if m.exps.values().all(|&e| e == 0) {
                return Err(Error::InvalidArgument(
                    "monomial without a positive exponent".into(),
                ));
            }
            if let Some(&a) = m.exps.keys().find(|&&a| a == 0 || a > max_alpha) {
                return Err(Error::InvalidArgument(format!(
                    "Pauli index {a} outside 1..={max_alpha}"
                )));
            }
        }
        if !c0.is_finite() || monomials.iter().any(|m| !m.c.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite polynomial coefficient".into(),
            ));
        }
        Ok(Self { n, c0, monomials })
    }

    /// Σ_k v[k] λ_α^k with `v[0]` the constant.
    pub fn univariate(n: usize, alpha: usize, v: &[f64]) -> Result<Self> {
        let monomials = v
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c != 0.0)
            .map(|(k, &c)| MonomialSpec::new(c, &[(alpha, k as u32)]))
            .collect();
        Self::new(n, v.first().copied().unwrap_or(0.0), monomials)
    }

    /// ½(1 + λ₁² + λ₂² + λ₃²) = tr(ρ²) for a single qubit.
    pub fn purity() -> Self {
        let monomials = (1..=3).map(|a| MonomialSpec::new(0.5, &[(a, 2)])).collect();
        Self::new(1, 0.5, monomials).expect("valid")
    }

    /// Σ_ω Σ_α e_ω^{(α)}.
    pub fn total_degree(&self) -> u32 {
        self.monomials.iter().map(MonomialSpec::degree).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.monomials
            .iter()
            .map(MonomialSpec::degree)
            .max()
            .unwrap_or(0)
    }

    /// The single variable this polynomial depends on, if any.
    pub fn single_variable(&self) -> Option<usize> {
        let mut vars = self.monomials.iter().flat_map(|m| m.exps.keys().copied());
        let first = vars.next()?;
        vars.all(|a| a == first).then_some(first)
    }

    /// Dense coefficient vector (c₀, c₁, …, c_D) of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Option<Vec<f64>> {
        let alpha = self.single_variable()?;
        let mut v = vec![0.0; self.max_degree() as usize + 1];
        v[0] = self.c0;
        for m in &self.monomials {
            v[m.exps[&alpha] as usize] += m.c;
        }
        Some(v)
    }

    pub fn eval(&self, lambda: &PauliCoeffs) -> f64 {
        self.c0
            + self
                .monomials
                .iter()
                .map(|m| m.c * m.eval_basis(lambda))
                .sum::<f64>()
    }

    /// (c₀, c₁, …, c_Ω).
    pub fn coefficient_vector(&self) -> Vec<f64> {
        std::iter::once(self.c0)
            .chain(self.monomials.iter().map(|m| m.c))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A compiled circuit together with the layers whose angles carry the
/// monomial coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompiledCircuit {
    pub model: ReuploadModel,
    /// 1-based indices s_ω + 1.
    pub active_layers: Vec<usize>,
    /// Δ of the closed-form assignment; `None` once refined by a fit.
    pub delta: Option<f64>,
}

/// Restricted coupling that scales the signal's (y, z) components by λ_α.
pub fn coupling_for(n: usize, alpha: usize) -> CouplingSpec {
    if n == 1 {
        CouplingSpec::CuIj {
            i: 1,
            j: alpha as u8,
        }
    } else {
        CouplingSpec::cu_alpha(n, alpha)
    }
}

/// One coupling per unit of exponent, monomial by monomial, ascending α within
/// each monomial.
pub fn schedule_layers(poly: &PolynomialSpec) -> Result<Vec<CouplingSpec>> {
    if poly.total_degree() == 0 {
        return Err(Error::InvalidArgument(
            "zero-degree polynomial needs no layers".into(),
        ));
    }
    Ok(poly
        .monomials
        .iter()
        .flat_map(|m| {
            m.exps
                .iter()
                .flat_map(|(&a, &e)| std::iter::repeat_n(coupling_for(poly.n, a), e as usize))
        })
        .collect())
}

/// Prefix sums s_ω of the block schedule (0-based start of each monomial block).
pub fn block_starts(poly: &PolynomialSpec) -> Vec<usize> {
    poly.monomials
        .iter()
        .scan(0usize, |acc, m| {
            let s = *acc;
            *acc += m.degree() as usize;
            Some(s)
        })
        .collect()
}

/// θ_l = v_{L+2−l} Δ, w = e₂/Δ, b = v₁ on a CNOT cascade (v 1-based, v₁ constant).
pub fn compile_univariate_delta(v: &[f64], delta: f64) -> Result<CompiledCircuit> {
    compile_univariate_delta_with(v, delta, CouplingSpec::Cnot, 1)
}

pub fn compile_univariate_delta_with(
    v: &[f64],
    delta: f64,
    coupling: CouplingSpec,
    n: usize,
) -> Result<CompiledCircuit> {
    if !(delta > 0.0 && delta <= 0.1) {
        return Err(Error::InvalidArgument(format!(
            "Δ must lie in (0, 0.1], got {delta}"
        )));
    }
    if v.len() < 2 {
        return Err(Error::InvalidArgument(
            "coefficient vector needs length L + 1 ≥ 2".into(),
        ));
    }
    let big_l = v.len() - 1;
    // Slot l (1-based) carries the coefficient of λ^{L+1−l}.
    let layers = (1..=big_l)
        .map(|l| LayerSpec::new(v[big_l + 1 - l] * delta, coupling.clone()))
        .collect();
    let model = ReuploadModel::new(n, layers, [0.0, 1.0 / delta, 0.0], v[0])?;
    Ok(CompiledCircuit {
        model,
        active_layers: (1..=big_l).collect(),
        delta: Some(delta),
    })
}

fn is_cnot_only(model: &ReuploadModel) -> bool {
    model.n == 1
        && model.layers.iter().all(|l| {
            matches!(
                l.coupling,
                CouplingSpec::Cnot | CouplingSpec::CuIj { i: 1, j: 3 }
            )
        })
}

/// Chebyshev nodes of the first kind on [−r, r].
fn chebyshev_nodes(count: usize, r: f64) -> Vec<f64> {
    (0..count)
        .map(|k| r * (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * count) as f64).cos())
        .collect()
}

/// Coordinates of a single-variable probe: the ψ(t) family for CNOT-only
/// circuits, otherwise (I + x W_α)/d.
fn univariate_probe(model: &ReuploadModel, alpha: usize, x: f64) -> Result<PauliCoeffs> {
    if is_cnot_only(model) && alpha == 3 {
        return Ok(pauli_coeffs(&psi_lambda(x)?));
    }
    let mut lambda = vec![0.0; (1usize << (2 * model.n)) - 1];
    lambda[alpha - 1] = x;
    PauliCoeffs::new(model.n, lambda)
}

/// Random physical probe coordinates: inside the radius-0.9 Bloch ball for one
/// qubit, inside the radius-0.9 ℓ¹ ball otherwise (sufficient for positivity).
fn multivariate_probes(n: usize, count: usize) -> Vec<PauliCoeffs> {
    let mut rng = rng_for(PROBE_SEED, n as u64);
    let len = (1usize << (2 * n)) - 1;
    (0..count)
        .map(|_| {
            let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = if n == 1 {
                v.iter().map(|x| x * x).sum::<f64>().sqrt()
            } else {
                v.iter().map(|x| x.abs()).sum::<f64>()
            };
            let radius = PROBE_RADIUS * rng.random_range(0.3..1.0);
            for x in v.iter_mut() {
                *x *= radius / norm;
            }
            PauliCoeffs::new(n, v).expect("inside the unit cube")
        })
        .collect()
}

fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = rows.len();
    let k = rows[0].len();
    let a = DMatrix::from_fn(m, k, |r, c| rows[r][c]);
    let b = DVector::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-12 * smax.max(1.0) {
        return Err(Error::Singular(format!(
            "probe system has condition number {:.3e}",
            smax / smin
        )));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Singular(e.to_string()))?;
    let resid = (&a * &x - &b)
        .iter()
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    Ok((x.iter().copied().collect(), resid))
}

/// Probe points and design rows for a basis and model.
fn probe_design(
    model: &ReuploadModel,
    basis: &PolynomialSpec,
) -> Result<(Vec<PauliCoeffs>, Vec<Vec<f64>>)> {
    if model.n != basis.n {
        return Err(Error::InvalidArgument(format!(
            "basis on {} qubits, model on {}",
            basis.n, model.n
        )));
    }
    match basis.single_variable() {
        Some(alpha) => {
            let degree = model.n_layers();
            let mut nodes = chebyshev_nodes(degree + 1, PROBE_RADIUS);
            nodes.extend([0.3711, -0.6173]);
            let probes = nodes
                .iter()
                .map(|&x| univariate_probe(model, alpha, x))
                .collect::<Result<Vec<_>>>()?;
            let rows = probes
                .iter()
                .map(|p| (0..=degree).map(|k| p.get(alpha).powi(k as i32)).collect())
                .collect();
            Ok((probes, rows))
        }
        None => {
            let count = basis.monomials.len() + 1 + 3;
            let probes = multivariate_probes(basis.n, count);
            let rows = probes
                .iter()
                .map(|p| {
                    std::iter::once(1.0)
                        .chain(basis.monomials.iter().map(|m| m.eval_basis(p)))
                        .collect()
                })
                .collect();
            Ok((probes, rows))
        }
    }
}

/// Coefficient vector v_θ of the polynomial a model realizes, in the basis of
/// `basis`' monomials (c₀ first). A single-variable basis is expanded to all
/// powers 0..=L of that variable.
pub fn extract_coefficients(model: &ReuploadModel, basis: &PolynomialSpec) -> Result<Vec<f64>> {
    let transfer = ModelTransfer::new(model)?;
    let (probes, rows) = probe_design(model, basis)?;
    let values: Vec<f64> = probes
        .iter()
        .map(|p| evaluate_on_coeffs(model, &transfer, p))
        .collect();
    let (x, resid) = least_squares(&rows, &values)?;
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if resid > CHECK_TOL * scale {
        return Err(Error::OutsideBasis(resid));
    }
    Ok(x)
}

/// Powers 0..=L of λ_α.
pub fn univariate_basis(n: usize, alpha: usize) -> PolynomialSpec {
    PolynomialSpec::univariate(n, alpha, &[0.0, 1.0]).expect("valid")
}

/// Parameters (θ₁..θ_L, w₁, w₂, w₃, b) of a model.
fn readout_params(model: &ReuploadModel) -> Vec<f64> {
    let mut p = model.thetas();
    p.extend(model.w);
    p.push(model.b);
    p
}

fn set_readout_params(model: &mut ReuploadModel, p: &[f64]) {
    let l = model.n_layers();
    model.set_thetas(&p[..l]);
    model.w = [p[l], p[l + 1], p[l + 2]];
    model.b = p[l + 3];
}

/// Central-difference Jacobian of v_θ at θ₀ = (0,…,0, e₂, 0) for the CNOT
/// cascade, columns ordered (θ₁..θ_L, w₁, w₂, w₃, b).
pub fn jacobian_theta0(big_l: usize) -> Result<Vec<Vec<f64>>> {
    if big_l == 0 {
        return Err(Error::InvalidArgument("L must be ≥ 1".into()));
    }
    let base = ReuploadModel::restricted_cnot(&vec![0.0; big_l], [0.0, 1.0, 0.0], 0.0)?;
    let basis = univariate_basis(1, 3);
    let p0 = readout_params(&base);
    let mut jac = vec![vec![0.0; p0.len()]; big_l + 1];
    for (col, _) in p0.iter().enumerate() {
        let eval = |sign: f64| -> Result<Vec<f64>> {
            let mut p = p0.clone();
            p[col] += sign * JACOBIAN_STEP;
            let mut m = base.clone();
            set_readout_params(&mut m, &p);
            extract_coefficients(&m, &basis)
        };
        let (plus, minus) = (eval(1.0)?, eval(-1.0)?);
        for row in 0..=big_l {
            jac[row][col] = (plus[row] - minus[row]) / (2.0 * JACOBIAN_STEP);
        }
    }
    Ok(jac)
}

/// Damped Gauss–Newton on `params` minimizing ‖residual(params)‖².
/// Returns (params, max-abs residual, iterations).
fn gauss_newton<F>(
    mut params: Vec<f64>,
    residual: F,
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<f64>, f64, usize)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let inf = |r: &[f64]| r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let sq = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let mut r = residual(&params)?;
    let mut iter = 0;
    while iter < max_iter && inf(&r) > tol {
        iter += 1;
        let k = params.len();
        let m = r.len();
        let mut jac = DMatrix::zeros(m, k);
        for c in 0..k {
            let h = 1e-7 * params[c].abs().max(1.0);
            let mut pp = params.clone();
            pp[c] += h;
            let rp = residual(&pp)?;
            pp[c] -= 2.0 * h;
            let rm = residual(&pp)?;
            for row in 0..m {
                jac[(row, c)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jt = jac.transpose();
        let mut normal = &jt * &jac;
        for d in 0..k {
            normal[(d, d)] += LM_DAMPING * (1.0 + normal[(d, d)]);
        }
        let rhs = -(&jt * &rv);
        let Some(step) = normal.lu().solve(&rhs) else {
            return Err(Error::Singular("Gauss–Newton normal equations".into()));
        };
        let current = sq(&r);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = params
                .iter()
                .zip(step.iter())
                .map(|(p, s)| p + scale * s)
                .collect();
            let rt = residual(&trial)?;
            if sq(&rt) < current {
                params = trial;
                r = rt;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let best = inf(&r);
    Ok((params, best, iter))
}

/// Finds circuit parameters realizing `target`.
///
/// Single-variable targets use an L = max-degree cascade seeded with the
/// Δ-parameterization (Δ = 10⁻²) and refine (θ₁..θ_L, b) so that the
/// coefficients equal Δ·v, then rescale (w, b) by 1/Δ. Multivariate targets use
/// the block schedule and fit all angles and the readout to the target's values
/// on random physical probes.
pub fn fit_coefficients(
    target: &PolynomialSpec,
    max_iter: usize,
    tol: f64,
) -> Result<CompiledCircuit> {
    if target.total_degree() == 0 {
        let coupling = coupling_for(target.n, 3.min((1usize << (2 * target.n)) - 1));
        let model = ReuploadModel::new(
            target.n,
            vec![LayerSpec::new(0.0, coupling)],
            [0.0, 1.0, 0.0],
            target.c0,
        )?;
        return Ok(CompiledCircuit {
            model,
            active_layers: vec![],
            delta: None,
        });
    }
    match target.univariate_coeffs() {
        Some(v) => fit_univariate(target, &v, max_iter, tol),
        None => fit_multivariate(target, max_iter, tol),
    }
}

fn fit_univariate(
    target: &PolynomialSpec,
    v: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<CompiledCircuit> {
    let alpha = target.single_variable().expect("univariate");
    let delta = SEED_DELTA;
    let seed = compile_univariate_delta_with(v, delta, coupling_for(target.n, alpha), target.n)?;
    let basis = univariate_basis(target.n, alpha);
    let big_l = seed.model.n_layers();
    let scaled: Vec<f64> = v.iter().map(|c| c * delta).collect();

    // Unit readout e₂; the fit targets Δ·v.
    let mut unit = seed.model.clone();
    unit.w = [0.0, 1.0, 0.0];
    unit.b = scaled[0];
    let build = |p: &[f64]| {
        let mut m = unit.clone();
        m.set_thetas(&p[..big_l]);
        m.b = p[big_l];
        m
    };
    let residual = |p: &[f64]| -> Result<Vec<f64>> {
        let got = extract_coefficients(&build(p), &basis)?;
        Ok(got
            .iter()
            .zip(&scaled)
            .map(|(g, t)| (g - t) / delta)
            .collect())
    };
    let mut p0 = unit.thetas();
    p0.push(unit.b);
    let (p, resid, iterations) = gauss_newton(p0, residual, max_iter, tol)?;

    let mut model = build(&p);
    model.w = [0.0, 1.0 / delta, 0.0];
    model.b = p[big_l] / delta;
    let circuit = CompiledCircuit {
        model,
        active_layers: (1..=big_l).collect(),
        delta: None,
    };
    if resid <= tol {
        Ok(circuit)
    } else {
        Err(Error::NoConvergence {
            iterations,
            best_residual: resid,
            best: Some(Box::new(circuit)),
        })
    }
}

fn fit_multivariate(target: &PolynomialSpec, max_iter: usize, tol: f64) -> Result<CompiledCircuit> {
    let schedule = schedule_layers(target)?;
    let starts = block_starts(target);
    let big_l = schedule.len();
    let mut seed_thetas = vec![0.0; big_l];
    for (m, &s) in target.monomials.iter().zip(&starts) {
        seed_thetas[s] = m.c * SEED_DELTA;
    }
    let layers = schedule
        .into_iter()
        .map(|c| LayerSpec::new(0.0, c))
        .collect();
    let template = ReuploadModel::new(target.n, layers, [0.0, 1.0, 0.0], 0.0)?;

    let probes = multivariate_probes(target.n, 4 * (target.monomials.len() + 1) + 8);
    let wanted: Vec<f64> = probes.iter().map(|p| target.eval(p)).collect();
    // The readout enters linearly, so (w, b) is solved exactly for each set of
    // angles and Gauss–Newton runs over the angles alone.
    let readout_for = |thetas: &[f64]| -> Result<(ReuploadModel, Vec<f64>)> {
        let mut m = template.clone();
        m.set_thetas(thetas);
        let transfer = ModelTransfer::new(&m)?;
        let rows: Vec<Vec<f64>> = probes
            .iter()
            .map(|p| {
                let r = transfer.final_bloch(m.initial_signal.bloch(), &p.with_identity());
                vec![r[0], r[1], r[2], 1.0]
            })
            .collect();
        let readout = solve_readout(&rows, &wanted);
        m.w = [readout[0], readout[1], readout[2]];
        m.b = readout[3];
        let resid = rows
            .iter()
            .zip(&wanted)
            .map(|(row, t)| row.iter().zip(&readout).map(|(a, b)| a * b).sum::<f64>() - t)
            .collect();
        Ok((m, resid))
    };
    let residual = |p: &[f64]| readout_for(p).map(|(_, r)| r);

    let mut rng = rng_for(PROBE_SEED, 1000 + big_l as u64);
    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    for attempt in 0..=FIT_RESTARTS {
        let start = if attempt == 0 {
            seed_thetas.clone()
        } else {
            (0..big_l)
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect()
        };
        let (p, resid, iterations) = gauss_newton(start, residual, max_iter, tol)?;
        if best.as_ref().is_none_or(|b| resid < b.1) {
            best = Some((p, resid, iterations));
        }
        if best.as_ref().is_some_and(|b| b.1 <= tol) {
            break;
        }
    }
    let (p, resid, iterations) = best.expect("at least one attempt");
    let (model, _) = readout_for(&p)?;
    let circuit = CompiledCircuit {
        model,
        active_layers: starts.iter().map(|s| s + 1).collect(),
        delta: None,
    };
    if resid <= tol {
        Ok(circuit)
    } else {
        Err(Error::NoConvergence {
            iterations,
            best_residual: resid,
            best: Some(Box::new(circuit)),
        })
    }
}

/// Minimum-norm least-squares readout (w₁, w₂, w₃, b).
fn solve_readout(rows: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let a = DMatrix::from_fn(rows.len(), 4, |r, c| rows[r][c]);
    let svd = a.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    svd.solve(&DVector::from_column_slice(rhs), eps)
        .map(|x| x.iter().copied().collect())
        .unwrap_or_else(|_| vec![0.0; 4])
}

/// Max-abs difference between a model's output and a polynomial over `points`.
pub fn max_error_on(
    model: &ReuploadModel,
    target: &PolynomialSpec,
    points: &[PauliCoeffs],
) -> Result<f64> {
    let transfer = ModelTransfer::new(model)?;
    Ok(points
        .iter()
        .map(|p| (evaluate_on_coeffs(model, &transfer, p) - target.eval(p)).abs())
        .fold(0.0, f64::max))
}
