//! Adam training of re-uploading models for regression and binary
//! classification.
//!
//! The training gradient is exact up to the generator finite differences: each
//! layer's affine map is linear in its transfer tensor G (see
//! [`LayerTransfer`]), so the loss is back-propagated through the affine
//! cascade to ∂loss/∂G once per batch, and G is differentiated per parameter
//! (shift rule for the angle, central differences for generator coefficients).
//! [`gradient_fd`] and [`gradient_param_shift`] evaluate the same quantities
//! from full density-matrix simulations and serve as references.

use std::path::Path;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::{
    run_model, sample_bloch, CouplingSpec, LayerSpec, LayerTransfer, ReuploadModel,
};
use crate::error::{Error, Result};
use crate::linalg::HermitianGenerator;
use crate::rng::rng_for;
use crate::states::{pauli_coeffs, LabeledState};

pub const HISTOGRAM_BINS: usize = 30;
const SHIFT: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Mse,
    /// Binary cross-entropy on σ(κ(f − threshold)).
    Logistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub loss: LossKind,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// 0 means full batch.
    pub batch_size: usize,
    pub seed: u64,
    /// 0 means exact expectations.
    pub shots: usize,
    pub fd_step: f64,
    pub classification_threshold: f64,
    /// Slope κ of the logistic surrogate.
    pub kappa: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss: LossKind::Logistic,
            learning_rate: 0.05,
            max_epochs: 300,
            batch_size: 0,
            seed: 0,
            shots: 0,
            fd_step: 1e-5,
            classification_threshold: 0.5,
            kappa: 10.0,
        }
    }
}

impl TrainConfig {
    pub fn regression() -> Self {
        Self {
            loss: LossKind::Mse,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "fd_step must lie in (0, 1e-2], got {}",
                self.fd_step
            )));
        }
        if self.shots > 0 && self.shots < 3 {
            return Err(Error::InvalidArgument(
                "shots must be 0 or at least 3".into(),
            ));
        }
        if self.kappa.is_nan() || self.kappa <= 0.0 {
            return Err(Error::InvalidArgument("kappa must be positive".into()));
        }
        Ok(())
    }

    /// Per-sample loss and its derivative in f.
    pub fn loss(&self, f: f64, y: f64) -> (f64, f64) {
        match self.loss {
            LossKind::Mse => ((f - y).powi(2), 2.0 * (f - y)),
            LossKind::Logistic => {
                let z = self.kappa * (f - self.classification_threshold);
                // −[y ln σ(z) + (1−y) ln(1−σ(z))] = softplus(z) − y z.
                let softplus = if z > 0.0 {
                    z + (-z).exp().ln_1p()
                } else {
                    z.exp().ln_1p()
                };
                let p = 1.0 / (1.0 + (-z).exp());
                (softplus - y * z, self.kappa * (p - y))
            }
        }
    }

    pub fn predict(&self, f: f64) -> f64 {
        if f >= self.classification_threshold {
            1.0
        } else {
            0.0
        }
    }
}

/// Flat parameters: per layer θ_l then (General layers) the generator
/// coefficients; then w₁, w₂, w₃, b.
pub fn params(model: &ReuploadModel) -> Vec<f64> {
    let mut p = Vec::new();
    for layer in &model.layers {
        p.push(layer.theta);
        if let CouplingSpec::General { generator } = &layer.coupling {
            p.extend_from_slice(generator.coeffs());
        }
    }
    p.extend(model.w);
    p.push(model.b);
    p
}

pub fn set_params(model: &mut ReuploadModel, p: &[f64]) {
    let mut k = 0;
    for layer in &mut model.layers {
        layer.theta = p[k];
        k += 1;
        if let CouplingSpec::General { generator } = &mut layer.coupling {
            let c = generator.coeffs_mut();
            c.copy_from_slice(&p[k..k + c.len()]);
            k += c.len();
        }
    }
    model.w = [p[k], p[k + 1], p[k + 2]];
    model.b = p[k + 3];
}

/// General model with coefficients ~ N(0, 0.1), w ~ N(0, 0.5), b = 0, θ = 0.
pub fn init_general_model(n: usize, layers: usize, seed: u64) -> Result<ReuploadModel> {
    let mut rng = rng_for(seed, u64::MAX);
    let coeff = Normal::new(0.0, 0.1).expect("valid");
    let layer_specs = (0..layers)
        .map(|_| {
            let c = (0..(1usize << (2 * (n + 1))) - 1)
                .map(|_| coeff.sample(&mut rng))
                .collect();
            LayerSpec::new(
                0.0,
                CouplingSpec::General {
                    generator: HermitianGenerator::new(n + 1, c).expect("length matches"),
                },
            )
        })
        .collect();
    let w = init_readout(&mut rng);
    ReuploadModel::new(n, layer_specs, w, 0.0)
}

/// Restricted model with angles ~ N(0, 0.1), w ~ N(0, 0.5), b = 0.
pub fn init_restricted_model(
    n: usize,
    couplings: Vec<CouplingSpec>,
    seed: u64,
) -> Result<ReuploadModel> {
    let mut rng = rng_for(seed, u64::MAX);
    let angle = Normal::new(0.0, 0.1).expect("valid");
    let layers = couplings
        .into_iter()
        .map(|c| LayerSpec::new(angle.sample(&mut rng), c))
        .collect();
    let w = init_readout(&mut rng);
    ReuploadModel::new(n, layers, w, 0.0)
}

fn init_readout(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let d = Normal::new(0.0, 0.5).expect("valid");
    [d.sample(rng), d.sample(rng), d.sample(rng)]
}

/// ∂f/∂θ_l from the two-term shift rule.
pub fn gradient_param_shift(
    model: &ReuploadModel,
    rho: &crate::states::DensityMatrix,
    layer_index: usize,
) -> Result<f64> {
    let layer = model
        .layers
        .get(layer_index)
        .ok_or_else(|| Error::InvalidArgument(format!("layer {layer_index} out of range")))?;
    if layer.coupling.is_general() {
        return Err(Error::InvalidArgument(
            "shift rule needs a restricted layer; General layers use finite differences".into(),
        ));
    }
    let eval = |shift: f64| -> Result<f64> {
        let mut m = model.clone();
        m.layers[layer_index].theta += shift;
        Ok(run_model(&m, rho)?.1)
    };
    Ok((eval(SHIFT)? - eval(-SHIFT)?) / 2.0)
}

/// Stream of the shot-noise RNG for a sample within an evaluation.
fn shot_rng(config: &TrainConfig, round: u64, index: usize) -> ChaCha8Rng {
    rng_for(
        config.seed ^ round.wrapping_mul(0x9e37_79b9_7f4a_7c15),
        index as u64,
    )
}

/// Readout of one sample, shot-sampled when `config.shots > 0`.
fn readout(
    model: &ReuploadModel,
    r: [f64; 3],
    config: &TrainConfig,
    round: u64,
    index: usize,
) -> Result<([f64; 3], f64)> {
    let r_used = if config.shots == 0 {
        r
    } else {
        sample_bloch(r, config.shots, &mut shot_rng(config, round, index))?
    };
    Ok((r_used, model.readout(r_used)))
}

/// Mean loss over a batch from full density-matrix simulation.
pub fn batch_loss(
    model: &ReuploadModel,
    batch: &[LabeledState],
    config: &TrainConfig,
) -> Result<f64> {
    let mut total = 0.0;
    for (k, s) in batch.iter().enumerate() {
        let (r, _) = run_model(model, &s.state)?;
        let (_, f) = readout(model, r, config, 0, k)?;
        total += config.loss(f, s.label).0;
    }
    Ok(total / batch.len() as f64)
}

/// Central differences of the batch loss over every parameter.
pub fn gradient_fd(
    model: &ReuploadModel,
    batch: &[LabeledState],
    config: &TrainConfig,
) -> Result<Vec<f64>> {
    let p0 = params(model);
    let h = config.fd_step;
    let mut grad = Vec::with_capacity(p0.len());
    let mut m = model.clone();
    for k in 0..p0.len() {
        let mut p = p0.clone();
        p[k] = p0[k] + h;
        set_params(&mut m, &p);
        let plus = batch_loss(&m, batch, config)?;
        p[k] = p0[k] - h;
        set_params(&mut m, &p);
        let minus = batch_loss(&m, batch, config)?;
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(grad)
}

/// Pre-extracted Pauli coefficients (λ₀ = 1 first) and labels.
pub struct PreparedData {
    lambdas: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl PreparedData {
    pub fn new(data: &[LabeledState]) -> Self {
        Self {
            lambdas: data
                .iter()
                .map(|s| pauli_coeffs(&s.state).with_identity())
                .collect(),
            labels: data.iter().map(|s| s.label).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn transfer_of(layer: &LayerSpec, n: usize) -> Result<Vec<f64>> {
    Ok(LayerTransfer::from_layer(layer, n)?.as_slice().to_vec())
}

/// Mean loss and exact-in-structure gradient over the indexed samples.
fn loss_and_gradient(
    model: &ReuploadModel,
    data: &PreparedData,
    indices: &[usize],
    config: &TrainConfig,
    round: u64,
) -> Result<(f64, Vec<f64>)> {
    let n = model.n;
    let na = 1usize << (2 * n);
    let transfers = model
        .layers
        .iter()
        .map(|l| LayerTransfer::from_layer(l, n))
        .collect::<Result<Vec<_>>>()?;
    let n_layers = transfers.len();
    let mut grad_g = vec![vec![0.0; 12 * na]; n_layers];
    let mut grad_w = [0.0; 3];
    let mut grad_b = 0.0;
    let mut total = 0.0;
    let scale = 1.0 / indices.len() as f64;

    let mut maps = Vec::with_capacity(n_layers);
    let mut traj = Vec::with_capacity(n_layers + 1);
    for &idx in indices {
        let lambda = &data.lambdas[idx];
        maps.clear();
        traj.clear();
        traj.push(model.initial_signal.bloch());
        for t in &transfers {
            let map = t.affine(lambda);
            traj.push(map.apply(*traj.last().expect("non-empty")));
            maps.push(map);
        }
        let (r_used, f) = readout(model, traj[n_layers], config, round, idx)?;
        let (loss, dldf) = config.loss(f, data.labels[idx]);
        total += loss;
        let g = dldf * scale;
        for k in 0..3 {
            grad_w[k] += g * r_used[k];
        }
        grad_b += g;

        let mut adj = model.w.map(|w| g * w);
        for l in (0..n_layers).rev() {
            let prev = traj[l];
            let ext = [1.0, prev[0], prev[1], prev[2]];
            let gl = &mut grad_g[l];
            for i in 0..3 {
                if adj[i] == 0.0 {
                    continue;
                }
                for (j, e) in ext.iter().enumerate() {
                    let coef = adj[i] * e;
                    let row = &mut gl[(i * 4 + j) * na..(i * 4 + j + 1) * na];
                    for (slot, lam) in row.iter_mut().zip(lambda) {
                        *slot += coef * lam;
                    }
                }
            }
            let m = &maps[l].m;
            adj = [
                m[0][0] * adj[0] + m[1][0] * adj[1] + m[2][0] * adj[2],
                m[0][1] * adj[0] + m[1][1] * adj[1] + m[2][1] * adj[2],
                m[0][2] * adj[0] + m[1][2] * adj[1] + m[2][2] * adj[2],
            ];
        }
    }

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut grad = Vec::new();
    for (l, layer) in model.layers.iter().enumerate() {
        let gl = &grad_g[l];
        let mut shifted = layer.clone();
        shifted.theta = layer.theta + SHIFT;
        let plus = transfer_of(&shifted, n)?;
        shifted.theta = layer.theta - SHIFT;
        let minus = transfer_of(&shifted, n)?;
        grad.push((dot(gl, &plus) - dot(gl, &minus)) / 2.0);
        if let CouplingSpec::General { generator } = &layer.coupling {
            let h = config.fd_step;
            for k in 0..generator.coeffs().len() {
                let mut perturbed = layer.clone();
                let CouplingSpec::General { generator: g } = &mut perturbed.coupling else {
                    unreachable!()
                };
                g.coeffs_mut()[k] += h;
                let plus = transfer_of(&perturbed, n)?;
                let CouplingSpec::General { generator: g } = &mut perturbed.coupling else {
                    unreachable!()
                };
                g.coeffs_mut()[k] -= 2.0 * h;
                let minus = transfer_of(&perturbed, n)?;
                grad.push((dot(gl, &plus) - dot(gl, &minus)) / (2.0 * h));
            }
        }
    }
    grad.extend(grad_w);
    grad.push(grad_b);
    Ok((total * scale, grad))
}

/// Mean loss and gradient over a whole batch, through the transfer tensors.
pub fn gradient(
    model: &ReuploadModel,
    batch: &[LabeledState],
    config: &TrainConfig,
) -> Result<(f64, Vec<f64>)> {
    let data = PreparedData::new(batch);
    let idx: Vec<usize> = (0..data.len()).collect();
    loss_and_gradient(model, &data, &idx, config, 0)
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, p: &mut [f64], g: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for k in 0..p.len() {
            self.m[k] = Self::BETA1 * self.m[k] + (1.0 - Self::BETA1) * g[k];
            self.v[k] = Self::BETA2 * self.v[k] + (1.0 - Self::BETA2) * g[k] * g[k];
            p[k] -= lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + Self::EPS);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count_class0: usize,
    pub count_class1: usize,
}

/// Predicted-class counts over uniform bins of the samples' meta scalar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub meta_name: String,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn build(data: &[LabeledState], predictions: &[f64], n_bins: usize) -> Self {
        let meta_name = data
            .iter()
            .find_map(|s| s.meta.as_ref().map(|(n, _)| n.clone()))
            .unwrap_or_else(|| "index".into());
        let values: Vec<f64> = data
            .iter()
            .enumerate()
            .map(|(k, s)| s.meta_value().unwrap_or(k as f64))
            .collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            hi = lo + 1.0;
        }
        let width = (hi - lo) / n_bins as f64;
        let mut bins: Vec<HistogramBin> = (0..n_bins)
            .map(|k| HistogramBin {
                bin_low: lo + k as f64 * width,
                bin_high: if k + 1 == n_bins {
                    hi
                } else {
                    lo + (k + 1) as f64 * width
                },
                count_class0: 0,
                count_class1: 0,
            })
            .collect();
        for (v, p) in values.iter().zip(predictions) {
            let k = (((v - lo) / width) as usize).min(n_bins - 1);
            if *p >= 0.5 {
                bins[k].count_class1 += 1;
            } else {
                bins[k].count_class0 += 1;
            }
        }
        Self { meta_name, bins }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for b in &self.bins {
            w.serialize(b)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

/// Accuracy (classification) or mean squared error (regression) with the
/// per-sample outputs and a meta-scalar histogram of predicted classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: Option<f64>,
    pub mse: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub outputs: Vec<f64>,
    pub histogram: Histogram,
}

pub fn evaluate(
    model: &ReuploadModel,
    data: &[LabeledState],
    config: &TrainConfig,
) -> Result<Evaluation> {
    if data.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot evaluate on an empty dataset".into(),
        ));
    }
    let prepared = PreparedData::new(data);
    let transfer = crate::channel::ModelTransfer::new(model)?;
    let mut outputs = Vec::with_capacity(data.len());
    for (k, lambda) in prepared.lambdas.iter().enumerate() {
        let r = transfer.final_bloch(model.initial_signal.bloch(), lambda);
        outputs.push(readout(model, r, config, u64::MAX, k)?.1);
    }
    let predictions: Vec<f64> = outputs.iter().map(|&f| config.predict(f)).collect();
    let histogram = Histogram::build(data, &predictions, HISTOGRAM_BINS);
    Ok(match config.loss {
        LossKind::Logistic => {
            let correct = predictions
                .iter()
                .zip(&prepared.labels)
                .filter(|(p, y)| p == y)
                .count();
            Evaluation {
                accuracy: Some(correct as f64 / data.len() as f64),
                mse: None,
                max_abs_error: None,
                outputs,
                histogram,
            }
        }
        LossKind::Mse => {
            let errs: Vec<f64> = outputs
                .iter()
                .zip(&prepared.labels)
                .map(|(f, y)| f - y)
                .collect();
            Evaluation {
                accuracy: None,
                mse: Some(errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64),
                max_abs_error: Some(errs.iter().fold(0.0, |a, e| a.max(e.abs()))),
                outputs,
                histogram,
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training loss at the start of every epoch, plus the final value.
    pub loss_history: Vec<f64>,
    pub final_params: ReuploadModel,
    pub train_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub test_mse: Option<f64>,
    pub test_max_abs_error: Option<f64>,
    pub histogram: Histogram,
    /// Surrogate loss used, e.g. "logistic(kappa=10, threshold=0.5)".
    pub loss_description: String,
    pub config: TrainConfig,
}

impl TrainReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Adam on the configured loss; stops with an error if the loss turns non-finite.
pub fn train(
    model: &ReuploadModel,
    train_set: &[LabeledState],
    test_set: &[LabeledState],
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if train_set.is_empty() || test_set.is_empty() {
        return Err(Error::InvalidArgument(
            "training and test sets must be non-empty".into(),
        ));
    }
    if config.loss == LossKind::Logistic {
        if let Some(bad) = train_set
            .iter()
            .chain(test_set)
            .find(|s| s.label != 0.0 && s.label != 1.0)
        {
            return Err(Error::InvalidArgument(format!(
                "logistic loss needs 0/1 labels, found {}",
                bad.label
            )));
        }
    }
    model.validate()?;
    let data = PreparedData::new(train_set);
    let mut current = model.clone();
    let mut p = params(&current);
    let mut adam = Adam::new(p.len());
    let mut order: Vec<usize> = (0..data.len()).collect();
    let batch = if config.batch_size == 0 {
        data.len()
    } else {
        config.batch_size.min(data.len())
    };
    let mut shuffle_rng = rng_for(config.seed, u64::MAX - 1);
    let mut history = Vec::with_capacity(config.max_epochs + 1);
    let mut round = 0u64;

    for epoch in 0..config.max_epochs {
        if batch < data.len() {
            order.shuffle(&mut shuffle_rng);
        }
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            round += 1;
            let (loss, grad) = loss_and_gradient(&current, &data, chunk, config, round)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss(epoch));
            }
            epoch_loss += loss * chunk.len() as f64;
            adam.step(&mut p, &grad, config.learning_rate);
            set_params(&mut current, &p);
        }
        history.push(epoch_loss / data.len() as f64);
    }
    let all: Vec<usize> = (0..data.len()).collect();
    let (final_loss, _) = loss_and_gradient(&current, &data, &all, config, round + 1)?;
    if !final_loss.is_finite() {
        return Err(Error::NonFiniteLoss(config.max_epochs));
    }
    history.push(final_loss);

    let train_eval = evaluate(&current, train_set, config)?;
    let test_eval = evaluate(&current, test_set, config)?;
    let loss_description = match config.loss {
        LossKind::Mse => "mse".to_string(),
        LossKind::Logistic => format!(
            "logistic(kappa={}, threshold={})",
            config.kappa, config.classification_threshold
        ),
    };
    Ok(TrainReport {
        loss_history: history,
        final_params: current,
        train_accuracy: train_eval.accuracy,
        test_accuracy: test_eval.accuracy,
        test_mse: test_eval.mse,
        test_max_abs_error: test_eval.max_abs_error,
        histogram: test_eval.histogram,
        loss_description,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::random_generator;
    use crate::datasets::{generate, psi_grid, GridTarget, Task};
    use crate::states::{psi_lambda, sample_bloch_ball, DensityMatrix};
    use rand::Rng;

    fn random_restricted(rng: &mut ChaCha8Rng, layers: usize) -> ReuploadModel {
        let thetas: Vec<f64> = (0..layers).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        ReuploadModel::restricted_cnot(&thetas, w, rng.random_range(-0.5..0.5)).unwrap()
    }

    #[test]
    fn shift_rule_on_one_hot_models() {
        let big_l = 3;
        for l in 0..big_l {
            let theta = 0.4;
            let mut thetas = vec![0.0; big_l];
            thetas[l] = theta;
            let m = ReuploadModel::restricted_cnot(&thetas, [0.0, 1.0, 0.0], 0.0).unwrap();
            let lam: f64 = -0.35;
            let g = gradient_param_shift(&m, &psi_lambda(lam).unwrap(), l).unwrap();
            let expected = lam.powi((big_l - l) as i32) * theta.cos();
            assert!((g - expected).abs() < 1e-13);
        }
        let m = ReuploadModel::restricted_cnot(&[0.3, 0.2], [1.0, 0.0, 0.0], 0.0).unwrap();
        // w = e₁ still sees θ through r₁; the zero-gradient case needs all angles 0.
        let flat = ReuploadModel::restricted_cnot(&[0.0, 0.0], [1.0, 0.0, 0.0], 0.0).unwrap();
        assert!(
            gradient_param_shift(&flat, &psi_lambda(0.1).unwrap(), 1)
                .unwrap()
                .abs()
                < 1e-14
        );
        assert!(gradient_param_shift(&m, &psi_lambda(0.1).unwrap(), 5).is_err());
    }

    #[test]
    fn shift_rule_rejects_general_layers() {
        let mut rng = rng_for(2, 0);
        let m = ReuploadModel::new(
            1,
            vec![LayerSpec::new(
                0.0,
                CouplingSpec::General {
                    generator: random_generator(2, 1.0, &mut rng),
                },
            )],
            [0.0, 0.0, 1.0],
            0.0,
        )
        .unwrap();
        assert!(gradient_param_shift(&m, &DensityMatrix::maximally_mixed(1), 0).is_err());
    }

    #[test]
    fn shift_rule_matches_finite_difference() {
        let mut rng = rng_for(10, 0);
        for _ in 0..20 {
            let m = random_restricted(&mut rng, 3);
            let rho = sample_bloch_ball(&mut rng);
            for l in 0..3 {
                let g = gradient_param_shift(&m, &rho, l).unwrap();
                let h = 1e-6;
                let mut a = m.clone();
                a.layers[l].theta += h;
                let mut b = m.clone();
                b.layers[l].theta -= h;
                let fd =
                    (run_model(&a, &rho).unwrap().1 - run_model(&b, &rho).unwrap().1) / (2.0 * h);
                assert!((g - fd).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn mse_gradient_of_readout() {
        let mut rng = rng_for(11, 0);
        let m = random_restricted(&mut rng, 2);
        let rho = psi_lambda(0.3).unwrap();
        let y = 0.2;
        let batch = vec![LabeledState::new(rho.clone(), y)];
        let cfg = TrainConfig::regression();
        let g = gradient_fd(&m, &batch, &cfg).unwrap();
        let (r, f) = run_model(&m, &rho).unwrap();
        let nb = g.len() - 1;
        assert!((g[nb] - 2.0 * (f - y)).abs() < 1e-7);
        for k in 0..3 {
            assert!((g[nb - 3 + k] - 2.0 * (f - y) * r[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn fast_gradient_matches_reference() {
        let mut rng = rng_for(12, 0);
        for n in 1..=2 {
            let m = init_general_model(n, 2, 5 + n as u64).unwrap();
            let mut m = m;
            m.layers[0].theta = 0.3;
            let task = if n == 1 { Task::Purity } else { Task::Entropy };
            let batch = generate(task, 6, 0, 9).unwrap().train;
            for cfg in [TrainConfig::default(), TrainConfig::regression()] {
                let (loss, fast) = gradient(&m, &batch, &cfg).unwrap();
                let reference = gradient_fd(&m, &batch, &cfg).unwrap();
                assert!((loss - batch_loss(&m, &batch, &cfg).unwrap()).abs() < 1e-12);
                assert_eq!(fast.len(), reference.len());
                for (a, b) in fast.iter().zip(&reference) {
                    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
                }
            }
        }
        let m = random_restricted(&mut rng, 3);
        let batch = psi_grid(7, GridTarget::Quartic).unwrap();
        let cfg = TrainConfig::regression();
        let (_, fast) = gradient(&m, &batch, &cfg).unwrap();
        let reference = gradient_fd(&m, &batch, &cfg).unwrap();
        for (a, b) in fast.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn gradient_vanishes_at_exact_interpolant() {
        let m =
            ReuploadModel::restricted_cnot(&[std::f64::consts::FRAC_PI_2], [0.0, 1.0, 0.0], 0.0)
                .unwrap();
        let batch = psi_grid(9, GridTarget::Linear).unwrap();
        let g = gradient_fd(&m, &batch, &TrainConfig::regression()).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-8), "{g:?}");
    }

    #[test]
    fn constant_labels_learned_quickly() {
        let data: Vec<LabeledState> = generate(Task::Purity, 40, 20, 4)
            .unwrap()
            .train
            .into_iter()
            .map(|mut s| {
                s.label = 1.0;
                s
            })
            .collect();
        let m = init_general_model(1, 1, 3).unwrap();
        let cfg = TrainConfig {
            max_epochs: 5,
            learning_rate: 0.5,
            ..TrainConfig::default()
        };
        let report = train(&m, &data, &data, &cfg).unwrap();
        assert_eq!(report.test_accuracy, Some(1.0));
    }

    #[test]
    fn fit_linear_target() {
        let data = psi_grid(101, GridTarget::Linear).unwrap();
        let m = init_restricted_model(1, vec![CouplingSpec::Cnot], 1).unwrap();
        let report = train(&m, &data, &data, &TrainConfig::regression()).unwrap();
        assert!(
            report.test_max_abs_error.unwrap() <= 0.02,
            "{:?}",
            report.test_max_abs_error
        );
    }

    #[test]
    fn training_is_deterministic() {
        let split = generate(Task::Purity, 50, 20, 2).unwrap();
        let m = init_general_model(1, 2, 8).unwrap();
        let cfg = TrainConfig {
            max_epochs: 10,
            shots: 300,
            batch_size: 16,
            ..TrainConfig::default()
        };
        let a = train(&m, &split.train, &split.test, &cfg).unwrap();
        let b = train(&m, &split.train, &split.test, &cfg).unwrap();
        assert_eq!(a.loss_history, b.loss_history);
    }

    #[test]
    fn loss_non_increasing_for_small_readout_steps() {
        // Angles frozen: optimize (w, b) only with plain gradient descent-like Adam at small lr.
        let split = generate(Task::Purity, 60, 10, 6).unwrap();
        let m = init_general_model(1, 2, 1).unwrap();
        let cfg = TrainConfig {
            learning_rate: 1e-3,
            ..TrainConfig::regression()
        };
        let data = PreparedData::new(&split.train);
        let idx: Vec<usize> = (0..data.len()).collect();
        let mut current = m.clone();
        let mut p = params(&current);
        let nr = p.len() - 4;
        let mut adam = Adam::new(4);
        let mut last = f64::INFINITY;
        for _ in 0..100 {
            let (loss, grad) = loss_and_gradient(&current, &data, &idx, &cfg, 0).unwrap();
            assert!(loss <= last + 1e-12);
            last = loss;
            adam.step(&mut p[nr..], &grad[nr..], cfg.learning_rate);
            set_params(&mut current, &p);
        }
    }

    #[test]
    fn histogram_bins_and_csv() {
        let split = generate(Task::Purity, 200, 0, 5).unwrap();
        let preds: Vec<f64> = split.train.iter().map(|s| s.label).collect();
        let h = Histogram::build(&split.train, &preds, HISTOGRAM_BINS);
        assert_eq!(h.bins.len(), 30);
        assert_eq!(
            h.bins
                .iter()
                .map(|b| b.count_class0 + b.count_class1)
                .sum::<usize>(),
            200
        );
        // A perfect classifier never mixes classes within a bin except at the threshold.
        let mixed = h
            .bins
            .iter()
            .filter(|b| b.count_class0 > 0 && b.count_class1 > 0)
            .count();
        assert!(mixed <= 1);
        let csv = h.to_csv().unwrap();
        assert!(csv.starts_with("bin_low,bin_high,count_class0,count_class1\n"));
        assert_eq!(csv.lines().count(), 31);
    }

    #[test]
    fn config_validation() {
        let bad = TrainConfig {
            fd_step: 0.1,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
