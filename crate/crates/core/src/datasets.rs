//! Labeled-state datasets for the classification and regression tasks, and
//! their JSON Lines storage.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rng::rng_for;
use crate::states::{
    pauli_coeffs, psi_lambda, purity, renyi2_entropy, sample_bloch_ball, sample_bloch_sphere,
    sample_haar_pure, DensityMatrix, LabeledState,
};

/// Purity at which a uniformly random Bloch-ball state is equally likely to
/// fall on either side: r³ = ½.
pub fn purity_threshold() -> f64 {
    (1.0 + 2f64.powf(-2.0 / 3.0)) / 2.0
}

pub const ENTROPY_THRESHOLD: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// Bloch-ball states, label tr(ρ²) ≥ threshold.
    Purity,
    /// Haar-random 2-qubit pure states, label Rényi-2 entropy ≥ 0.3 (natural log).
    Entropy,
    /// Bloch-sphere states, label |r₃| ≥ 0.5.
    Band,
    /// Bloch-sphere states, label r₃ ≥ 0.5 or −0.5 ≤ r₃ < 0.
    DoubleBand,
    /// ψ(t) states on a uniform λ grid, regression target given separately.
    PsiGrid,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::Purity,
        Task::Entropy,
        Task::Band,
        Task::DoubleBand,
        Task::PsiGrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Purity => "purity",
            Task::Entropy => "entropy",
            Task::Band => "band",
            Task::DoubleBand => "double-band",
            Task::PsiGrid => "psi-grid",
        }
    }

    /// Name of the scalar stored as meta.
    pub fn meta_name(self) -> &'static str {
        match self {
            Task::Purity => "purity",
            Task::Entropy => "entropy",
            Task::Band | Task::DoubleBand => "r3",
            Task::PsiGrid => "lambda",
        }
    }

    pub fn n_qubits(self) -> usize {
        if self == Task::Entropy {
            2
        } else {
            1
        }
    }

    pub fn is_classification(self) -> bool {
        self != Task::PsiGrid
    }

    /// Class label as a function of the meta scalar.
    pub fn label_from_meta(self, meta: f64) -> Option<f64> {
        let positive = match self {
            Task::Purity => meta >= purity_threshold(),
            Task::Entropy => meta >= ENTROPY_THRESHOLD,
            Task::Band => meta.abs() >= 0.5,
            Task::DoubleBand => meta >= 0.5 || (-0.5..0.0).contains(&meta),
            Task::PsiGrid => return None,
        };
        Some(if positive { 1.0 } else { 0.0 })
    }

    /// Meta scalar of a state for this task.
    pub fn meta_of(self, state: &DensityMatrix) -> Result<f64> {
        Ok(match self {
            Task::Purity => purity(state),
            Task::Entropy => renyi2_entropy(state)?,
            Task::Band | Task::DoubleBand => state.bloch()[2],
            Task::PsiGrid => pauli_coeffs(state).get(3),
        })
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Task::ALL.iter().map(|t| t.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown task '{s}', expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Regression targets for the ψ(t) grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridTarget {
    /// f(λ) = λ.
    Linear,
    /// f(λ) = 3(λ + 0.8)λ(λ − 0.5)² + 0.3.
    Quartic,
}

impl GridTarget {
    pub fn eval(self, lambda: f64) -> f64 {
        match self {
            GridTarget::Linear => lambda,
            GridTarget::Quartic => 3.0 * (lambda + 0.8) * lambda * (lambda - 0.5).powi(2) + 0.3,
        }
    }

    /// Dense coefficients (c₀, …, c_D).
    pub fn coefficients(self) -> Vec<f64> {
        match self {
            GridTarget::Linear => vec![0.0, 1.0],
            GridTarget::Quartic => vec![0.3, 0.6, -1.65, -0.6, 3.0],
        }
    }
}

impl FromStr for GridTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(GridTarget::Linear),
            "quartic" => Ok(GridTarget::Quartic),
            _ => Err(Error::InvalidArgument(format!(
                "unknown grid target '{s}', expected linear or quartic"
            ))),
        }
    }
}

/// Interior grid λ_k = −1 + 2(k + 1)/(N + 1), k = 0..N.
pub fn lambda_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| -1.0 + 2.0 * (k + 1) as f64 / (points + 1) as f64)
        .collect()
}

pub fn psi_grid(points: usize, target: GridTarget) -> Result<Vec<LabeledState>> {
    lambda_grid(points)
        .into_iter()
        .map(|lam| {
            Ok(LabeledState::new(psi_lambda(lam)?, target.eval(lam)).with_meta("lambda", lam))
        })
        .collect()
}

/// One labeled sample of a classification task from stream `index`.
pub fn sample_task(task: Task, seed: u64, index: u64) -> Result<LabeledState> {
    let mut rng = rng_for(seed, index);
    let state = match task {
        Task::Purity => sample_bloch_ball(&mut rng),
        Task::Entropy => sample_haar_pure(2, &mut rng),
        Task::Band | Task::DoubleBand => sample_bloch_sphere(&mut rng),
        Task::PsiGrid => {
            return Err(Error::InvalidArgument(
                "psi-grid is a deterministic grid, not sampled".into(),
            ))
        }
    };
    let meta = task.meta_of(&state)?;
    let label = task.label_from_meta(meta).expect("classification task");
    Ok(LabeledState::new(state, label).with_meta(task.meta_name(), meta))
}

/// Train and test sets drawn from disjoint RNG streams of one seed.
#[derive(Clone, Debug)]
pub struct Split {
    pub train: Vec<LabeledState>,
    pub test: Vec<LabeledState>,
}

pub fn generate(task: Task, n_train: usize, n_test: usize, seed: u64) -> Result<Split> {
    if task == Task::PsiGrid {
        let train = psi_grid(n_train, GridTarget::Linear)?;
        let test = psi_grid(n_test, GridTarget::Linear)?;
        return Ok(Split { train, test });
    }
    let train = (0..n_train as u64)
        .map(|i| sample_task(task, seed, i))
        .collect::<Result<_>>()?;
    let test = (0..n_test as u64)
        .map(|i| sample_task(task, seed, n_train as u64 + i))
        .collect::<Result<_>>()?;
    Ok(Split { train, test })
}

/// Fraction of samples labeled 1.
pub fn class_balance(data: &[LabeledState]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.iter().filter(|s| s.label >= 0.5).count() as f64 / data.len() as f64
}

#[derive(Serialize, Deserialize)]
struct Record {
    n: usize,
    matrix: ComplexMatrix,
    label: f64,
    #[serde(default)]
    meta: BTreeMap<String, f64>,
}

pub fn write_jsonl(path: &Path, data: &[LabeledState]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for s in data {
        let record = Record {
            n: s.state.n_qubits(),
            matrix: s.state.matrix().clone(),
            label: s.label,
            meta: s.meta.iter().cloned().collect(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a dataset, validating every state; errors carry the 1-based line.
pub fn read_jsonl(path: &Path) -> Result<Vec<LabeledState>> {
    let name = path.display().to_string();
    let schema = |line: usize, message: String| Error::Schema {
        path: name.clone(),
        line,
        message,
    };
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| schema(line_no, e.to_string()))?;
        let state =
            DensityMatrix::new(record.matrix).map_err(|e| schema(line_no, e.to_string()))?;
        if state.n_qubits() != record.n {
            return Err(schema(
                line_no,
                format!("n = {} but matrix is {}-qubit", record.n, state.n_qubits()),
            ));
        }
        if !record.label.is_finite() {
            return Err(schema(line_no, "label is not a finite number".into()));
        }
        let mut s = LabeledState::new(state, record.label);
        if let Some((name, value)) = record.meta.into_iter().next() {
            s = s.with_meta(&name, value);
        }
        out.push(s);
    }
    if out.is_empty() {
        return Err(schema(0, "dataset is empty".into()));
    }
    Ok(out)
}

/// Checks that every label equals the task rule applied to the stored meta
/// scalar, and that the meta scalar matches the state. Returns the number of
/// records checked.
pub fn verify_labels(task: Task, data: &[LabeledState]) -> Result<usize> {
    for (k, s) in data.iter().enumerate() {
        let meta = s
            .meta_value()
            .ok_or_else(|| Error::InvalidArgument(format!("record {k} has no meta scalar")))?;
        let recomputed = task.meta_of(&s.state)?;
        if (recomputed - meta).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "record {k}: meta {meta} but state gives {recomputed}"
            )));
        }
        if let Some(label) = task.label_from_meta(meta) {
            if label != s.label {
                return Err(Error::InvalidArgument(format!(
                    "record {k}: label {} but rule gives {label}",
                    s.label
                )));
            }
        }
    }
    Ok(data.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_value() {
        assert!((purity_threshold() - 0.814_980).abs() < 1e-6);
    }

    #[test]
    fn purity_split_is_balanced_and_deterministic() {
        let a = generate(Task::Purity, 1000, 500, 7).unwrap();
        let b = generate(Task::Purity, 1000, 500, 7).unwrap();
        assert_eq!(a.train, b.train);
        assert!((class_balance(&a.train) - 0.5).abs() <= 0.05);
        assert_eq!(verify_labels(Task::Purity, &a.train).unwrap(), 1000);
        // Test samples come from other streams.
        assert_ne!(a.train[0].state, a.test[0].state);
    }

    #[test]
    fn band_labels_follow_rule() {
        for task in [Task::Band, Task::DoubleBand] {
            let s = generate(task, 300, 0, 3).unwrap();
            verify_labels(task, &s.train).unwrap();
            assert!((class_balance(&s.train) - 0.5).abs() < 0.1);
        }
        assert_eq!(Task::DoubleBand.label_from_meta(-0.5), Some(1.0));
        assert_eq!(Task::DoubleBand.label_from_meta(0.0), Some(0.0));
        assert_eq!(Task::DoubleBand.label_from_meta(0.49), Some(0.0));
        assert_eq!(Task::Band.label_from_meta(-0.5), Some(1.0));
    }

    #[test]
    fn psi_grid_values() {
        let g = psi_grid(101, GridTarget::Linear).unwrap();
        assert_eq!(g.len(), 101);
        let lams: Vec<f64> = g.iter().map(|s| s.meta_value().unwrap()).collect();
        assert!(lams.iter().all(|l| *l > -1.0 && *l < 1.0));
        let step = lams[1] - lams[0];
        for w in lams.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
        assert!((lams[50]).abs() < 1e-12);
        verify_labels(Task::PsiGrid, &g).unwrap();
        for s in &g {
            assert!((s.label - s.meta_value().unwrap()).abs() < 1e-15);
        }
        let c = GridTarget::Quartic.coefficients();
        for lam in [-0.9f64, 0.1, 0.77] {
            let poly: f64 = c
                .iter()
                .enumerate()
                .map(|(k, c)| c * lam.powi(k as i32))
                .sum();
            assert!((poly - GridTarget::Quartic.eval(lam)).abs() < 1e-13);
        }
    }

    #[test]
    fn jsonl_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let s = generate(Task::Entropy, 5, 0, 1).unwrap();
        write_jsonl(&path, &s.train).unwrap();
        let back = read_jsonl(&path).unwrap();
        assert_eq!(back, s.train);

        let bad = dir.path().join("bad.jsonl");
        let first = std::fs::read_to_string(&path)
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string();
        let broken = r#"{"n":1,"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]],"label":1}"#;
        std::fs::write(&bad, format!("{first}\n{broken}\n")).unwrap();
        match read_jsonl(&bad) {
            Err(Error::Schema { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected schema error, got {other:?}"),
        }
        std::fs::write(&bad, "{not json}\n").unwrap();
        assert!(matches!(
            read_jsonl(&bad),
            Err(Error::Schema { line: 1, .. })
        ));
    }

    #[test]
    fn task_names_parse() {
        for t in Task::ALL {
            assert_eq!(t.name().parse::<Task>().unwrap(), t);
        }
        assert!("nope".parse::<Task>().is_err());
    }
}
