use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use reupload::datasets::{
    class_balance, generate, psi_grid, read_jsonl, verify_labels, write_jsonl, GridTarget, Task,
};
use reupload::experiments::{run_preset, sig4, Preset, PresetOptions, CLASSIFICATION_LR};
use reupload::trainer::{evaluate, init_general_model, train, LossKind, TrainConfig};
use reupload::verify::{default_trials, run_check};
use reupload::ReuploadModel;

#[derive(Parser)]
#[command(
    name = "reupload",
    version,
    about = "Quantum-data re-uploading circuits: datasets, training and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Mse,
    Logistic,
}

#[derive(Subcommand)]
enum Command {
    /// Write train.jsonl and test.jsonl for a task.
    GenDataset {
        #[arg(long)]
        task: String,
        #[arg(long, default_value_t = 1000)]
        train_size: usize,
        #[arg(long, default_value_t = 500)]
        test_size: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Regression target for psi-grid (linear or quartic).
        #[arg(long, default_value = "linear")]
        target: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model; writes report.json, model.json and histogram.csv.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Starting model JSON; without it an unrestricted model of --layers depth is initialized.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        layers: usize,
        /// Defaults to logistic for 0/1 labels and mse otherwise.
        #[arg(long, value_enum)]
        loss: Option<LossArg>,
        #[arg(long, default_value_t = 300)]
        epochs: usize,
        #[arg(long, default_value_t = CLASSIFICATION_LR)]
        lr: f64,
        #[arg(long, default_value_t = 0)]
        batch_size: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a saved model on a dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        loss: Option<LossArg>,
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a preset and compare against the reported values.
    Reproduce {
        preset: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        train_size: Option<usize>,
        #[arg(long)]
        test_size: Option<usize>,
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a numerical check and write its JSON report.
    Verify {
        check: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Ok(true) when every tolerance held.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenDataset {
            task,
            train_size,
            test_size,
            seed,
            target,
            out,
        } => {
            let task: Task = task.parse()?;
            let (train, test) = if task == Task::PsiGrid {
                let target: GridTarget = target.parse()?;
                (psi_grid(train_size, target)?, psi_grid(test_size, target)?)
            } else {
                let split = generate(task, train_size, test_size, seed)?;
                (split.train, split.test)
            };
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write_jsonl(&out.join("train.jsonl"), &train)?;
            write_jsonl(&out.join("test.jsonl"), &test)?;
            if task.is_classification() {
                verify_labels(task, &train)?;
                verify_labels(task, &test)?;
                println!(
                    "{}: {} train / {} test, class-1 fraction {} / {}",
                    task.name(),
                    train.len(),
                    test.len(),
                    sig4(class_balance(&train)),
                    sig4(class_balance(&test))
                );
            } else {
                println!(
                    "{}: {} train / {} test grid points",
                    task.name(),
                    train.len(),
                    test.len()
                );
            }
            Ok(true)
        }
        Command::Train {
            train: train_path,
            test,
            model,
            layers,
            loss,
            epochs,
            lr,
            batch_size,
            seed,
            shots,
            out,
        } => {
            let train_set = read_jsonl(&train_path)?;
            let test_set = read_jsonl(&test)?;
            let n = train_set[0].state.n_qubits();
            let model = match model {
                Some(p) => read_model(&p)?,
                None => init_general_model(n, layers, seed)?,
            };
            let config = TrainConfig {
                loss: resolve_loss(loss, &train_set),
                learning_rate: lr,
                max_epochs: epochs,
                batch_size,
                seed,
                shots,
                ..TrainConfig::default()
            };
            let report = train(&model, &train_set, &test_set, &config)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            fs::write(out.join("report.json"), report.to_json()?)?;
            fs::write(out.join("model.json"), report.final_params.to_json()?)?;
            report.histogram.write_csv(&out.join("histogram.csv"))?;
            println!(
                "final train loss {}",
                sig4(*report.loss_history.last().expect("non-empty history"))
            );
            if let Some(acc) = report.test_accuracy {
                println!("test accuracy {}", sig4(acc));
            }
            if let Some(mse) = report.test_mse {
                println!("test mse {}", sig4(mse));
            }
            if let Some(e) = report.test_max_abs_error {
                println!("test max abs error {}", sig4(e));
            }
            Ok(true)
        }
        Command::Evaluate {
            model,
            data,
            loss,
            shots,
            seed,
            out,
        } => {
            let model = read_model(&model)?;
            let data = read_jsonl(&data)?;
            let config = TrainConfig {
                loss: resolve_loss(loss, &data),
                shots,
                seed,
                ..TrainConfig::default()
            };
            let eval = evaluate(&model, &data, &config)?;
            if let Some(acc) = eval.accuracy {
                println!("accuracy {}", sig4(acc));
            }
            if let (Some(mse), Some(e)) = (eval.mse, eval.max_abs_error) {
                println!("mse {}  max abs error {}", sig4(mse), sig4(e));
            }
            if let Some(out) = out {
                fs::create_dir_all(&out)?;
                fs::write(
                    out.join("evaluation.json"),
                    serde_json::to_string_pretty(&eval)?,
                )?;
                eval.histogram.write_csv(&out.join("histogram.csv"))?;
            }
            Ok(true)
        }
        Command::Reproduce {
            preset,
            seed,
            train_size,
            test_size,
            layers,
            epochs,
            lr,
            shots,
            out,
        } => {
            let preset: Preset = preset.parse()?;
            let opts = PresetOptions {
                seed,
                train_size,
                test_size,
                layers,
                epochs,
                learning_rate: lr,
                shots,
            };
            let outcome = run_preset(preset, &opts)?;
            print!("{}", outcome.table());
            if let Some(out) = out {
                fs::create_dir_all(&out)?;
                fs::write(
                    out.join("summary.json"),
                    serde_json::to_string_pretty(&outcome)?,
                )?;
                for (name, report) in &outcome.reports {
                    fs::write(out.join(format!("report_{name}.json")), report.to_json()?)?;
                    report
                        .histogram
                        .write_csv(&out.join(format!("histogram_{name}.csv")))?;
                }
            }
            Ok(outcome.all_pass())
        }
        Command::Verify {
            check,
            trials,
            seed,
            out,
        } => {
            let Some(default) = default_trials(&check) else {
                // run_check produces the error listing valid names.
                run_check(&check, 0, seed)?;
                bail!("unknown check {check}");
            };
            let report = run_check(&check, trials.unwrap_or(default), seed)?;
            let json = report.to_json()?;
            match out {
                Some(p) => {
                    fs::write(&p, &json).with_context(|| format!("writing {}", p.display()))?
                }
                None => println!("{json}"),
            }
            eprintln!(
                "{}: {} trials, max violation {}, {}",
                report.check_name,
                report.trials,
                sig4(report.max_violation),
                if report.pass { "pass" } else { "FAIL" }
            );
            Ok(report.pass)
        }
    }
}

fn resolve_loss(arg: Option<LossArg>, data: &[reupload::LabeledState]) -> LossKind {
    match arg {
        Some(LossArg::Mse) => LossKind::Mse,
        Some(LossArg::Logistic) => LossKind::Logistic,
        None if data.iter().all(|s| s.label == 0.0 || s.label == 1.0) => LossKind::Logistic,
        None => LossKind::Mse,
    }
}

fn read_model(path: &Path) -> Result<ReuploadModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ReuploadModel::from_json(&text)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
