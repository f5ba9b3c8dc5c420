use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use reupload::channel::{random_generator, sample_haar_unitary, signal_trajectory, AffineBlochMap};
use reupload::compiler::{compile_univariate_delta, extract_coefficients, univariate_basis};
use reupload::datasets::{generate, Task};
use reupload::linalg::min_eigenvalue;
use reupload::states::{local_swap_first_qubit, purity, renyi2_entropy_reduced, sample_mixed};
use reupload::trainer::{batch_loss, gradient_param_shift, init_general_model, train, TrainConfig};
use reupload::verify::{
    observation1_certificate, purity_observable_det, random_observable, swap_test_purity,
    TwoLayerCertificate,
};
use reupload::*;

fn gaussian_matrix(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

fn random_layer(n: usize, rng: &mut ChaCha8Rng) -> LayerSpec {
    let theta = rng.random_range(-3.0..3.0);
    let coupling = match rng.random_range(0..3) {
        0 => CouplingSpec::cu_alpha(n, rng.random_range(1..(1usize << (2 * n)))),
        1 if n == 1 => CouplingSpec::Cnot,
        _ => CouplingSpec::General {
            generator: random_generator(n + 1, 1.0, rng),
        },
    };
    LayerSpec::new(theta, coupling)
}

fn random_restricted(rng: &mut ChaCha8Rng, layers: usize) -> ReuploadModel {
    let thetas: Vec<f64> = (0..layers).map(|_| rng.random_range(-3.0..3.0)).collect();
    let w = [
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ];
    ReuploadModel::restricted_cnot(&thetas, w, rng.random_range(-0.5..0.5)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..3) {
        let mut rng = rng_for(seed, 0);
        let (a, b, c) = (gaussian_matrix(da, &mut rng), gaussian_matrix(db, &mut rng), gaussian_matrix(dc, &mut rng));
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(seed in any::<u64>(), s in -2.0f64..2.0) {
        let mut rng = rng_for(seed, 0);
        let (x, y) = (gaussian_matrix(8, &mut rng), gaussian_matrix(8, &mut rng));
        for keep in [Keep::A, Keep::B] {
            let combo = partial_trace(&(&x + &y.scale_real(s)), 2, 4, keep).unwrap();
            let split = &partial_trace(&x, 2, 4, keep).unwrap() + &partial_trace(&y, 2, 4, keep).unwrap().scale_real(s);
            prop_assert!(combo.max_abs_diff(&split) < 1e-12);
            prop_assert!((partial_trace(&x, 2, 4, keep).unwrap().trace() - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn exp_of_negated_generator_inverts(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = rng_for(seed, 0);
        let h = random_generator(n, 2.0, &mut rng);
        let prod = exp_i_hermitian(&h).matmul(&exp_i_hermitian(&h.negated()));
        prop_assert!(prod.max_abs_diff(&ComplexMatrix::identity(1 << n)) < 1e-10);
    }

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), d in 1usize..9) {
        let mut rng = rng_for(seed, 0);
        let h = gaussian_matrix(d, &mut rng).hermitian_part();
        let (vals, _) = hermitian_eig(&h).unwrap();
        prop_assert!((vals.iter().sum::<f64>() - h.trace().re).abs() < 1e-10);
    }

    #[test]
    fn pauli_coefficient_round_trip(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = rng_for(seed, 0);
        let rho = sample_mixed(n, &mut rng);
        let back = density_from_coeffs(&pauli_coeffs(&rho)).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn local_swap_gives_reduced_purity(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let psi = sample_haar_pure(2, &mut rng);
        let lhs = kron(psi.matrix(), psi.matrix()).trace_of_product(&local_swap_first_qubit()).re;
        prop_assert!((lhs - (-renyi2_entropy_reduced(&psi).unwrap()).exp()).abs() < 1e-10);
    }

    #[test]
    fn layers_are_cptp_and_affine(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = rng_for(seed, 0);
        let layer = random_layer(n, &mut rng);
        let rho = sample_mixed(n, &mut rng);
        let tau = sample_mixed(1, &mut rng);
        let out = apply_layer(&tau, &rho, &layer).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(min_eigenvalue(out.matrix()).unwrap() >= -1e-10);
        let mapped = layer_affine_map(&layer, &rho).unwrap().apply(tau.bloch());
        let direct = out.bloch();
        for k in 0..3 {
            prop_assert!((mapped[k] - direct[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn cascade_equals_composed_maps(seed in any::<u64>(), n in 1usize..3, depth in 1usize..5) {
        let mut rng = rng_for(seed, 0);
        let layers: Vec<LayerSpec> = (0..depth).map(|_| random_layer(n, &mut rng)).collect();
        let model = ReuploadModel::new(n, layers, [0.3, -0.2, 0.5], 0.1).unwrap();
        let rho = sample_mixed(n, &mut rng);
        let mut total = AffineBlochMap::identity();
        for layer in &model.layers {
            total = layer_affine_map(layer, &rho).unwrap().after(&total);
        }
        let composed = total.apply(model.initial_signal.bloch());
        let simulated = *signal_trajectory(&model, &rho).unwrap().last().unwrap();
        for k in 0..3 {
            prop_assert!((composed[k] - simulated[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn delta_compiler_error_is_quadratic(seed in any::<u64>(), big_l in 1usize..7) {
        let mut rng = rng_for(seed, 0);
        let v: Vec<f64> = (0..=big_l).map(|_| rng.random_range(-1.0..1.0)).collect();
        let basis = univariate_basis(1, 3);
        let err = |delta: f64| {
            let got = extract_coefficients(&compile_univariate_delta(&v, delta).unwrap().model, &basis).unwrap();
            got.iter().zip(&v).fold(0.0f64, |a, (g, t)| a.max((g - t).abs()))
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        // Degree-1 targets are realized exactly up to rounding.
        prop_assume!(e1 > 1e-9);
        prop_assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn coefficients_scale_with_readout(seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut rng = rng_for(seed, 0);
        let model = random_restricted(&mut rng, 3);
        let mut scaled = model.clone();
        scaled.w = model.w.map(|x| c * x);
        scaled.b = c * model.b;
        let basis = univariate_basis(1, 3);
        let a = extract_coefficients(&model, &basis).unwrap();
        let b = extract_coefficients(&scaled, &basis).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((c * x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn schedule_length_is_total_exponent(exps in prop::collection::vec((1usize..4, 1u32..4), 1..4)) {
        let monomials: Vec<MonomialSpec> = exps.iter().map(|&(a, e)| MonomialSpec::new(1.0, &[(a, e)])).collect();
        let poly = PolynomialSpec::new(1, 0.0, monomials).unwrap();
        let total: u32 = exps.iter().map(|&(_, e)| e).sum();
        prop_assert_eq!(schedule_layers(&poly).unwrap().len(), total as usize);
    }

    #[test]
    fn shift_rule_matches_finite_difference(seed in any::<u64>(), depth in 1usize..5) {
        let mut rng = rng_for(seed, 0);
        let model = random_restricted(&mut rng, depth);
        let rho = sample_bloch_ball(&mut rng);
        let layer = rng.random_range(0..depth);
        let h = 1e-6;
        let eval = |d: f64| {
            let mut m = model.clone();
            m.layers[layer].theta += d;
            run_model(&m, &rho).unwrap().1
        };
        let fd = (eval(h) - eval(-h)) / (2.0 * h);
        prop_assert!((gradient_param_shift(&model, &rho, layer).unwrap() - fd).abs() < 1e-7);
    }

    #[test]
    fn swap_test_equals_purity(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = rng_for(seed, 0);
        let rho = sample_mixed(n, &mut rng);
        prop_assert!((swap_test_purity(&rho, 0, &mut rng).unwrap() - purity(&rho)).abs() < 1e-10);
    }

    #[test]
    fn certificate_invariants(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let u = sample_haar_unitary(4, &mut rng);
        let v = sample_haar_unitary(4, &mut rng);
        let o = random_observable(&mut rng);
        let obs = TwoLayerCertificate::build(&u, &v, &o).unwrap();
        prop_assert!(obs.kraus_completeness_error() < 1e-12);
        prop_assert!(obs.c_tilde().transpose().matmul(&obs.c()).max_abs_diff(&obs.t) < 1e-10);
        let (_, det) = observation1_certificate(&u, &v, &o).unwrap();
        prop_assert!(det.abs() <= 1e-9);
    }

    #[test]
    fn purity_observable_det_at_least_one(c in prop::array::uniform6(-3.0f64..3.0), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let (det, mismatch) = purity_observable_det(c, 10, &mut rng).unwrap();
        prop_assert!(det >= 1.0 - 1e-10);
        prop_assert!(mismatch < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dataset_labels_follow_rule(seed in any::<u64>(), task_index in 0usize..4) {
        let task = Task::ALL[task_index];
        let split = generate(task, 40, 10, seed).unwrap();
        for s in split.train.iter().chain(&split.test) {
            let meta = task.meta_of(&s.state).unwrap();
            prop_assert!((meta - s.meta_value().unwrap()).abs() < 1e-12);
            prop_assert_eq!(task.label_from_meta(meta).unwrap(), s.label);
        }
    }

    #[test]
    fn training_is_deterministic(seed in any::<u64>()) {
        let split = generate(Task::Band, 30, 10, seed).unwrap();
        let model = init_general_model(1, 2, seed).unwrap();
        let config = TrainConfig { max_epochs: 5, seed, ..TrainConfig::default() };
        let a = train(&model, &split.train, &split.test, &config).unwrap();
        let b = train(&model, &split.train, &split.test, &config).unwrap();
        prop_assert_eq!(a.loss_history, b.loss_history);
    }

    #[test]
    fn shot_loss_converges_to_exact(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 1);
        let model = random_restricted(&mut rng, 2);
        let rho = sample_bloch_ball(&mut rng);
        let (_, f) = run_model(&model, &rho).unwrap();
        let batch = [LabeledState::new(rho, 0.3)];
        let exact_cfg = TrainConfig { seed, ..TrainConfig::regression() };
        let shots = 100_000;
        let sampled_cfg = TrainConfig { shots, ..exact_cfg.clone() };
        let exact = batch_loss(&model, &batch, &exact_cfg).unwrap();
        let sampled = batch_loss(&model, &batch, &sampled_cfg).unwrap();
        // σ_f from per-axis binomial noise, propagated through (f − y)².
        let per_axis = (shots / 3) as f64;
        let sigma_f = model.w.iter().map(|w| w * w / per_axis).sum::<f64>().sqrt();
        let sigma_loss = 2.0 * (f - 0.3).abs() * sigma_f + sigma_f * sigma_f;
        prop_assert!((exact - sampled).abs() <= 3.0 * sigma_loss + 1e-12);
    }
}
