//! Simulation, compilation and training of quantum-data re-uploading circuits.
//!
//! A single signal qubit is repeatedly entangled with a fresh copy of an input
//! state ρ and the input register is discarded. Each layer therefore acts on
//! the signal's Bloch vector as an affine map whose coefficients are linear in
//! the Pauli coefficients λ of ρ, so the final readout is a polynomial in λ.

pub mod channel;
pub mod compiler;
pub mod datasets;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod pauli;
pub mod rng;
pub mod states;
pub mod trainer;
pub mod verify;

pub use channel::{
    apply_layer, build_coupling, expectation, hadamard_test, layer_affine_map, run_model,
    AffineBlochMap, CouplingSpec, InitialSignal, LayerSpec, ReuploadModel, TracePart,
};
pub use compiler::{
    compile_univariate_delta, extract_coefficients, fit_coefficients, jacobian_theta0,
    schedule_layers, CompiledCircuit, MonomialSpec, PolynomialSpec,
};
pub use error::{Error, Result};
pub use linalg::{
    exp_i_hermitian, hermitian_eig, kron, partial_trace, ComplexMatrix, HermitianGenerator, Keep,
};
pub use pauli::{pauli_matrix, pauli_projectors, PauliWord};
pub use rng::rng_for;
pub use states::{
    density_from_coeffs, pauli_coeffs, psi_t, purity, renyi2_entropy, sample_bloch_ball,
    sample_haar_pure, sample_mixed, DensityMatrix, LabeledState, PauliCoeffs,
};
