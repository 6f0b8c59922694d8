//! Delta-train solvers for linear equations with memory.
//!
//! A coupling concentrated on `N` equally spaced instants turns an
//! integro-differential equation into a finite linear problem. The same
//! machinery drives a qubit in a Lorentzian cavity and a harmonic oscillator
//! in a thermal bath.

pub mod diagram;
pub mod error;
pub mod jc;
pub mod kernel;
pub mod linalg;
pub mod qle;
pub mod quadrature;
pub mod reference;
pub mod scalar;
pub mod spectral;

pub use diagram::{
    classify, enumerate, enumerate_restricted, sum_check, Classification, Diagram, SumCheck,
};
pub use error::{Error, Result};
pub use jc::{
    choi_spectrum, decay_rates, exact_amplitude, kraus_operators, rhp_measure, transfer,
    transfer_restricted, ChoiSpectrum, JcParams, TransferFunction,
};
pub use kernel::{
    build_k, k_row, solve_at, solve_nodes, xi_at, DeltaTrain, FreePropagator, KernelSpec,
    MemoryMatrix, MemorySolver, NoiseSequence, Side, SignConvention,
};
pub use linalg::{Mat2, SquareMatrix};
pub use qle::{BaseFunction, NoiseCovariance, Oscillator, OscillatorParams, TransferPair};
pub use reference::{green_constant, jc_exact, reference_q2, RationalGreen};
pub use scalar::{Cplx, Real};
pub use spectral::{noise_nu, PeriodicSpectralDensity, SpectralSource, ThermalUnits};

pub type DeltaTrainF64 = DeltaTrain<f64>;
pub type DeltaTrainF32 = DeltaTrain<f32>;
pub type MemorySolverF64 = MemorySolver<f64>;
pub type MemorySolverF32 = MemorySolver<f32>;
pub type OscillatorF64 = Oscillator<f64>;
pub type OscillatorF32 = Oscillator<f32>;
pub type JcParamsF64 = JcParams<f64>;
pub type JcParamsF32 = JcParams<f32>;
pub type SpectralSourceF64 = SpectralSource<f64>;
pub type SpectralSourceF32 = SpectralSource<f32>;
