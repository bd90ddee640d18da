//! Linearized inverse Schrödinger potential reconstruction at large wavenumber.
//!
//! Synthetic Dirichlet-to-Neumann data are produced by a finite-difference
//! solver on a disk embedded in a square grid, probed with complex exponential
//! solutions, converted to Fourier coefficients of the potential, and
//! resynthesized by a truncated inverse Fourier sum.

pub mod banded;
pub mod bounds;
pub mod error;
pub mod geometry;
pub mod helmholtz;
pub mod measurement;
pub mod potentials;
pub mod reconstruction;
pub mod sampling;
pub mod waves;

pub use num_complex::Complex64;

pub use bounds::{omega, omega_and_kstar, theorem1_bound, theorem2_bound, OptimalWavenumber, Regime, StabilityParams};
pub use error::{Error, Result};
pub use geometry::{boundary_nodes, build_grid, BoundaryDiscretization, Grid};
pub use helmholtz::{
    assemble, assemble_with, neumann_trace, solve_dirichlet, solve_linearized, ComplexField, Dirichlet, Factorization,
    PotentialField, Scheme, SolverWarning, TraceStencil,
};
pub use measurement::{
    dtn_norm_estimate, synthesize_measurement, BenchmarkTrace, BoundaryTrace, ForwardModel, MeasurementOptions,
    MeasurementRecord, Provenance,
};
pub use potentials::{GaussianBump, GaussianMixture, Preset};
pub use reconstruction::{
    error_metrics, fourier_coefficient, recover_coefficients, run_algorithm1, synthesize, CoefficientTable,
    ErrorMetrics, ReconstructionResult, ReconstructionSettings,
};
pub use sampling::{build_sampling, hermitian_complete, PlanPoint, SamplingPlan, SpectralSample};
pub use waves::{make_wave_pair, Probe, WaveVectorPair};
