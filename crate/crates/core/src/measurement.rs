//! Synthetic linearized Neumann data `g1' = ∂ν u − ∂ν u0` for probe pairs.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryDiscretization, Grid};
use crate::helmholtz::{
    assemble_with, check_pair, neumann_trace, ComplexField, Dirichlet, Factorization, PotentialField, Scheme,
    SolverWarning, TraceStencil, DEFAULT_GAP_TOLERANCE,
};
use crate::waves::{eval_probe, neumann_of_probe, Probe, WaveVectorPair};

/// Complex samples at the boundary points.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub boundary: Arc<BoundaryDiscretization>,
    pub values: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn new(boundary: Arc<BoundaryDiscretization>, values: Vec<Complex64>) -> Self {
        assert_eq!(boundary.len(), values.len(), "trace length must match the boundary");
        Self { boundary, values }
    }

    pub fn zeros(boundary: &Arc<BoundaryDiscretization>) -> Self {
        Self::new(Arc::clone(boundary), vec![Complex64::new(0.0, 0.0); boundary.len()])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.boundary.l2_norm(&self.values)
    }

    pub fn sub(&self, other: &BoundaryTrace) -> BoundaryTrace {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        BoundaryTrace::new(Arc::clone(&self.boundary), values)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.is_finite())
    }
}

/// How the measurement was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Solve the full problem with the potential and subtract the benchmark trace.
    FullNonlinear,
    /// Solve the linearized sub-problem directly and take `∂ν u1`.
    DirectLinearized,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::FullNonlinear => "full-nonlinear-synthesis",
            Provenance::DirectLinearized => "direct-linearized",
        }
    }
}

/// Source of `∂ν u0` subtracted in full-nonlinear mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BenchmarkTrace {
    /// Trace of the discrete zero-potential solve on the same grid and stencil, so
    /// discretization error common to both solves cancels.
    #[default]
    Discrete,
    /// Exact `i (ζ·ν) exp(i ζ·x)`.
    Analytic,
}

#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub pair: WaveVectorPair,
    pub g1_prime: BoundaryTrace,
    pub noise_level: f64,
    pub provenance: Provenance,
    pub warnings: Vec<SolverWarning>,
}

impl MeasurementRecord {
    /// Dirichlet data `g0 = u0|∂Ω` that produced the record.
    pub fn g0(&self) -> BoundaryTrace {
        let b = &self.g1_prime.boundary;
        BoundaryTrace::new(Arc::clone(b), eval_probe(&self.pair, Probe::U0, &b.points))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOptions {
    pub stencil: TraceStencil,
    pub benchmark: BenchmarkTrace,
    pub scheme: Scheme,
    pub gap_tolerance: f64,
}

impl Default for MeasurementOptions {
    fn default() -> Self {
        Self {
            stencil: TraceStencil::default(),
            benchmark: BenchmarkTrace::default(),
            scheme: Scheme::default(),
            gap_tolerance: DEFAULT_GAP_TOLERANCE,
        }
    }
}

/// Fields produced for a single probe, used for figure-style output.
#[derive(Debug, Clone)]
pub struct ForwardFields {
    pub u: ComplexField,
    pub u0: ComplexField,
    pub g0: BoundaryTrace,
    pub g1: BoundaryTrace,
    pub du0: BoundaryTrace,
    pub g1_prime: BoundaryTrace,
}

/// A potential on a forward grid with the factorizations needed to measure any
/// probe at fixed `(k, b)`. Factorizations are built on first use and shared.
pub struct ForwardModel {
    grid: Arc<Grid>,
    boundary: Arc<BoundaryDiscretization>,
    potential: PotentialField,
    k: f64,
    b: f64,
    options: MeasurementOptions,
    background: OnceLock<Result<Factorization>>,
    full: OnceLock<Result<Factorization>>,
}

impl ForwardModel {
    pub fn new(
        potential: PotentialField,
        boundary: Arc<BoundaryDiscretization>,
        k: f64,
        b: f64,
        options: MeasurementOptions,
    ) -> Result<Self> {
        let grid = Arc::clone(potential.grid());
        if (boundary.radius() - grid.radius()).abs() > 1e-12 * grid.radius() {
            return Err(Error::Geometry("boundary and grid use different circles".into()));
        }
        if !(k > 0.0) || !(b >= 0.0) {
            return Err(Error::Domain(format!("need k > 0 and b >= 0 (got k = {k}, b = {b})")));
        }
        Ok(Self { grid, boundary, potential, k, b, options, background: OnceLock::new(), full: OnceLock::new() })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn boundary(&self) -> &Arc<BoundaryDiscretization> {
        &self.boundary
    }

    pub fn potential(&self) -> &PotentialField {
        &self.potential
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn background(&self) -> Result<&Factorization> {
        self.background
            .get_or_init(|| {
                assemble_with(&self.grid, &PotentialField::zeros(&self.grid), self.k, self.b, self.options.scheme)?
                    .factorize_with(self.options.gap_tolerance)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn full(&self) -> Result<&Factorization> {
        self.full
            .get_or_init(|| {
                assemble_with(&self.grid, &self.potential, self.k, self.b, self.options.scheme)?
                    .factorize_with(self.options.gap_tolerance)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// All intermediate fields of the full-problem measurement.
    pub fn forward_fields(&self, pair: &WaveVectorPair) -> Result<ForwardFields> {
        check_pair(self.full()?.system(), pair)?;
        let g0 = Dirichlet::probe(pair);
        let u = self.full()?.solve_dirichlet(&g0)?;
        let u0 = self.background()?.solve_dirichlet(&g0)?;
        let stencil = self.options.stencil;
        let g1 = neumann_trace(&u, &self.boundary, stencil)?;
        let du0 = match self.options.benchmark {
            BenchmarkTrace::Discrete => neumann_trace(&u0, &self.boundary, stencil)?,
            BenchmarkTrace::Analytic => neumann_of_probe(pair, &self.boundary),
        };
        let g1_prime = match self.options.benchmark {
            // Same operator applied to the difference; avoids cancellation in g1 - du0.
            BenchmarkTrace::Discrete => neumann_trace(&u.difference(&u0)?, &self.boundary, stencil)?,
            BenchmarkTrace::Analytic => g1.sub(&du0),
        };
        let g0 = BoundaryTrace::new(Arc::clone(&self.boundary), eval_probe(pair, Probe::U0, &self.boundary.points));
        Ok(ForwardFields { u, u0, g0, g1, du0, g1_prime })
    }

    /// Noise-free `g1'` plus the solver warnings raised while producing it.
    pub fn clean_trace(&self, pair: &WaveVectorPair, mode: Provenance) -> Result<(BoundaryTrace, Vec<SolverWarning>)> {
        let stencil = self.options.stencil;
        match mode {
            Provenance::DirectLinearized => {
                let u1 = self.background()?.solve_linearized(&self.potential, pair)?;
                Ok((neumann_trace(&u1, &self.boundary, stencil)?, u1.warnings))
            }
            Provenance::FullNonlinear => {
                let full = self.full()?;
                check_pair(full.system(), pair)?;
                let g0 = Dirichlet::probe(pair);
                let u = full.solve_dirichlet(&g0)?;
                match self.options.benchmark {
                    BenchmarkTrace::Discrete => {
                        let u0 = self.background()?.solve_dirichlet(&g0)?;
                        let d = u.difference(&u0)?;
                        Ok((neumann_trace(&d, &self.boundary, stencil)?, d.warnings))
                    }
                    BenchmarkTrace::Analytic => {
                        let g1 = neumann_trace(&u, &self.boundary, stencil)?;
                        Ok((g1.sub(&neumann_of_probe(pair, &self.boundary)), u.warnings))
                    }
                }
            }
        }
    }

    pub fn measure<R: Rng + ?Sized>(
        &self,
        pair: &WaveVectorPair,
        mode: Provenance,
        noise_level: f64,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        if !(noise_level >= 0.0) || !noise_level.is_finite() {
            return Err(Error::Config(format!("noise level must be nonnegative (got {noise_level})")));
        }
        let (mut g1_prime, mut warnings) = self.clean_trace(pair, mode)?;
        add_noise(&mut g1_prime, noise_level, rng);
        warnings.dedup();
        Ok(MeasurementRecord { pair: *pair, g1_prime, noise_level, provenance: mode, warnings })
    }
}

/// Adds circular complex Gaussian noise whose boundary L² norm is
/// `level · ‖trace‖`.
pub fn add_noise<R: Rng + ?Sized>(trace: &mut BoundaryTrace, level: f64, rng: &mut R) {
    if level == 0.0 {
        return;
    }
    let target = level * trace.l2_norm();
    if target == 0.0 {
        return;
    }
    let eta: Vec<Complex64> =
        (0..trace.len()).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let scale = target / trace.boundary.l2_norm(&eta);
    for (v, e) in trace.values.iter_mut().zip(eta) {
        *v += e * scale;
    }
}

/// One-shot measurement: assembles and factors the needed operators for this call only.
pub fn synthesize_measurement<R: Rng + ?Sized>(
    c: &PotentialField,
    pair: &WaveVectorPair,
    boundary: &Arc<BoundaryDiscretization>,
    mode: Provenance,
    noise_level: f64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let model = ForwardModel::new(c.clone(), Arc::clone(boundary), pair.k, pair.b, MeasurementOptions::default())?;
    model.measure(pair, mode, noise_level, rng)
}

/// Computable proxy for the operator norm of the linearized DtN map:
/// `max ‖g1'‖ / ‖g0‖` in boundary L².
pub fn dtn_norm_estimate(records: &[MeasurementRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Config("no measurement records".into()));
    }
    Ok(records
        .iter()
        .map(|r| {
            let g0 = r.g0().l2_norm();
            if g0 == 0.0 {
                0.0
            } else {
                r.g1_prime.l2_norm() / g0
            }
        })
        .fold(0.0, f64::max))
}
