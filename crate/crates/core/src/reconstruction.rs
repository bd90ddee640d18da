//! Fourier coefficients from boundary data and truncated inverse-Fourier synthesis.
//!
//! For a probe pair with `u0 v = exp(i ξ·x)`, the linearized data satisfy
//! `∫_Ω c u0 v dx = ∫_∂Ω g1' v ds`, so each boundary integral yields `F[c](ξ)`.
//! The potential is then resynthesized as
//! `c_inv(x) = Re Σ_{κ ≤ K} σ F(ξ) exp(-i ξ·x)` over the Hermitian-completed samples.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::helmholtz::{PotentialField, SolverWarning};
use crate::measurement::{ForwardModel, MeasurementRecord, Provenance};
use crate::sampling::{hermitian_complete, within_cutoff, SamplingPlan, SpectralSample, CUTOFF_SLACK};
use crate::waves::{make_wave_pair, plane_wave};

/// `∫_∂Ω g1' v ds` by the boundary trapezoid rule.
pub fn fourier_coefficient(record: &MeasurementRecord) -> Complex64 {
    let boundary = &record.g1_prime.boundary;
    let zeta_star = record.pair.zeta_star;
    boundary
        .points
        .iter()
        .zip(&boundary.weights)
        .zip(&record.g1_prime.values)
        .map(|((&x, &w), &g)| g * plane_wave(zeta_star, x) * w)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientEntry {
    pub line: usize,
    pub length: usize,
    pub kappa: f64,
    pub theta: f64,
    pub xi: [f64; 2],
    pub value: Complex64,
    /// Volume quadrature of the forward-grid potential.
    pub truth: Option<Complex64>,
    /// The probe solve raised a warning.
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub k: f64,
    pub b: f64,
    pub forward_n: usize,
    pub mode: Provenance,
    pub noise_level: f64,
    /// Every plan point with `κ ≤ kappa_limit` is present.
    pub kappa_limit: f64,
    /// Entries in plan order.
    pub entries: Vec<CoefficientEntry>,
    /// First warning raised, if any; see `flagged` on the entries.
    pub warning: Option<SolverWarning>,
}

impl CoefficientTable {
    pub fn flagged_count(&self) -> usize {
        self.entries.iter().filter(|e| e.flagged).count()
    }

    fn errors_in<B: Fn(f64) -> bool>(&self, band: B) -> impl Iterator<Item = (f64, f64)> + use<'_, B> {
        self.entries
            .iter()
            .filter(move |e| band(e.kappa))
            .filter_map(|e| e.truth.map(|t| ((e.value - t).norm(), t.norm())))
    }

    /// `max |recovered - true|` over entries whose length satisfies `band`.
    pub fn max_abs_error(&self, band: impl Fn(f64) -> bool) -> f64 {
        self.errors_in(band).fold(0.0, |m, (e, _)| m.max(e))
    }

    /// `Σ |recovered - true| / Σ |true|` over entries whose length satisfies `band`.
    pub fn mean_relative_error(&self, band: impl Fn(f64) -> bool) -> f64 {
        let (num, den) = self.errors_in(band).fold((0.0, 0.0), |(n, d), (e, t)| (n + e, d + t));
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionSettings {
    pub mode: Provenance,
    pub noise_level: f64,
    pub seed: u64,
    /// Worker threads for the probe solves; 0 uses all available cores.
    pub workers: usize,
    /// Attach volume-quadrature coefficients of the forward potential.
    pub with_truth: bool,
}

impl Default for ReconstructionSettings {
    fn default() -> Self {
        Self { mode: Provenance::FullNonlinear, noise_level: 0.0, seed: 0, workers: 0, with_truth: true }
    }
}

fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Measures and integrates every plan point with `κ ≤ kappa_limit`.
///
/// Each probe draws noise from its own stream keyed by the plan point, so the
/// table does not depend on the worker count or on which points are requested.
pub fn recover_coefficients(
    model: &ForwardModel,
    plan: &SamplingPlan,
    kappa_limit: f64,
    settings: &ReconstructionSettings,
) -> Result<CoefficientTable> {
    if plan.k() != model.k() {
        return Err(Error::Config(format!("plan built for k = {} but the model uses k = {}", plan.k(), model.k())));
    }
    if !within_cutoff(kappa_limit, plan.kappa_max()) {
        return Err(Error::Coverage { requested: kappa_limit, available: plan.kappa_max() });
    }
    // Factor once up front so worker threads share the result.
    match settings.mode {
        Provenance::FullNonlinear => {
            model.full()?;
            model.background()?;
        }
        Provenance::DirectLinearized => {
            model.background()?;
        }
    }
    let points: Vec<_> = plan.points_within(kappa_limit).copied().collect();
    let entries = run_in_pool(settings.workers, || {
        points
            .par_iter()
            .map(|p| {
                let pair = make_wave_pair(p.xi, model.k(), model.b())?;
                let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
                rng.set_stream(plan.point_id(p));
                let record = model.measure(&pair, settings.mode, settings.noise_level, &mut rng)?;
                let truth = settings.with_truth.then(|| model.potential().fourier(p.xi));
                Ok((
                    CoefficientEntry {
                        line: p.line,
                        length: p.length,
                        kappa: p.kappa,
                        theta: p.theta,
                        xi: p.xi,
                        value: fourier_coefficient(&record),
                        truth,
                        flagged: !record.warnings.is_empty(),
                    },
                    record.warnings.into_iter().next(),
                ))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let warning = entries.iter().find_map(|(_, w)| w.clone());
    Ok(CoefficientTable {
        k: model.k(),
        b: model.b(),
        forward_n: model.grid().n_per_side(),
        mode: settings.mode,
        noise_level: settings.noise_level,
        kappa_limit,
        entries: entries.into_iter().map(|(e, _)| e).collect(),
        warning,
    })
}

/// A synthesized potential and its discarded imaginary part.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub field: PotentialField,
    /// `max |Im| / max |Re|` over the disk before the real part is taken.
    pub imaginary_residue: f64,
}

/// `Σ σ F(ξ) exp(-i ξ·x)` at every interior node of `grid`, in sample order.
pub fn synthesize_samples(samples: &[SpectralSample], grid: &Arc<Grid>) -> Synthesis {
    let values: Vec<Complex64> = (0..grid.interior_count())
        .into_par_iter()
        .map(|p| {
            let x = grid.position(p);
            samples
                .iter()
                .map(|s| s.value * s.weight * Complex64::from_polar(1.0, -(s.xi[0] * x[0] + s.xi[1] * x[1])))
                .sum()
        })
        .collect();
    let n = grid.n_per_side();
    let mut real = vec![0.0; grid.node_count()];
    let (mut max_re, mut max_im) = (0.0f64, 0.0f64);
    for (p, z) in values.iter().enumerate() {
        let (i, j) = grid.lattice_index(p);
        real[j * n + i] = z.re;
        max_re = max_re.max(z.re.abs());
        max_im = max_im.max(z.im.abs());
    }
    let imaginary_residue = if max_im == 0.0 { 0.0 } else { max_im / max_re };
    let field = PotentialField::from_values(grid, real).expect("synthesized values are finite and sized to the grid");
    Synthesis { field, imaginary_residue }
}

/// Hermitian-completed samples of `plan` with `κ ≤ truncation`, taken from `table`.
pub fn completed_samples(
    table: &CoefficientTable,
    plan: &SamplingPlan,
    truncation: f64,
) -> Result<Vec<SpectralSample>> {
    if !(truncation > 0.0) || !truncation.is_finite() {
        return Err(Error::Config(format!("truncation must be positive (got {truncation})")));
    }
    let available = table.kappa_limit.min(plan.kappa_max());
    if truncation > available * (1.0 + CUTOFF_SLACK) {
        return Err(Error::Coverage { requested: truncation, available });
    }
    let index: HashMap<(usize, usize), &CoefficientEntry> =
        table.entries.iter().map(|e| ((e.line, e.length), e)).collect();
    let samples = plan
        .points_within(truncation)
        .map(|p| match index.get(&(p.line, p.length)) {
            Some(e) => Ok(SpectralSample { xi: p.xi, value: e.value, weight: p.weight }),
            None => Err(Error::Coverage { requested: truncation, available: p.kappa }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hermitian_complete(&samples))
}

/// Truncated synthesis of `table` on `grid` with the weights of `plan`.
pub fn synthesize(
    table: &CoefficientTable,
    plan: &SamplingPlan,
    truncation: f64,
    grid: &Arc<Grid>,
) -> Result<Synthesis> {
    Ok(synthesize_samples(&completed_samples(table, plan, truncation)?, grid))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub relative_l2: f64,
    pub relative_linf: f64,
}

/// Relative discrete L² and L∞ errors over the disk nodes.
pub fn error_metrics(c_inv: &PotentialField, c_true: &PotentialField) -> Result<ErrorMetrics> {
    if !c_inv.grid().same_layout(c_true.grid()) {
        return Err(Error::Config("error metrics need both fields on the same grid".into()));
    }
    let grid = c_inv.grid();
    let (mut diff2, mut true2, mut diff_max, mut true_max) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in 0..grid.interior_count() {
        let (a, t) = (c_inv.at_unknown(p), c_true.at_unknown(p));
        diff2 += (a - t) * (a - t);
        true2 += t * t;
        diff_max = diff_max.max((a - t).abs());
        true_max = true_max.max(t.abs());
    }
    if true2 == 0.0 {
        return Err(Error::Config("reference potential vanishes on the disk".into()));
    }
    Ok(ErrorMetrics { relative_l2: (diff2 / true2).sqrt(), relative_linf: diff_max / true_max })
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub c_inv: PotentialField,
    pub multiplier: f64,
    pub truncation: f64,
    pub imaginary_residue: f64,
    pub metrics: Option<ErrorMetrics>,
    pub table: Arc<CoefficientTable>,
}

impl ReconstructionResult {
    pub fn warning(&self) -> Option<&SolverWarning> {
        self.table.warning.as_ref()
    }
}

/// Synthesizes one truncation from an existing table.
pub fn reconstruct_from_table(
    table: &Arc<CoefficientTable>,
    plan: &SamplingPlan,
    multiplier: f64,
    inversion: &Arc<Grid>,
    truth: Option<&PotentialField>,
) -> Result<ReconstructionResult> {
    let truncation = multiplier * table.k;
    let s = synthesize(table, plan, truncation, inversion)?;
    let metrics = truth.map(|t| error_metrics(&s.field, t)).transpose()?;
    Ok(ReconstructionResult {
        c_inv: s.field,
        multiplier,
        truncation,
        imaginary_residue: s.imaginary_residue,
        metrics,
        table: Arc::clone(table),
    })
}

/// Measures every probe up to `K = m k`, then synthesizes `c_inv` on `inversion`.
///
/// `truth`, when given, must live on the inversion grid.
pub fn run_algorithm1(
    model: &ForwardModel,
    plan: &SamplingPlan,
    multiplier: f64,
    settings: &ReconstructionSettings,
    inversion: &Arc<Grid>,
    truth: Option<&PotentialField>,
) -> Result<ReconstructionResult> {
    if !(multiplier > 0.0) {
        return Err(Error::Config(format!("truncation multiplier must be positive (got {multiplier})")));
    }
    let truncation = multiplier * model.k();
    if !within_cutoff(truncation, plan.kappa_max()) {
        return Err(Error::Coverage { requested: truncation, available: plan.kappa_max() });
    }
    let table = Arc::new(recover_coefficients(model, plan, truncation, settings)?);
    reconstruct_from_table(&table, plan, multiplier, inversion, truth)
}
