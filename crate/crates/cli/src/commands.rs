//! The five experiment drivers.

use std::sync::Arc;

use helmrecon_core::bounds::{regime_bound, OptimalWavenumber};
use helmrecon_core::measurement::add_noise;
use helmrecon_core::reconstruction::reconstruct_from_table;
use helmrecon_core::sampling::{evenly_spaced_lines, within_cutoff};
use helmrecon_core::waves::attenuated_y;
use helmrecon_core::{
    boundary_nodes, build_grid, build_sampling, make_wave_pair, neumann_trace, omega, omega_and_kstar,
    recover_coefficients, run_algorithm1, theorem1_bound, theorem2_bound, BoundaryDiscretization, CoefficientTable,
    Error, ForwardModel, GaussianMixture, Grid, MeasurementOptions, PotentialField, Provenance, ReconstructionResult,
    ReconstructionSettings, SamplingPlan, StabilityParams, TraceStencil,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::output::{num, OutputDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Solve one probe and write u0, g0, g1, u - u0 and g1'.
    Forward,
    /// Recover Fourier coefficients and synthesize c_inv for every multiplier.
    Reconstruct,
    /// Reconstruct at K = 2k for every listed k.
    SweepK,
    /// Tabulate the stability bounds and the optimal wavenumber.
    Bounds,
    /// Reconstruct for every listed attenuation b.
    Attenuation,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Forward => "forward",
            Command::Reconstruct => "reconstruct",
            Command::SweepK => "sweep-k",
            Command::Bounds => "bounds",
            Command::Attenuation => "attenuation",
        }
    }
}

/// Runs `command`, writes its outputs and `manifest.json`, and returns the manifest.
pub fn execute(command: Command, config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    config.validate()?;
    let mut out = OutputDir::create(&config.output.dir, config.output.png)?;
    let mut manifest = RunManifest::new(command.name(), config);
    let result = match command {
        Command::Forward => forward(config, &mut out, &mut manifest),
        Command::Reconstruct => reconstruct(config, &mut out, &mut manifest),
        Command::SweepK => sweep_k(config, &mut out, &mut manifest),
        Command::Bounds => bounds(config, &mut out, &mut manifest),
        Command::Attenuation => attenuation(config, &mut out, &mut manifest),
    };
    manifest.outputs = out.written().to_vec();
    out.json("manifest.json", &manifest)?;
    result.map(|()| manifest)
}

/// Grids, boundary and potential shared by the drivers.
struct Setup {
    forward: Arc<Grid>,
    inversion: Arc<Grid>,
    boundary: Arc<BoundaryDiscretization>,
    mixture: Option<GaussianMixture>,
    options: MeasurementOptions,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let d = &cfg.domain;
        let forward = Arc::new(build_grid(d.n_forward, d.half_width, d.radius)?);
        let inversion = Arc::new(build_grid(d.n_inversion, d.half_width, d.radius)?);
        let boundary = Arc::new(boundary_nodes(&forward, d.n_boundary)?);
        let options = MeasurementOptions {
            stencil: TraceStencil { step: cfg.measurement.trace_step },
            benchmark: cfg.benchmark()?,
            scheme: cfg.scheme()?,
            gap_tolerance: cfg.measurement.gap_tolerance,
        };
        Ok(Self { forward, inversion, boundary, mixture: cfg.potential.mixture()?, options })
    }

    fn potential(&self, grid: &Arc<Grid>) -> PotentialField {
        match &self.mixture {
            Some(m) => m.sample(grid),
            None => PotentialField::zeros(grid),
        }
    }

    fn model(&self, k: f64, b: f64) -> Result<ForwardModel, CliError> {
        Ok(ForwardModel::new(self.potential(&self.forward), Arc::clone(&self.boundary), k, b, self.options)?)
    }
}

fn provenance(mode: Mode) -> Provenance {
    match mode {
        Mode::Full => Provenance::FullNonlinear,
        Mode::Linearized => Provenance::DirectLinearized,
    }
}

fn settings(cfg: &ExperimentConfig) -> ReconstructionSettings {
    ReconstructionSettings {
        mode: provenance(cfg.measurement.mode),
        noise_level: cfg.measurement.noise,
        seed: cfg.run.seed,
        workers: cfg.run.workers,
        with_truth: true,
    }
}

fn plan_for(cfg: &ExperimentConfig, k: f64) -> Result<SamplingPlan, CliError> {
    let p = &cfg.plan;
    Ok(build_sampling(p.n_lines, p.kappa_min, p.kappa_max, p.d_kappa, k)?)
}

fn single_k(cfg: &ExperimentConfig, command: &str) -> Result<f64, CliError> {
    match cfg.physics.k.as_slice() {
        [k] => Ok(*k),
        ks => Err(CliError::Config(format!("{command} takes exactly one wavenumber (physics.k has {})", ks.len()))),
    }
}

fn note_table_warning(manifest: &mut RunManifest, table: &CoefficientTable) {
    if let Some(w) = &table.warning {
        manifest.warn(format!("{w} ({} of {} probes flagged)", table.flagged_count(), table.entries.len()));
    }
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

#[derive(Serialize)]
struct ForwardSummary {
    k: f64,
    b: f64,
    kappa: f64,
    direction: [f64; 2],
    xi: [f64; 2],
    mu: [f64; 2],
    evanescent: bool,
    mode: &'static str,
    noise: f64,
    g0_l2: f64,
    g1_prime_l2: f64,
    relative_gap: f64,
}

fn forward(cfg: &ExperimentConfig, out: &mut OutputDir, manifest: &mut RunManifest) -> Result<(), CliError> {
    let k = single_k(cfg, "forward")?;
    let b = cfg.physics.b;
    let setup = Setup::new(cfg)?;
    let model = setup.model(k, b)?;
    let [dx, dy] = cfg.forward.direction;
    let norm = dx.hypot(dy);
    let direction = [dx / norm, dy / norm];
    let kappa = cfg.forward.kappa;
    let pair = make_wave_pair([kappa * direction[0], kappa * direction[1]], k, b)?;

    let fields = manifest.time("factor and solve", || model.forward_fields(&pair))?;
    for w in &fields.u.warnings {
        manifest.warn(w.to_string());
    }
    let mode = provenance(cfg.measurement.mode);
    let mut g1_prime = match mode {
        Provenance::FullNonlinear => fields.g1_prime.clone(),
        Provenance::DirectLinearized => {
            let u1 =
                manifest.time("linearized solve", || model.background()?.solve_linearized(model.potential(), &pair))?;
            out.complex_grid("u1.csv", &u1)?;
            out.complex_heatmap("u1_re", &u1)?;
            neumann_trace(&u1, model.boundary(), setup.options.stencil)?
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    add_noise(&mut g1_prime, cfg.measurement.noise, &mut rng);

    manifest.time("write fields", || -> Result<(), CliError> {
        let diff = fields.u.difference(&fields.u0)?;
        out.real_grid("c.csv", model.potential())?;
        out.real_heatmap("c", model.potential())?;
        out.complex_grid("u0.csv", &fields.u0)?;
        out.complex_heatmap("u0_re", &fields.u0)?;
        out.trace("g0.csv", &fields.g0)?;
        out.trace("g1.csv", &fields.g1)?;
        out.complex_grid("u_minus_u0.csv", &diff)?;
        out.complex_heatmap("u_minus_u0_re", &diff)?;
        out.trace("g1_prime.csv", &g1_prime)
    })?;
    let summary = ForwardSummary {
        k,
        b,
        kappa,
        direction,
        xi: pair.xi,
        mu: [pair.mu.re, pair.mu.im],
        evanescent: pair.is_evanescent(),
        mode: mode.as_str(),
        noise: cfg.measurement.noise,
        g0_l2: fields.g0.l2_norm(),
        g1_prime_l2: g1_prime.l2_norm(),
        relative_gap: model.full()?.relative_gap(),
    };
    out.json("forward_summary.json", &summary)
}

const METRIC_HEADER: [&str; 11] = [
    "k",
    "lines",
    "multiplier",
    "truncation",
    "relative_l2",
    "relative_linf",
    "imaginary_residue",
    "coefficient_mean_rel_error",
    "coefficient_max_abs_error",
    "flagged_probes",
    "near_eigenvalue",
];

fn metric_row(lines: usize, r: &ReconstructionResult) -> Vec<String> {
    let t = &r.table;
    let band = |kappa: f64| within_cutoff(kappa, r.truncation);
    let m = r.metrics.expect("reconstructions are run against the sampled truth");
    vec![
        num(t.k),
        lines.to_string(),
        num(r.multiplier),
        num(r.truncation),
        num(m.relative_l2),
        num(m.relative_linf),
        num(r.imaginary_residue),
        num(t.mean_relative_error(band)),
        num(t.max_abs_error(band)),
        t.flagged_count().to_string(),
        flag(t.warning.is_some()),
    ]
}

fn write_coefficients(out: &mut OutputDir, name: &str, table: &CoefficientTable) -> Result<(), CliError> {
    let rows = table.entries.iter().map(|e| {
        let t = e.truth.unwrap_or_default();
        vec![
            e.line.to_string(),
            e.length.to_string(),
            num(e.kappa),
            num(e.theta),
            num(e.value.re),
            num(e.value.im),
            num(t.re),
            num(t.im),
            flag(e.flagged),
        ]
    });
    out.csv(name, &["line", "length", "kappa", "theta", "re", "im", "re_true", "im_true", "flagged"], rows)
}

fn write_plan(out: &mut OutputDir, plan: &SamplingPlan) -> Result<(), CliError> {
    let rows = plan
        .points()
        .iter()
        .map(|p| vec![p.line.to_string(), p.length.to_string(), num(p.kappa), num(p.theta), num(p.weight)]);
    out.csv("plan.csv", &["line", "length", "kappa", "theta", "weight"], rows)
}

fn reconstruct(cfg: &ExperimentConfig, out: &mut OutputDir, manifest: &mut RunManifest) -> Result<(), CliError> {
    if cfg.physics.multipliers.is_empty() {
        return Err(CliError::Config("physics.multipliers is empty; there is nothing to synthesize".into()));
    }
    let m_max = cfg.physics.multipliers.iter().copied().fold(0.0, f64::max);
    let setup = Setup::new(cfg)?;
    let truth = setup.potential(&setup.inversion);
    out.real_grid("c_true.csv", &truth)?;
    out.real_heatmap("c_true", &truth)?;
    let settings = settings(cfg);
    let mut metrics = Vec::new();
    for (idx, &k) in cfg.physics.k.iter().enumerate() {
        let plan = plan_for(cfg, k)?;
        if idx == 0 {
            write_plan(out, &plan)?;
        }
        if !within_cutoff(m_max * k, plan.kappa_max()) {
            return Err(Error::Coverage { requested: m_max * k, available: plan.kappa_max() }.into());
        }
        let model = setup.model(k, cfg.physics.b)?;
        let table =
            manifest.time(format!("probes k = {k}"), || recover_coefficients(&model, &plan, m_max * k, &settings))?;
        let table = Arc::new(table);
        note_table_warning(manifest, &table);
        write_coefficients(out, &format!("coefficients_k{k}.csv"), &table)?;

        manifest.time(format!("synthesis k = {k}"), || -> Result<(), CliError> {
            for &m in &cfg.physics.multipliers {
                let r = reconstruct_from_table(&table, &plan, m, &setup.inversion, Some(&truth))?;
                out.real_grid(&format!("c_inv_k{k}_m{m}.csv"), &r.c_inv)?;
                out.real_heatmap(&format!("c_inv_k{k}_m{m}"), &r.c_inv)?;
                metrics.push(metric_row(plan.n_lines(), &r));
            }
            for &count in &cfg.plan.line_counts {
                let subset = plan.restrict_lines(&evenly_spaced_lines(plan.n_lines(), count))?;
                for &m in &cfg.physics.multipliers {
                    let r = reconstruct_from_table(&table, &subset, m, &setup.inversion, Some(&truth))?;
                    out.real_grid(&format!("c_inv_k{k}_m{m}_lines{count}.csv"), &r.c_inv)?;
                    out.real_heatmap(&format!("c_inv_k{k}_m{m}_lines{count}"), &r.c_inv)?;
                    metrics.push(metric_row(count, &r));
                }
            }
            Ok(())
        })?;
    }
    out.csv("metrics.csv", &METRIC_HEADER, metrics)
}

fn sweep_k(cfg: &ExperimentConfig, out: &mut OutputDir, manifest: &mut RunManifest) -> Result<(), CliError> {
    const MULTIPLIER: f64 = 2.0;
    let setup = Setup::new(cfg)?;
    let truth = setup.potential(&setup.inversion);
    let settings = settings(cfg);
    let mut rows = Vec::new();
    for &k in &cfg.physics.k {
        let plan = plan_for(cfg, k)?;
        let model = setup.model(k, cfg.physics.b)?;
        let r = manifest.time(format!("reconstruct k = {k}"), || {
            run_algorithm1(&model, &plan, MULTIPLIER, &settings, &setup.inversion, Some(&truth))
        })?;
        note_table_warning(manifest, &r.table);
        let factor = match settings.mode {
            Provenance::FullNonlinear => model.full()?,
            Provenance::DirectLinearized => model.background()?,
        };
        out.real_heatmap(&format!("c_inv_k{k}"), &r.c_inv)?;
        let m = r.metrics.expect("run against the sampled truth");
        let band = |kappa: f64| within_cutoff(kappa, r.truncation);
        rows.push(vec![
            num(k),
            num(r.truncation),
            num(m.relative_l2),
            num(m.relative_linf),
            num(r.imaginary_residue),
            num(r.table.mean_relative_error(band)),
            num(factor.relative_gap()),
            flag(factor.near_eigenvalue() || r.table.warning.is_some()),
            r.table.flagged_count().to_string(),
        ]);
    }
    out.csv(
        "sweep_k.csv",
        &[
            "k",
            "truncation",
            "relative_l2",
            "relative_linf",
            "imaginary_residue",
            "coefficient_mean_rel_error",
            "relative_gap",
            "near_eigenvalue",
            "flagged_probes",
        ],
        rows,
    )
}

fn stability_params(cfg: &ExperimentConfig, eps: f64, b: f64) -> StabilityParams {
    let c = &cfg.bounds;
    let mut p = StabilityParams::for_ball(c.n, c.radius, eps, c.m1);
    p.c_omega = c.c_omega;
    p.b = b;
    if let Some(d) = c.d {
        p.d = d;
    }
    p
}

fn k_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    let c = &cfg.bounds;
    let ratio = c.k_max / c.k_min;
    (0..c.k_count).map(|i| c.k_min * ratio.powf(i as f64 / (c.k_count - 1) as f64)).collect()
}

fn bounds(cfg: &ExperimentConfig, out: &mut OutputDir, manifest: &mut RunManifest) -> Result<(), CliError> {
    let ks = k_grid(cfg);
    let mut header: Vec<String> =
        ["eps", "k", "status", "regime", "theorem1_bound", "regime_bound", "omega", "kstar_flag"]
            .map(String::from)
            .into();
    header.extend(cfg.bounds.b.iter().map(|b| format!("theorem2_b{b}")));
    let mut rows = Vec::new();
    let mut report = Vec::new();
    let mut first_rejection = None;
    let mut rejected = 0;
    for &eps in &cfg.bounds.eps {
        let p = stability_params(cfg, eps, 0.0);
        let optimal = p.validate().and_then(|()| omega_and_kstar(&p));
        let optimal = match optimal {
            Ok(o) => o,
            Err(e) => {
                manifest.warn(format!("ε = {eps}: {e}"));
                let status = format!("rejected: {e}");
                rows.extend(ks.iter().map(|&k| {
                    let mut row = vec![num(eps), num(k), status.clone()];
                    row.resize(header.len(), String::new());
                    row
                }));
                report.push(vec![
                    num(eps),
                    status,
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                rejected += 1;
                first_rejection.get_or_insert(e);
                continue;
            }
        };
        let OptimalWavenumber { k_star, k_opt, omega_opt, clamped } = optimal;
        report.push(vec![
            num(eps),
            "ok".into(),
            num(p.big_e()),
            num(k_star),
            num(k_opt),
            num(omega_opt),
            flag(clamped),
        ]);
        let nearest =
            ks.iter().enumerate().min_by(|a, b| (a.1 - k_opt).abs().total_cmp(&(b.1 - k_opt).abs())).map(|(i, _)| i);
        for (i, &k) in ks.iter().enumerate() {
            let mut row = vec![num(eps), num(k)];
            match theorem1_bound(k, &p).and_then(|t1| Ok((t1, regime_bound(k, &p)?))) {
                Ok((t1, (regime, rb))) => row.extend([
                    "ok".into(),
                    regime.as_str().into(),
                    num(t1),
                    num(rb),
                    num(omega(k, p.n, p.c1(), p.m1, eps)),
                    flag(Some(i) == nearest),
                ]),
                Err(e) => {
                    row.push(format!("rejected: {e}"));
                    row.resize(header.len(), String::new());
                    rows.push(row);
                    continue;
                }
            }
            for &b in &cfg.bounds.b {
                row.push(match theorem2_bound(k, &stability_params(cfg, eps, b)) {
                    Ok(v) => num(v),
                    Err(Error::NoAttenuation(_)) => "no-attenuation".into(),
                    Err(e) => format!("rejected: {e}"),
                });
            }
            rows.push(row);
        }
    }
    out.csv("bounds.csv", &header.iter().map(String::as_str).collect::<Vec<_>>(), rows)?;
    out.csv("kstar.csv", &["eps", "status", "big_e", "k_star", "k_opt", "omega_opt", "clamped"], report)?;
    match first_rejection {
        // Every ε rejected means there is no usable table.
        Some(e) if rejected == cfg.bounds.eps.len() => Err(e.into()),
        _ => Ok(()),
    }
}

fn attenuation(cfg: &ExperimentConfig, out: &mut OutputDir, manifest: &mut RunManifest) -> Result<(), CliError> {
    let k = single_k(cfg, "attenuation")?;
    let m = cfg.attenuation.multiplier;
    let setup = Setup::new(cfg)?;
    let truth = setup.potential(&setup.inversion);
    let settings = settings(cfg);
    let plan = plan_for(cfg, k)?;
    let eps = cfg.bounds.eps.first().copied().unwrap_or(1e-3);
    let mut rows = Vec::new();
    for &b in &cfg.attenuation.b {
        let model = setup.model(k, b)?;
        let r = manifest.time(format!("reconstruct b = {b}"), || {
            run_algorithm1(&model, &plan, m, &settings, &setup.inversion, Some(&truth))
        })?;
        note_table_warning(manifest, &r.table);
        out.real_heatmap(&format!("c_inv_b{b}"), &r.c_inv)?;
        let max_y = plan.points_within(r.truncation).map(|p| attenuated_y(p.kappa, k, b).abs()).fold(0.0, f64::max);
        let p = stability_params(cfg, eps, b);
        let (kind, bound) =
            if b > 0.0 { ("theorem2", theorem2_bound(k, &p)) } else { ("theorem1", theorem1_bound(k, &p)) };
        let bound = bound.map_or_else(|e| format!("rejected: {e}"), num);
        let metrics = r.metrics.expect("run against the sampled truth");
        let band = |kappa: f64| within_cutoff(kappa, r.truncation);
        rows.push(vec![
            num(b),
            num(k),
            num(r.truncation),
            num(metrics.relative_l2),
            num(metrics.relative_linf),
            num(r.imaginary_residue),
            num(r.table.mean_relative_error(band)),
            num(max_y),
            kind.into(),
            bound,
        ]);
    }
    out.csv(
        "attenuation.csv",
        &[
            "b",
            "k",
            "truncation",
            "relative_l2",
            "relative_linf",
            "imaginary_residue",
            "coefficient_mean_rel_error",
            "max_abs_y",
            "bound_kind",
            "bound",
        ],
        rows,
    )
}
