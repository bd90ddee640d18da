//! Experiment configuration.
//!
//! A config is a TOML file with the sections below. Every key is optional and
//! defaults to the CASE 1 setup: disk of radius 0.7 in [-1, 1]², 100×100 forward
//! grid, 90×90 inversion grid, 256 boundary points, nine slope lines with
//! lengths 1.0, 1.2, ..., 50.0 and k = 15.2.
//!
//! ```toml
//! [domain]       # half_width, radius, n_forward, n_inversion, n_boundary
//! [plan]         # n_lines, kappa_min, kappa_max, d_kappa, line_counts
//! [physics]      # k = [..], b, multipliers = [..]
//! [potential]    # preset = "CASE1" | "CASE2" | "ZERO" | "custom", bumps = [{ amplitude, center, width }]
//! [measurement]  # mode = "full" | "linearized", noise, trace_step, benchmark, scheme, gap_tolerance
//! [forward]      # kappa, direction
//! [bounds]       # n, eps = [..], m1, radius, d, c_omega, b = [..], k_min, k_max, k_count
//! [attenuation]  # b = [..], multiplier
//! [run]          # seed, workers
//! [output]       # dir, png
//! ```

use std::path::{Path, PathBuf};

use helmrecon_core::{GaussianBump, GaussianMixture, Preset};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub plan: PlanConfig,
    pub physics: PhysicsConfig,
    pub potential: PotentialConfig,
    pub measurement: MeasurementConfig,
    pub forward: ForwardConfig,
    pub bounds: BoundsConfig,
    pub attenuation: AttenuationConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub half_width: f64,
    pub radius: f64,
    pub n_forward: usize,
    pub n_inversion: usize,
    pub n_boundary: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { half_width: 1.0, radius: 0.7, n_forward: 100, n_inversion: 90, n_boundary: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanConfig {
    pub n_lines: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub d_kappa: f64,
    /// Evenly spaced line subsets to synthesize in addition to the full plan.
    pub line_counts: Vec<usize>,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self { n_lines: 9, kappa_min: 1.0, kappa_max: 50.0, d_kappa: 0.2, line_counts: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub k: Vec<f64>,
    pub b: f64,
    /// Truncation multipliers `m` in `K = m k`.
    pub multipliers: Vec<f64>,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self { k: vec![15.2], b: 0.0, multipliers: vec![1.0, 2.0, 3.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub preset: String,
    pub bumps: Vec<BumpConfig>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self { preset: "CASE1".into(), bumps: Vec::new() }
    }
}

impl PotentialConfig {
    /// `None` for the zero potential.
    pub fn mixture(&self) -> Result<Option<GaussianMixture>, CliError> {
        let custom = self.preset.eq_ignore_ascii_case("custom");
        if !self.bumps.is_empty() && !custom {
            return Err(CliError::Config("potential.bumps requires preset = \"custom\"".into()));
        }
        if custom {
            if self.bumps.is_empty() {
                return Err(CliError::Config("preset = \"custom\" needs at least one entry in potential.bumps".into()));
            }
            let bumps = self
                .bumps
                .iter()
                .map(|b| GaussianBump { amplitude: b.amplitude, center: b.center, width: b.width })
                .collect();
            return Ok(Some(GaussianMixture::new(bumps)?));
        }
        if self.preset.eq_ignore_ascii_case("zero") {
            return Ok(None);
        }
        Ok(Some(GaussianMixture::preset(self.preset.parse::<Preset>()?)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Linearized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasurementConfig {
    pub mode: Mode,
    pub noise: f64,
    /// Radial trace step in grid spacings.
    pub trace_step: f64,
    /// "discrete" or "analytic" benchmark trace in full mode.
    pub benchmark: String,
    /// "corrected" or "standard" treatment of k².
    pub scheme: String,
    pub gap_tolerance: f64,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            noise: 0.0,
            trace_step: 1.5,
            benchmark: "discrete".into(),
            scheme: "corrected".into(),
            gap_tolerance: helmrecon_core::helmholtz::DEFAULT_GAP_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForwardConfig {
    pub kappa: f64,
    pub direction: [f64; 2],
}

impl Default for ForwardConfig {
    fn default() -> Self {
        Self { kappa: 8.4, direction: [-0.17, 0.98] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub n: u32,
    pub eps: Vec<f64>,
    pub m1: f64,
    /// Radius of the ball whose volumes enter the constants.
    pub radius: f64,
    /// Diameter parameter; defaults to `2 radius`.
    pub d: Option<f64>,
    pub c_omega: f64,
    /// Attenuations for the attenuated-bound columns.
    pub b: Vec<f64>,
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            n: 2,
            eps: vec![1e-3],
            m1: 1.0,
            radius: 0.5,
            d: None,
            c_omega: 1.0,
            b: vec![0.5, 1.0, 2.0],
            k_min: 1.05,
            k_max: 100.0,
            k_count: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttenuationConfig {
    pub b: Vec<f64>,
    pub multiplier: f64,
}

impl Default for AttenuationConfig {
    fn default() -> Self {
        Self { b: vec![0.0, 0.5, 1.0, 2.0], multiplier: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write a PNG next to every PGM heatmap.
    pub png: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), png: false }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub noise: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if let Some(w) = o.workers {
            self.run.workers = w;
        }
        if let Some(s) = o.seed {
            self.run.seed = s;
        }
        if let Some(m) = o.mode {
            self.measurement.mode = m;
        }
        if let Some(r) = o.noise {
            self.measurement.noise = r;
        }
        self.validate()
    }

    /// Checks that do not need a solve; the core re-checks its own preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.physics.k.is_empty() {
            return bad("physics.k must list at least one wavenumber".into());
        }
        if let Some(k) = self.physics.k.iter().find(|k| !(**k > 0.0) || !k.is_finite()) {
            return bad(format!("physics.k entries must be positive (got {k})"));
        }
        if !(self.physics.b >= 0.0) {
            return bad(format!("physics.b must be nonnegative (got {})", self.physics.b));
        }
        if let Some(m) = self.physics.multipliers.iter().find(|m| !(**m > 0.0)) {
            return bad(format!("physics.multipliers entries must be positive (got {m})"));
        }
        if !(self.measurement.noise >= 0.0) || !self.measurement.noise.is_finite() {
            return bad(format!("measurement.noise must be nonnegative (got {})", self.measurement.noise));
        }
        if !(self.measurement.trace_step > 0.0) {
            return bad(format!("measurement.trace_step must be positive (got {})", self.measurement.trace_step));
        }
        if !(self.measurement.gap_tolerance >= 0.0) {
            return bad(format!(
                "measurement.gap_tolerance must be nonnegative (got {})",
                self.measurement.gap_tolerance
            ));
        }
        self.benchmark()?;
        self.scheme()?;
        self.potential.mixture()?;
        if self.forward.direction[0].hypot(self.forward.direction[1]) == 0.0 {
            return bad("forward.direction must be nonzero".into());
        }
        if let Some(&c) = self.plan.line_counts.iter().find(|&&c| c == 0 || c > self.plan.n_lines) {
            return bad(format!("plan.line_counts entries must lie in 1..={} (got {c})", self.plan.n_lines));
        }
        if !(self.bounds.k_min > 0.0 && self.bounds.k_max > self.bounds.k_min) || self.bounds.k_count < 2 {
            return bad("bounds need 0 < k_min < k_max and k_count >= 2".into());
        }
        if !(self.attenuation.multiplier > 0.0) {
            return bad(format!("attenuation.multiplier must be positive (got {})", self.attenuation.multiplier));
        }
        if let Some(b) = self.attenuation.b.iter().find(|b| !(**b >= 0.0)) {
            return bad(format!("attenuation.b entries must be nonnegative (got {b})"));
        }
        Ok(())
    }

    pub fn benchmark(&self) -> Result<helmrecon_core::BenchmarkTrace, CliError> {
        match self.measurement.benchmark.to_ascii_lowercase().as_str() {
            "discrete" => Ok(helmrecon_core::BenchmarkTrace::Discrete),
            "analytic" => Ok(helmrecon_core::BenchmarkTrace::Analytic),
            other => {
                Err(CliError::Config(format!("measurement.benchmark must be discrete or analytic (got '{other}')")))
            }
        }
    }

    pub fn scheme(&self) -> Result<helmrecon_core::Scheme, CliError> {
        match self.measurement.scheme.to_ascii_lowercase().as_str() {
            "corrected" => Ok(helmrecon_core::Scheme::DispersionCorrected),
            "standard" => Ok(helmrecon_core::Scheme::Standard),
            other => Err(CliError::Config(format!("measurement.scheme must be corrected or standard (got '{other}')"))),
        }
    }

    /// Canonical JSON used for hashing.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("configs always serialize")
    }
}
