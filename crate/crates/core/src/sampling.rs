//! Phase-space sampling along slope lines and its Hermitian completion.
//!
//! A plan places `ξ = κ ŷ_s` on `n_lines` rays `θ_s = s Δθ`, `Δθ = 2π / n_lines`,
//! at lengths `κ_ℓ = κ_min + ℓ Δκ`. Each point carries the polar midpoint weight
//! `σ = κ Δκ Δθ / (2π)²`, the inverse-transform normalization for
//! `F[c](ξ) = ∫ c(x) exp(i ξ·x) dx`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative slack when comparing lengths against a cutoff, so that `K = m k`
/// includes the length that equals it up to rounding.
pub const CUTOFF_SLACK: f64 = 1e-9;

/// `κ ≤ cutoff` with [`CUTOFF_SLACK`].
pub fn within_cutoff(kappa: f64, cutoff: f64) -> bool {
    kappa <= cutoff * (1.0 + CUTOFF_SLACK)
}

/// `ξ = κ (cos θ, sin θ)`.
pub fn polar_point(kappa: f64, theta: f64) -> [f64; 2] {
    [kappa * theta.cos(), kappa * theta.sin()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanPoint {
    /// Index of the slope line in the unrestricted plan.
    pub line: usize,
    /// Index of the length `κ_ℓ`.
    pub length: usize,
    pub kappa: f64,
    pub theta: f64,
    pub xi: [f64; 2],
    pub direction: [f64; 2],
    pub companion: [f64; 2],
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    n_lines: usize,
    lines: Vec<usize>,
    lengths: Vec<f64>,
    d_kappa: f64,
    k: f64,
    /// Points ordered by length, then by line.
    points: Vec<PlanPoint>,
}

pub fn build_sampling(n_lines: usize, kappa_min: f64, kappa_max: f64, d_kappa: f64, k: f64) -> Result<SamplingPlan> {
    if n_lines == 0 {
        return Err(Error::Config("a sampling plan needs at least one slope line".into()));
    }
    if !(kappa_min > 0.0) || !(kappa_max >= kappa_min) || !kappa_max.is_finite() {
        return Err(Error::Config(format!("need 0 < kappa_min <= kappa_max (got {kappa_min}, {kappa_max})")));
    }
    if !(d_kappa > 0.0) || !d_kappa.is_finite() {
        return Err(Error::Config(format!("kappa step must be positive (got {d_kappa})")));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("wavenumber must be positive (got {k})")));
    }
    let count = ((kappa_max - kappa_min) / d_kappa * (1.0 + CUTOFF_SLACK)).floor() as usize + 1;
    let lengths: Vec<f64> = (0..count).map(|l| kappa_min + l as f64 * d_kappa).collect();
    let lines: Vec<usize> = (0..n_lines).collect();
    let mut plan = SamplingPlan { n_lines, lines, lengths, d_kappa, k, points: Vec::new() };
    plan.points = plan.layout(1.0);
    Ok(plan)
}

impl SamplingPlan {
    fn layout(&self, weight_scale: f64) -> Vec<PlanPoint> {
        let d_theta = self.d_theta();
        let mut points = Vec::with_capacity(self.lengths.len() * self.lines.len());
        for (l, &kappa) in self.lengths.iter().enumerate() {
            for &s in &self.lines {
                let theta = s as f64 * d_theta;
                let direction = [theta.cos(), theta.sin()];
                points.push(PlanPoint {
                    line: s,
                    length: l,
                    kappa,
                    theta,
                    xi: [kappa * direction[0], kappa * direction[1]],
                    direction,
                    companion: [-direction[1], direction[0]],
                    weight: weight_scale * kappa * self.d_kappa * d_theta / (4.0 * PI * PI),
                });
            }
        }
        points
    }

    /// Number of lines in the unrestricted plan.
    pub fn n_lines(&self) -> usize {
        self.n_lines
    }

    /// Line indices present in this plan.
    pub fn lines(&self) -> &[usize] {
        &self.lines
    }

    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_lines as f64
    }

    pub fn d_kappa(&self) -> f64 {
        self.d_kappa
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn kappa_max(&self) -> f64 {
        *self.lengths.last().expect("plans have at least one length")
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Largest truncation multiplier the plan supports.
    pub fn m_max(&self) -> f64 {
        self.kappa_max() / self.k
    }

    pub fn points(&self) -> &[PlanPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points with `κ ≤ cutoff`.
    pub fn points_within(&self, cutoff: f64) -> impl Iterator<Item = &PlanPoint> {
        self.points.iter().filter(move |p| within_cutoff(p.kappa, cutoff))
    }

    /// Total weight of the points with `κ ≤ cutoff`.
    pub fn weight_within(&self, cutoff: f64) -> f64 {
        self.points_within(cutoff).map(|p| p.weight).sum()
    }

    /// Stable identifier of a point, independent of line restriction.
    pub fn point_id(&self, p: &PlanPoint) -> u64 {
        (p.length * self.n_lines + p.line) as u64
    }

    /// Keeps the given lines and rescales weights by `n_lines / |subset|`.
    pub fn restrict_lines(&self, line_indices: &[usize]) -> Result<SamplingPlan> {
        let mut lines: Vec<usize> = line_indices.to_vec();
        lines.sort_unstable();
        lines.dedup();
        if lines.is_empty() {
            return Err(Error::Config("line subset is empty".into()));
        }
        if let Some(&bad) = lines.iter().find(|s| !self.lines.contains(s)) {
            return Err(Error::Config(format!("line {bad} is not part of the plan")));
        }
        let mut plan = SamplingPlan { lines, points: Vec::new(), ..self.clone() };
        plan.points = plan.layout(self.n_lines as f64 / plan.lines.len() as f64);
        Ok(plan)
    }
}

/// `count` line indices spread evenly over `0..n_lines`.
pub fn evenly_spaced_lines(n_lines: usize, count: usize) -> Vec<usize> {
    let count = count.min(n_lines);
    (0..count).map(|i| i * n_lines / count).collect()
}

/// A weighted Fourier sample ready for synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSample {
    pub xi: [f64; 2],
    pub value: Complex64,
    pub weight: f64,
}

fn mirror_key(xi: [f64; 2]) -> (i64, i64) {
    // 1e-9 resolution; plan points are far coarser.
    ((xi[0] * 1e9).round() as i64, (xi[1] * 1e9).round() as i64)
}

/// Closes a sample set under `ξ ↦ -ξ` with conjugate values.
///
/// A sample whose mirror is present is replaced by `(F(ξ) + conj F(-ξ)) / 2` with
/// the mean of the two weights; otherwise it is split into `(ξ, F, σ/2)` and
/// `(-ξ, conj F, σ/2)`. Total weight is preserved and the map is idempotent.
pub fn hermitian_complete(samples: &[SpectralSample]) -> Vec<SpectralSample> {
    let index: HashMap<(i64, i64), usize> = samples.iter().enumerate().map(|(i, s)| (mirror_key(s.xi), i)).collect();
    let mut out = Vec::with_capacity(2 * samples.len());
    for s in samples {
        let mirror = [-s.xi[0], -s.xi[1]];
        match index.get(&mirror_key(mirror)) {
            Some(&j) => {
                let value = (s.value + samples[j].value.conj()) * 0.5;
                let weight = 0.5 * (s.weight + samples[j].weight);
                out.push(SpectralSample { value, weight, ..*s });
            }
            None => {
                let weight = 0.5 * s.weight;
                out.push(SpectralSample { weight, ..*s });
                out.push(SpectralSample { xi: mirror, value: s.value.conj(), weight });
            }
        }
    }
    out
}
