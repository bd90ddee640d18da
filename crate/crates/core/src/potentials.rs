//! Gaussian-mixture ground-truth potentials.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::helmholtz::PotentialField;

/// `amplitude · exp(-|x - center|² / width²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub width: f64,
}

impl GaussianBump {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        self.amplitude * (-(dx * dx + dy * dy) / (self.width * self.width)).exp()
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let s2 = self.width * self.width;
        let v = self.eval(x);
        [-2.0 * (x[0] - self.center[0]) / s2 * v, -2.0 * (x[1] - self.center[1]) / s2 * v]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub bumps: Vec<GaussianBump>,
}

/// Named mixtures used by the shipped experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// One peak and one valley.
    Case1,
    /// Four bumps of mixed sign.
    Case2,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "case1" => Ok(Preset::Case1),
            "case2" => Ok(Preset::Case2),
            other => Err(Error::Config(format!("unknown potential preset '{other}' (expected CASE1 or CASE2)"))),
        }
    }
}

impl GaussianMixture {
    pub fn new(bumps: Vec<GaussianBump>) -> Result<Self> {
        for b in &bumps {
            if !(b.width > 0.0) || !b.amplitude.is_finite() || !b.center.iter().all(|c| c.is_finite()) {
                return Err(Error::Config(format!("invalid Gaussian bump {b:?}")));
            }
        }
        Ok(Self { bumps })
    }

    pub fn preset(p: Preset) -> Self {
        let bump = |amplitude, center, width| GaussianBump { amplitude, center, width };
        let bumps = match p {
            Preset::Case1 => vec![bump(1.0, [-0.25, 0.2], 0.15), bump(-1.0, [0.25, -0.2], 0.15)],
            Preset::Case2 => vec![
                bump(1.0, [-0.3, -0.25], 0.12),
                bump(-0.8, [0.3, 0.25], 0.14),
                bump(0.7, [0.25, -0.3], 0.10),
                bump(-0.6, [-0.25, 0.3], 0.11),
            ],
        };
        Self { bumps }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.bumps.iter().map(|b| b.eval(x)).sum()
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        self.bumps.iter().fold([0.0, 0.0], |acc, b| {
            let g = b.gradient(x);
            [acc[0] + g[0], acc[1] + g[1]]
        })
    }

    /// Samples onto the grid (zero outside the disk) and attaches the H¹ norm.
    pub fn sample(&self, grid: &Arc<Grid>) -> PotentialField {
        PotentialField::from_fn(grid, |x| self.eval(x)).with_m1(self.h1_norm(grid.radius(), 400))
    }

    /// `‖c‖_{H¹}` over the disk of `radius` by polar midpoint quadrature with
    /// `n` radial and `4n` angular cells.
    pub fn h1_norm(&self, radius: f64, n: usize) -> f64 {
        let dr = radius / n as f64;
        let na = 4 * n;
        let da = 2.0 * PI / na as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) * dr;
            for j in 0..na {
                let a = (j as f64 + 0.5) * da;
                let x = [r * a.cos(), r * a.sin()];
                let v = self.eval(x);
                let g = self.gradient(x);
                acc += (v * v + g[0] * g[0] + g[1] * g[1]) * r;
            }
        }
        (acc * dr * da).sqrt()
    }
}
