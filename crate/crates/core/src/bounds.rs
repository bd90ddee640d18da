//! Increasing-stability estimates for the linearized potential problem.
//!
//! With `E = -ln ε`, the unattenuated estimate is
//!
//! ```text
//! ‖c‖² ≤ C (k^{n+4} + E^{n+4}) ε² + C E^{n+2} (ε + ε³) + M₁² / (1 + E² + 3k²)
//! ```
//!
//! and splits into a high-wavenumber regime (`k > E`) and a low one (`k ≤ E`)
//! with constants `C₁`, `C₂` built from the domain volumes. In the high regime
//! the bound is dominated by `ω(k) = C₁ k^{n+4} ε² + M₁² / (4k²)`, minimized at
//! `k* = (M₁² / (2(n+4) C₁ ε²))^{1/(n+6)}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    pub n: u32,
    pub eps: f64,
    pub m1: f64,
    /// Diameter parameter, `2 sup |x|`; must not exceed 1.
    pub d: f64,
    /// Trace/domain constant `C(Ω)`.
    pub c_omega: f64,
    pub b: f64,
    pub vol_n: f64,
    pub vol_nm1: f64,
    pub sigma_n: f64,
}

impl Default for StabilityParams {
    /// Unit-diameter disk, `ε = 10⁻³`, `M₁ = 1`, `C(Ω) = 1`, no attenuation.
    fn default() -> Self {
        Self::for_ball(2, 0.5, 1e-3, 1.0)
    }
}

/// Which partial estimate applies at a given `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `k > E`.
    HighWavenumber,
    /// `k ≤ E`.
    LowWavenumber,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::HighWavenumber => "k>E",
            Regime::LowWavenumber => "k<=E",
        }
    }
}

impl StabilityParams {
    /// Ball of `radius` in `R^n` with `C(Ω) = 1`, `b = 0`.
    pub fn for_ball(n: u32, radius: f64, eps: f64, m1: f64) -> Self {
        let sigma_n = unit_ball_volume(n);
        Self {
            n,
            eps,
            m1,
            d: 2.0 * radius,
            c_omega: 1.0,
            b: 0.0,
            vol_n: sigma_n * radius.powi(n as i32),
            vol_nm1: unit_ball_volume(n.saturating_sub(1)) * radius.powi(n as i32 - 1),
            sigma_n,
        }
    }

    /// `E = -ln ε`.
    pub fn big_e(&self) -> f64 {
        -self.eps.ln()
    }

    /// Checks `n ≥ 2`, `0 < ε < 1`, `0 < D ≤ 1`, `M₁ ≥ 0`, `C(Ω) > 0`.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Hypothesis(format!("dimension n = {} must be at least 2", self.n)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Hypothesis(format!("need 0 < ε < 1 (got ε = {})", self.eps)));
        }
        if !(self.d > 0.0 && self.d <= 1.0) {
            return Err(Error::Hypothesis(format!("need 0 < D ≤ 1 (got D = {})", self.d)));
        }
        if !(self.m1 >= 0.0) || !self.m1.is_finite() {
            return Err(Error::Hypothesis(format!("need M₁ ≥ 0 (got M₁ = {})", self.m1)));
        }
        if !(self.c_omega > 0.0) || !self.c_omega.is_finite() {
            return Err(Error::Hypothesis(format!("need C(Ω) > 0 (got {})", self.c_omega)));
        }
        if !(self.b >= 0.0) || !self.b.is_finite() {
            return Err(Error::Hypothesis(format!("need b ≥ 0 (got b = {})", self.b)));
        }
        Ok(())
    }

    fn check_k(&self, k: f64) -> Result<()> {
        self.validate()?;
        if !(k > 1.0) || !k.is_finite() {
            return Err(Error::Hypothesis(format!("need k > 1 (got k = {k})")));
        }
        Ok(())
    }

    /// `C₁ = C⁴ (Vol_n)² σ_n 2^{n+2}`.
    pub fn c1(&self) -> f64 {
        self.c_omega.powi(4) * self.vol_n * self.vol_n * self.sigma_n * 2f64.powi(self.n as i32 + 2)
    }

    /// `C₂ = C⁴ (Vol_{n-1})² σ_n (4 / D^{n-2}) [(1 + 4D²)^{n/2} - (2D)^n]`.
    pub fn c2(&self) -> f64 {
        let n = self.n as i32;
        let d = self.d;
        self.c_omega.powi(4) * self.vol_nm1 * self.vol_nm1 * self.sigma_n * 4.0 / d.powi(n - 2)
            * ((1.0 + 4.0 * d * d).powf(0.5 * n as f64) - (2.0 * d).powi(n))
    }

    pub fn regime(&self, k: f64) -> Regime {
        if k > self.big_e() {
            Regime::HighWavenumber
        } else {
            Regime::LowWavenumber
        }
    }
}

/// Combined estimate valid for every `k > 1`.
pub fn theorem1_bound(k: f64, p: &StabilityParams) -> Result<f64> {
    p.check_k(k)?;
    let (n, e, eps, c) = (p.n as i32, p.big_e(), p.eps, p.c_omega);
    Ok(c * (k.powi(n + 4) + e.powi(n + 4)) * eps * eps
        + c * e.powi(n + 2) * (eps + eps.powi(3))
        + p.m1 * p.m1 / (1.0 + e * e + 3.0 * k * k))
}

/// High-wavenumber partial estimate `C₁ k^{n+4} ε² + M₁² / (1 + E² + 3k²)`.
pub fn bound_high_wavenumber(k: f64, p: &StabilityParams) -> Result<f64> {
    p.check_k(k)?;
    let e = p.big_e();
    Ok(p.c1() * k.powi(p.n as i32 + 4) * p.eps * p.eps + p.m1 * p.m1 / (1.0 + e * e + 3.0 * k * k))
}

/// Low-wavenumber partial estimate
/// `C₁ E^{n+4} ε² + C₂ E^{n+2} (ε + ε³) + M₁² / (1 + E²/D² + 4k²)`.
pub fn bound_low_wavenumber(k: f64, p: &StabilityParams) -> Result<f64> {
    p.check_k(k)?;
    let (n, e, eps) = (p.n as i32, p.big_e(), p.eps);
    Ok(p.c1() * e.powi(n + 4) * eps * eps
        + p.c2() * e.powi(n + 2) * (eps + eps.powi(3))
        + p.m1 * p.m1 / (1.0 + e * e / (p.d * p.d) + 4.0 * k * k))
}

/// The partial estimate of the regime `k` falls in.
pub fn regime_bound(k: f64, p: &StabilityParams) -> Result<(Regime, f64)> {
    match p.regime(k) {
        Regime::HighWavenumber => Ok((Regime::HighWavenumber, bound_high_wavenumber(k, p)?)),
        Regime::LowWavenumber => Ok((Regime::LowWavenumber, bound_low_wavenumber(k, p)?)),
    }
}

/// Attenuated estimate; `b ≤ 0` is refused in favour of [`theorem1_bound`].
pub fn theorem2_bound(k: f64, p: &StabilityParams) -> Result<f64> {
    if !(p.b > 0.0) {
        return Err(Error::NoAttenuation(p.b));
    }
    p.check_k(k)?;
    let (n, e, eps, c, d, b) = (p.n as i32, p.big_e(), p.eps, p.c_omega, p.d, p.b);
    let far = (d * d * b).exp();
    Ok(c * (k.powi(n + 4) + e.powi(n + 4)) * (2.0 * d * b).exp() * eps * eps
        + c * e.powi(n + 4) * far * eps
        + c * e.powi(n + 2) * far * eps
        + p.m1 * p.m1 / (1.0 + e * e + 2.0 * k * k))
}

/// `ω(k) = C₁ k^{n+4} ε² + M₁² / (4k²)`.
pub fn omega(k: f64, n: u32, c1: f64, m1: f64, eps: f64) -> f64 {
    c1 * k.powi(n as i32 + 4) * eps * eps + m1 * m1 / (4.0 * k * k)
}

/// Unconstrained minimizer of [`omega`].
pub fn k_star(n: u32, c1: f64, m1: f64, eps: f64) -> Result<f64> {
    if !(c1 > 0.0) || !c1.is_finite() {
        return Err(Error::DegenerateConstant(format!("C₁ = {c1}")));
    }
    let n = n as f64;
    Ok((m1 * m1 / (2.0 * (n + 4.0) * c1 * eps * eps)).powf(1.0 / (n + 6.0)))
}

/// Closed form of `ω(k*)`.
pub fn omega_at_k_star(n: u32, c1: f64, m1: f64, eps: f64) -> f64 {
    let n = n as f64;
    let q = 2.0 * (n + 4.0);
    c1.powf(2.0 / (n + 6.0))
        * m1.powf(2.0 * (n + 4.0) / (n + 6.0))
        * (q.powf(-(n + 4.0) / (n + 6.0)) + 0.25 * q.powf(2.0 / (n + 6.0)))
        * eps.powf(4.0 / (n + 6.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalWavenumber {
    /// Unconstrained minimizer.
    pub k_star: f64,
    /// Minimizer over the admissible range (`k ≥ 1`, and `k ≥ E` when `E ≥ 1`).
    pub k_opt: f64,
    pub omega_opt: f64,
    /// `k_opt` sits on the lower end of the admissible range.
    pub clamped: bool,
}

/// `k*` and the smallest `ω` over the admissible wavenumbers.
pub fn omega_and_kstar(p: &StabilityParams) -> Result<OptimalWavenumber> {
    p.validate()?;
    let c1 = p.c1();
    let ks = k_star(p.n, c1, p.m1, p.eps)?;
    let floor = p.big_e().max(1.0);
    let (k_opt, clamped) = if ks > floor { (ks, false) } else { (floor, true) };
    let omega_opt = if clamped { omega(k_opt, p.n, c1, p.m1, p.eps) } else { omega_at_k_star(p.n, c1, p.m1, p.eps) };
    Ok(OptimalWavenumber { k_star: ks, k_opt, omega_opt, clamped })
}
