//! Complex exponential probe pairs `u0 = exp(i zeta . x)`, `v = exp(i zeta* . x)`.
//!
//! For a phase-space point `xi` with `e1 = xi/|xi|` and `e2 = e1` rotated by
//! +90 degrees, the pair uses
//!
//! ```text
//! mu    = sqrt(k^2 - |xi|^2/4 - i k b)      (Re mu >= 0; Im mu >= 0 when Re mu = 0)
//! zeta  = xi/2 + mu e2
//! zeta* = xi/2 - mu e2
//! ```
//!
//! so that `zeta . zeta = zeta* . zeta* = k^2 - i k b` and `u0 v = exp(i xi . x)`.
//! With `b = 0` and `|xi| > 2k`, `mu = i Xi` with `Xi = sqrt(|xi|^2/4 - k^2)` and
//! `u0` decays along `+e2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::BoundaryDiscretization;
use crate::measurement::BoundaryTrace;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVectorPair {
    pub xi: [f64; 2],
    pub e1: [f64; 2],
    pub e2: [f64; 2],
    pub k: f64,
    pub b: f64,
    pub mu: Complex64,
    pub zeta: [Complex64; 2],
    pub zeta_star: [Complex64; 2],
}

/// Which member of the probe pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    U0,
    V,
}

/// Principal root of `k^2 - |xi|^2/4 - i k b`, written out so that neither
/// part suffers cancellation.
fn principal_mu(xi_norm: f64, k: f64, b: f64) -> Complex64 {
    let a = k * k - 0.25 * xi_norm * xi_norm;
    if b == 0.0 {
        return if a >= 0.0 { Complex64::new(a.sqrt(), 0.0) } else { Complex64::new(0.0, (-a).sqrt()) };
    }
    let kb = k * b;
    let modulus = a.hypot(kb);
    if a >= 0.0 {
        let re = (0.5 * (modulus + a)).sqrt();
        Complex64::new(re, -kb / (2.0 * re))
    } else {
        let im = -(0.5 * (modulus - a)).sqrt();
        Complex64::new(kb / (2.0 * im.abs()), im)
    }
}

pub fn make_wave_pair(xi: [f64; 2], k: f64, b: f64) -> Result<WaveVectorPair> {
    let norm = xi[0].hypot(xi[1]);
    if norm == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("wavenumber must be positive (got {k})")));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("attenuation must be nonnegative (got {b})")));
    }
    let e1 = [xi[0] / norm, xi[1] / norm];
    let e2 = [-e1[1], e1[0]];
    let mu = principal_mu(norm, k, b);
    let half = [0.5 * xi[0], 0.5 * xi[1]];
    let zeta = [half[0] + mu * e2[0], half[1] + mu * e2[1]];
    let zeta_star = [half[0] - mu * e2[0], half[1] - mu * e2[1]];
    Ok(WaveVectorPair { xi, e1, e2, k, b, mu, zeta, zeta_star })
}

impl WaveVectorPair {
    pub fn kappa(&self) -> f64 {
        self.xi[0].hypot(self.xi[1])
    }

    /// True when the probes decay exponentially across the domain (`|xi| > 2k`).
    pub fn is_evanescent(&self) -> bool {
        self.kappa() > 2.0 * self.k
    }

    pub fn wave_vector(&self, which: Probe) -> [Complex64; 2] {
        match which {
            Probe::U0 => self.zeta,
            Probe::V => self.zeta_star,
        }
    }

    pub fn u0(&self, x: [f64; 2]) -> Complex64 {
        plane_wave(self.zeta, x)
    }

    pub fn v(&self, x: [f64; 2]) -> Complex64 {
        plane_wave(self.zeta_star, x)
    }
}

/// `exp(i zeta . x)` for a complex wave vector.
pub fn plane_wave(zeta: [Complex64; 2], x: [f64; 2]) -> Complex64 {
    (Complex64::i() * (zeta[0] * x[0] + zeta[1] * x[1])).exp()
}

/// Bilinear (non-conjugating) product `a . b`.
pub fn bilinear(a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn eval_probe(pair: &WaveVectorPair, which: Probe, points: &[[f64; 2]]) -> Vec<Complex64> {
    let zeta = pair.wave_vector(which);
    points.iter().map(|&x| plane_wave(zeta, x)).collect()
}

/// Exact outward normal derivative `i (zeta . nu) exp(i zeta . x)` of `u0`.
pub fn neumann_of_probe(pair: &WaveVectorPair, boundary: &Arc<BoundaryDiscretization>) -> BoundaryTrace {
    let values = boundary
        .points
        .iter()
        .zip(&boundary.normals)
        .map(|(&x, nu)| {
            let zn = pair.zeta[0] * nu[0] + pair.zeta[1] * nu[1];
            Complex64::i() * zn * plane_wave(pair.zeta, x)
        })
        .collect();
    BoundaryTrace::new(Arc::clone(boundary), values)
}

/// `Y = Im mu` of the attenuated pair.
///
/// Negative for `b > 0`. When `|xi|^2 > 4k^2` this is
/// `-(1/2) sqrt((|xi|^2/2 - 2k^2) + sqrt((|xi|^2/2 - 2k^2)^2 + 4k^2 b^2))`;
/// otherwise it is evaluated as `-k b / (2 X)` with `X = Re mu`.
pub fn attenuated_y(xi_norm: f64, k: f64, b: f64) -> f64 {
    principal_mu(xi_norm, k, b).im
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn branch_point_gives_real_half_xi() {
        let k = 3.0;
        let p = make_wave_pair([6.0, 0.0], k, 0.0).unwrap();
        assert_eq!(p.mu, Complex64::new(0.0, 0.0));
        assert_eq!(p.zeta, [Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(p.zeta, p.zeta_star);
    }

    #[test]
    fn propagating_and_evanescent_mu() {
        // sqrt(15.2^2 - 8.4^2/4) and sqrt(32.6^2/4 - 15.2^2)
        let expected_real = (231.04f64 - 17.64).sqrt();
        let expected_evanescent = (265.69f64 - 231.04).sqrt();
        let p = make_wave_pair([8.4, 0.0], 15.2, 0.0).unwrap();
        assert!((p.mu.re - expected_real).abs() < 1e-12);
        assert_eq!(p.mu.im, 0.0);
        assert!((p.mu.re - 14.6082).abs() < 1e-4);
        let q = make_wave_pair([0.0, 32.6], 15.2, 0.0).unwrap();
        assert_eq!(q.mu.re, 0.0);
        assert!((q.mu.im - expected_evanescent).abs() < 1e-12);
        assert!((q.mu.im - 5.8864).abs() < 1e-4);
    }

    #[test]
    fn zero_xi_rejected() {
        assert_eq!(make_wave_pair([0.0, 0.0], 1.0, 0.0), Err(Error::DegenerateDirection));
        assert!(matches!(make_wave_pair([1.0, 0.0], 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(make_wave_pair([1.0, 0.0], 1.0, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn probe_values() {
        let p = make_wave_pair([-1.0, 2.0], 4.0, 0.0).unwrap();
        assert_eq!(eval_probe(&p, Probe::U0, &[[0.0, 0.0]])[0], Complex64::new(1.0, 0.0));
        for x in [[0.3, -0.2], [0.6, 0.1], [-0.5, -0.5]] {
            assert!((p.u0(x).norm() - 1.0).abs() < 1e-14);
        }
        let q = make_wave_pair([32.6, 0.0], 15.2, 0.0).unwrap();
        let x = [0.5 * q.e2[0], 0.5 * q.e2[1]];
        let expected = (-(265.69f64 - 231.04).sqrt() * 0.5).exp();
        assert!((q.u0(x).norm() - expected).abs() < 1e-14);
        assert!((q.u0(x).norm() - 0.0527).abs() < 1e-4);
    }

    #[test]
    fn tangential_wave_has_zero_normal_derivative() {
        let boundary = Arc::new(BoundaryDiscretization::circle(0.7, 64).unwrap());
        // zeta real along +y; the normal at theta = 0 is +x.
        let p = make_wave_pair([0.0, 2.0], 1.0, 0.0).unwrap();
        assert!(p.zeta[0].norm() < 1e-15);
        let trace = neumann_of_probe(&p, &boundary);
        assert!(trace.values[0].norm() < 1e-14);
    }

    #[test]
    fn normal_derivative_matches_finite_difference() {
        let boundary = Arc::new(BoundaryDiscretization::circle(0.7, 32).unwrap());
        let step = 1e-6;
        for (xi, k, b) in [([8.4 * -0.17, 8.4 * 0.98], 15.2, 0.0), ([25.0, -21.0], 15.2, 0.0), ([3.0, 1.0], 5.0, 1.5)] {
            let p = make_wave_pair(xi, k, b).unwrap();
            let trace = neumann_of_probe(&p, &boundary);
            for (j, (x, nu)) in boundary.points.iter().zip(&boundary.normals).enumerate() {
                let fwd = p.u0([x[0] + step * nu[0], x[1] + step * nu[1]]);
                let bwd = p.u0([x[0] - step * nu[0], x[1] - step * nu[1]]);
                let fd = (fwd - bwd) / (2.0 * step);
                assert!(close(trace.values[j], fd, 1e-5), "{j}: {} vs {fd}", trace.values[j]);
            }
        }
        let p = make_wave_pair([8.4, 0.0], 15.2, 0.0).unwrap();
        let trace = neumann_of_probe(&p, &boundary);
        let expected = Complex64::i() * p.zeta[0] * p.u0([0.7, 0.0]);
        assert!(close(trace.values[0], expected, 1e-15));
    }

    #[test]
    fn attenuated_y_regimes() {
        assert!(attenuated_y(3.0, 2.0, 1e-12).abs() < 1e-11);
        for &(xi, k, b) in &[(1.0, 2.0, 0.5), (3.4, 2.0, 3.0), (10.0, 7.0, 0.01)] {
            assert!(xi * xi <= 3.0 * k * k);
            assert!(attenuated_y(xi, k, b).abs() <= b);
        }
        let (xi, k, b): (f64, f64, f64) = (9.0, 4.0, 0.7);
        let s = 0.5 * xi * xi - 2.0 * k * k;
        let closed = -0.5 * (s + (s * s + 4.0 * k * k * b * b).sqrt()).sqrt();
        let direct = Complex64::new(k * k - 0.25 * xi * xi, -k * b).sqrt().im;
        assert!((attenuated_y(xi, k, b) - closed).abs() < 1e-13 * closed.abs());
        assert!((closed - direct).abs() < 1e-13 * closed.abs());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn rel(a: Complex64, b: Complex64) -> f64 {
            (a - b).norm() / b.norm().max(1.0)
        }

        proptest! {
            #[test]
            fn pair_algebra(x in -60.0..60.0f64, y in -60.0..60.0f64, k in 0.1..40.0f64, b in 0.0..5.0f64) {
                prop_assume!(x.hypot(y) > 1e-6);
                let p = make_wave_pair([x, y], k, b).unwrap();
                let target = Complex64::new(k * k, -k * b);
                prop_assert!(rel(bilinear(p.zeta, p.zeta), target) < 1e-12);
                prop_assert!(rel(bilinear(p.zeta_star, p.zeta_star), target) < 1e-12);
                for i in 0..2 {
                    prop_assert!(rel(p.zeta[i] + p.zeta_star[i], Complex64::new([x, y][i], 0.0)) < 1e-12);
                }
                prop_assert!(p.mu.re >= 0.0);
                let pt = [0.3, -0.45];
                let product = p.u0(pt) * p.v(pt);
                let expected = Complex64::from_polar(1.0, x * pt[0] + y * pt[1]);
                prop_assert!((product - expected).norm() < 1e-9 * product.norm().max(1.0));
            }

            #[test]
            fn attenuation_stays_below_b_in_propagating_band(t in 0.0..1.0f64, k in 0.1..40.0f64, b in 1e-6..10.0f64) {
                let xi = t * 3f64.sqrt() * k;
                prop_assert!(attenuated_y(xi, k, b).abs() <= b);
            }
        }
    }
}
