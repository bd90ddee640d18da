//! Finite-difference Schrödinger/Helmholtz solver on the embedded disk.
//!
//! Discretizes `-Δu - (k² - c) u + i k b u = f` with the five-point Laplacian and
//! Shortley–Weller arms where an axis segment leaves the disk. Along an axis with
//! arm lengths `h₊ = θ₊h` and `h₋ = θ₋h` the second difference is
//!
//! ```text
//! u'' ≈ 2/(h₊ + h₋) · [ (u₊ - u₀)/h₊ - (u₀ - u₋)/h₋ ]
//! ```
//!
//! and arms ending on the circle take their value from the Dirichlet data there.
//! Unknowns are ordered row by row, which gives a band matrix factored once per
//! `(k, b, c)` and reused for every right-hand side.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::banded::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryDiscretization, Grid, Neighbour, DIRECTIONS};
use crate::measurement::BoundaryTrace;
use crate::waves::{plane_wave, WaveVectorPair};

/// Relative residual every solve must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Default threshold on `|λ_min(A)| / k²` below which a solve is flagged as near a
/// Dirichlet eigenvalue.
pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-2;

/// Treatment of the `k²` term in the discrete operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `-Δ_h - k²`.
    Standard,
    /// `-Δ_h - k_h²` with `k_h² = (4/h²)(1 - J0(kh))`, the five-point symbol of a
    /// wave of wavenumber `k` averaged over propagation angles. Still second
    /// order, with a much smaller phase error constant.
    #[default]
    DispersionCorrected,
}

/// `1 - J0(x)` from its power series (no cancellation for small `x`).
fn one_minus_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    for m in 1..60 {
        term *= -q / (m * m) as f64;
        sum -= term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Effective `k²` used on the diagonal for the given scheme and spacing.
pub fn discrete_k2(k: f64, h: f64, scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Standard => k * k,
        Scheme::DispersionCorrected => 4.0 / (h * h) * one_minus_j0(k * h),
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real potential sampled on every lattice node; zero outside the disk.
#[derive(Debug, Clone)]
pub struct PotentialField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    /// A priori H¹ bound carried along as metadata.
    pub m1: Option<f64>,
}

impl PotentialField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { grid: Arc::clone(grid), values: vec![0.0; grid.node_count()], m1: None }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let n = grid.n_per_side();
        let mut values = vec![0.0; grid.node_count()];
        for j in 0..n {
            for i in 0..n {
                if grid.is_interior(i, j) {
                    values[j * n + i] = f(grid.node_position(i, j));
                }
            }
        }
        Self { grid: Arc::clone(grid), values, m1: None }
    }

    /// Wraps node values; entries outside the disk are forced to zero.
    pub fn from_values(grid: &Arc<Grid>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Config(format!(
                "potential has {} values for {} lattice nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("potential value at node {bad} is not finite")));
        }
        for (v, inside) in values.iter_mut().zip(grid.interior_mask()) {
            if !inside {
                *v = 0.0;
            }
        }
        Ok(Self { grid: Arc::clone(grid), values, m1: None })
    }

    pub fn with_m1(mut self, m1: f64) -> Self {
        self.m1 = Some(m1);
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.n_per_side() + i]
    }

    pub fn at_unknown(&self, p: usize) -> f64 {
        let (i, j) = self.grid.lattice_index(p);
        self.at(i, j)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Enforces `‖c‖∞ ≤ c_max`, the regime in which linearization is meaningful.
    pub fn check_bound(&self, c_max: f64) -> Result<()> {
        let m = self.max_abs();
        if m > c_max {
            return Err(Error::Config(format!("‖c‖∞ = {m} exceeds the configured bound {c_max}")));
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * s).collect(),
            m1: self.m1.map(|m| m * s.abs()),
        }
    }

    /// Midpoint volume quadrature of `∫ c(x) exp(i ξ·x) dx` over the interior nodes.
    pub fn fourier(&self, xi: [f64; 2]) -> Complex64 {
        let h2 = self.grid.spacing().powi(2);
        let mut acc = ZERO;
        for p in 0..self.grid.interior_count() {
            let c = self.at_unknown(p);
            if c != 0.0 {
                let x = self.grid.position(p);
                acc += Complex64::from_polar(c, xi[0] * x[0] + xi[1] * x[1]);
            }
        }
        acc * h2
    }
}

/// Dirichlet data on the circle.
#[derive(Clone)]
pub enum Dirichlet {
    Zero,
    /// `exp(i ζ·x)` for a complex wave vector.
    Plane([Complex64; 2]),
    Function(Arc<dyn Fn([f64; 2]) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for Dirichlet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dirichlet::Zero => write!(f, "Zero"),
            Dirichlet::Plane(z) => write!(f, "Plane({:?})", z),
            Dirichlet::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl Dirichlet {
    pub fn probe(pair: &WaveVectorPair) -> Self {
        Dirichlet::Plane(pair.zeta)
    }

    pub fn function(f: impl Fn([f64; 2]) -> Complex64 + Send + Sync + 'static) -> Self {
        Dirichlet::Function(Arc::new(f))
    }

    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        match self {
            Dirichlet::Zero => ZERO,
            Dirichlet::Plane(z) => plane_wave(*z, x),
            Dirichlet::Function(f) => f(x),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Dirichlet::Zero)
    }
}

/// A condition worth reporting that did not stop the solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverWarning {
    /// `k²` sits close to a Dirichlet eigenvalue of the discrete operator, or the
    /// residual check failed.
    NearEigenvalue { k: f64, relative_gap: f64, residual: f64 },
}

impl fmt::Display for SolverWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverWarning::NearEigenvalue { k, relative_gap, residual } => {
                write!(f, "near-eigenvalue: k = {k}, |λ_min|/k² ≈ {relative_gap:.3e}, residual = {residual:.3e}")
            }
        }
    }
}

/// Complex solution values on the interior unknowns plus the Dirichlet data they satisfy.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Arc<Grid>,
    pub values: Vec<Complex64>,
    pub dirichlet: Dirichlet,
    pub warnings: Vec<SolverWarning>,
}

impl ComplexField {
    pub fn from_values(grid: &Arc<Grid>, values: Vec<Complex64>, dirichlet: Dirichlet) -> Result<Self> {
        if values.len() != grid.interior_count() {
            return Err(Error::Config(format!(
                "field has {} values for {} interior nodes",
                values.len(),
                grid.interior_count()
            )));
        }
        Ok(Self { grid: Arc::clone(grid), values, dirichlet, warnings: Vec::new() })
    }

    /// Samples `f` at the interior nodes; the same function supplies the boundary values.
    pub fn sample(grid: &Arc<Grid>, f: impl Fn([f64; 2]) -> Complex64 + Send + Sync + 'static) -> Self {
        let values = (0..grid.interior_count()).map(|p| f(grid.position(p))).collect();
        Self { grid: Arc::clone(grid), values, dirichlet: Dirichlet::function(f), warnings: Vec::new() }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// `self - other`, with matching Dirichlet data cancelling to zero.
    pub fn difference(&self, other: &ComplexField) -> Result<ComplexField> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::Config("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        let dirichlet = match (&self.dirichlet, &other.dirichlet) {
            (Dirichlet::Plane(a), Dirichlet::Plane(b)) if a == b => Dirichlet::Zero,
            (a, Dirichlet::Zero) => a.clone(),
            (a, b) => {
                let (a, b) = (a.clone(), b.clone());
                Dirichlet::function(move |x| a.eval(x) - b.eval(x))
            }
        };
        let mut warnings = self.warnings.clone();
        warnings.extend(other.warnings.iter().cloned());
        Ok(ComplexField { grid: Arc::clone(&self.grid), values, dirichlet, warnings })
    }

    /// Discrete L² norm over the interior nodes.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * h * h).sqrt()
    }

    /// Relative discrete L² distance to `exact` over the interior nodes.
    pub fn relative_l2_error(&self, exact: impl Fn([f64; 2]) -> Complex64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (p, v) in self.values.iter().enumerate() {
            let e = exact(self.grid.position(p));
            num += (v - e).norm_sqr();
            den += e.norm_sqr();
        }
        (num / den).sqrt()
    }

    /// Value at an arbitrary point by bilinear interpolation of interior nodes.
    pub fn interpolate(&self, x: [f64; 2]) -> Result<Complex64> {
        let g = &self.grid;
        let h = g.spacing();
        let a = g.half_width();
        let fx = (x[0] + a) / h;
        let fy = (x[1] + a) / h;
        let (i0, j0) = (fx.floor(), fy.floor());
        let n = g.n_per_side();
        if i0 < 0.0 || j0 < 0.0 || i0 as usize + 1 >= n || j0 as usize + 1 >= n {
            return Err(Error::Geometry(format!("point {x:?} lies outside the lattice")));
        }
        let (i0, j0) = (i0 as usize, j0 as usize);
        let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
        let corner = |i: usize, j: usize| -> Result<Complex64> {
            g.unknown(i, j).map(|p| self.values[p]).ok_or_else(|| {
                Error::Geometry(format!(
                    "interpolation stencil at {x:?} leaves the interior (node ({i}, {j})); grid too coarse for the radius"
                ))
            })
        };
        let v00 = corner(i0, j0)?;
        let v10 = corner(i0 + 1, j0)?;
        let v01 = corner(i0, j0 + 1)?;
        let v11 = corner(i0 + 1, j0 + 1)?;
        Ok(v00 * ((1.0 - tx) * (1.0 - ty)) + v10 * (tx * (1.0 - ty)) + v01 * ((1.0 - tx) * ty) + v11 * (tx * ty))
    }
}

/// Sparse operator `-Δ_h - k² + c + i k b` with Shortley–Weller closure.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    grid: Arc<Grid>,
    k: f64,
    b: f64,
    scheme: Scheme,
    background: bool,
    diag: Vec<Complex64>,
    /// Arm coefficients `2 / (h_d (h_d + h_opp))`, ordered as [`DIRECTIONS`].
    arm: Vec<[f64; 4]>,
}

/// Assembles with the [`Scheme::Standard`] diagonal.
pub fn assemble(grid: &Arc<Grid>, c: &PotentialField, k: f64, b: f64) -> Result<AssembledSystem> {
    assemble_with(grid, c, k, b, Scheme::Standard)
}

pub fn assemble_with(grid: &Arc<Grid>, c: &PotentialField, k: f64, b: f64, scheme: Scheme) -> Result<AssembledSystem> {
    if !c.grid().same_layout(grid) {
        return Err(Error::Config("potential and grid differ".into()));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("wavenumber must be positive (got {k})")));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("attenuation must be nonnegative (got {b})")));
    }
    let h = grid.spacing();
    let k2 = discrete_k2(k, h, scheme);
    let n = grid.interior_count();
    let mut diag = Vec::with_capacity(n);
    let mut arm = Vec::with_capacity(n);
    for p in 0..n {
        let arms = grid.arms(p);
        let len: [f64; 4] = std::array::from_fn(|d| arms[d].fraction() * h);
        let coef: [f64; 4] = std::array::from_fn(|d| 2.0 / (len[d] * (len[d] + len[d ^ 1])));
        let lap: f64 = coef.iter().sum();
        diag.push(Complex64::new(lap - k2 + c.at_unknown(p), k * b));
        arm.push(coef);
    }
    Ok(AssembledSystem { grid: Arc::clone(grid), k, b, scheme, background: c.is_zero(), diag, arm })
}

impl AssembledSystem {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self, p: usize) -> Complex64 {
        self.diag[p]
    }

    /// Off-diagonal entry coupling `p` to `q`, zero when they are not stencil neighbours.
    pub fn entry(&self, p: usize, q: usize) -> Complex64 {
        if p == q {
            return self.diag[p];
        }
        for (d, nb) in self.grid.arms(p).iter().enumerate() {
            if *nb == Neighbour::Node(q) {
                return Complex64::new(-self.arm[p][d], 0.0);
            }
        }
        ZERO
    }

    /// `A u` on the interior unknowns (boundary contributions excluded).
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|p| {
                let mut acc = self.diag[p] * u[p];
                for (d, nb) in self.grid.arms(p).iter().enumerate() {
                    if let Neighbour::Node(q) = nb {
                        acc -= u[*q] * self.arm[p][d];
                    }
                }
                acc
            })
            .collect()
    }

    /// Right-hand side: volume source plus boundary arms carrying Dirichlet values.
    pub fn rhs(&self, dirichlet: &Dirichlet, source: Option<&[Complex64]>) -> Vec<Complex64> {
        let h = self.grid.spacing();
        let mut f = match source {
            Some(s) => s.to_vec(),
            None => vec![ZERO; self.dim()],
        };
        if dirichlet.is_zero() {
            return f;
        }
        for (p, fp) in f.iter_mut().enumerate() {
            let x = self.grid.position(p);
            for (d, nb) in self.grid.arms(p).iter().enumerate() {
                if let Neighbour::Boundary(t) = nb {
                    let dir = DIRECTIONS[d];
                    let xb = [x[0] + t * h * dir[0], x[1] + t * h * dir[1]];
                    *fp += dirichlet.eval(xb) * self.arm[p][d];
                }
            }
        }
        f
    }

    fn band(&self) -> BandMatrix {
        let bw = self.grid.bandwidth();
        let mut m = BandMatrix::zeros(self.dim(), bw, bw);
        for p in 0..self.dim() {
            m.add(p, p, self.diag[p]);
            for (d, nb) in self.grid.arms(p).iter().enumerate() {
                if let Neighbour::Node(q) = nb {
                    m.add(p, *q, Complex64::new(-self.arm[p][d], 0.0));
                }
            }
        }
        m
    }

    /// Factors the operator and estimates its distance to singularity.
    pub fn factorize(&self) -> Result<Factorization> {
        self.factorize_with(DEFAULT_GAP_TOLERANCE)
    }

    pub fn factorize_with(&self, gap_tolerance: f64) -> Result<Factorization> {
        let lu = self
            .band()
            .factor()
            .map_err(|col| Error::Solver(format!("exactly singular pivot at unknown {col} (k = {})", self.k)))?;
        let mut fact = Factorization { system: self.clone(), lu, relative_gap: f64::INFINITY, gap_tolerance };
        fact.relative_gap = fact.estimate_min_eigenvalue() / (self.k * self.k);
        Ok(fact)
    }
}

/// Band LU of an [`AssembledSystem`]; immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Factorization {
    system: AssembledSystem,
    lu: BandLu,
    relative_gap: f64,
    gap_tolerance: f64,
}

impl Factorization {
    pub fn system(&self) -> &AssembledSystem {
        &self.system
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.system.grid
    }

    /// Estimated `|λ_min(A)| / k²`.
    pub fn relative_gap(&self) -> f64 {
        self.relative_gap
    }

    pub fn near_eigenvalue(&self) -> bool {
        self.relative_gap < self.gap_tolerance
    }

    /// Inverse iteration for the smallest eigenvalue modulus of the operator.
    fn estimate_min_eigenvalue(&self) -> f64 {
        let n = self.system.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut x: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nx = norm(&x);
        x.iter_mut().for_each(|z| *z /= nx);
        let mut estimate = f64::INFINITY;
        for _ in 0..16 {
            self.lu.solve_in_place(&mut x);
            let ny = norm(&x);
            if !(ny > 0.0) || !ny.is_finite() {
                return 0.0;
            }
            estimate = 1.0 / ny;
            x.iter_mut().for_each(|z| *z /= ny);
        }
        estimate
    }

    /// Solves `A u = source` with Dirichlet data `dirichlet`.
    pub fn solve(&self, dirichlet: &Dirichlet, source: Option<&[Complex64]>) -> Result<ComplexField> {
        let f = self.system.rhs(dirichlet, source);
        let fnorm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut u = f.clone();
        self.lu.solve_in_place(&mut u);
        let mut residual = 0.0;
        if fnorm > 0.0 {
            residual = self.residual(&u, &f) / fnorm;
            if residual > RESIDUAL_TOLERANCE {
                // One step of iterative refinement.
                let au = self.system.apply(&u);
                let mut r: Vec<Complex64> = f.iter().zip(&au).map(|(a, b)| a - b).collect();
                self.lu.solve_in_place(&mut r);
                u.iter_mut().zip(&r).for_each(|(a, b)| *a += b);
                residual = self.residual(&u, &f) / fnorm;
            }
        }
        if u.iter().any(|z| !z.is_finite()) {
            return Err(Error::Solver(format!("non-finite solution at k = {}", self.system.k)));
        }
        let mut warnings = Vec::new();
        if residual > RESIDUAL_TOLERANCE || self.near_eigenvalue() {
            warnings.push(SolverWarning::NearEigenvalue {
                k: self.system.k,
                relative_gap: self.relative_gap,
                residual,
            });
        }
        Ok(ComplexField { grid: Arc::clone(&self.system.grid), values: u, dirichlet: dirichlet.clone(), warnings })
    }

    fn residual(&self, u: &[Complex64], f: &[Complex64]) -> f64 {
        let au = self.system.apply(u);
        au.iter().zip(f).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn solve_dirichlet(&self, g0: &Dirichlet) -> Result<ComplexField> {
        self.solve(g0, None)
    }

    /// `u1` with `(-Δ - k² + i k b) u1 = -c u0` and `u1 = 0` on the circle.
    ///
    /// Requires the factorization of the background (zero-potential) operator.
    pub fn solve_linearized(&self, c: &PotentialField, pair: &WaveVectorPair) -> Result<ComplexField> {
        if !self.system.background {
            return Err(Error::Config("linearized solves need the zero-potential operator".into()));
        }
        check_pair(&self.system, pair)?;
        let grid = &self.system.grid;
        let source: Vec<Complex64> = (0..grid.interior_count())
            .map(|p| {
                let c = c.at_unknown(p);
                if c == 0.0 {
                    ZERO
                } else {
                    -pair.u0(grid.position(p)) * c
                }
            })
            .collect();
        self.solve(&Dirichlet::Zero, Some(&source))
    }
}

pub(crate) fn check_pair(system: &AssembledSystem, pair: &WaveVectorPair) -> Result<()> {
    if pair.k != system.k || pair.b != system.b {
        return Err(Error::Config(format!(
            "probe built for (k, b) = ({}, {}) but the operator uses ({}, {})",
            pair.k, pair.b, system.k, system.b
        )));
    }
    Ok(())
}

/// Factors `system` and solves the Dirichlet problem with data `g0`.
pub fn solve_dirichlet(system: &AssembledSystem, g0: &Dirichlet) -> Result<ComplexField> {
    system.factorize()?.solve_dirichlet(g0)
}

/// Assembles and factors the background operator, then solves for `u1`.
pub fn solve_linearized(grid: &Arc<Grid>, c: &PotentialField, pair: &WaveVectorPair) -> Result<ComplexField> {
    let system = assemble_with(grid, &PotentialField::zeros(grid), pair.k, pair.b, Scheme::default())?;
    system.factorize()?.solve_linearized(c, pair)
}

/// Radial sampling used by [`neumann_trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStencil {
    /// Distance between radial samples in units of the grid spacing.
    pub step: f64,
}

impl Default for TraceStencil {
    /// 1.5 h keeps every bilinear cell strictly inside the disk (needs > √2 h).
    fn default() -> Self {
        Self { step: 1.5 }
    }
}

/// Outward normal derivative from the boundary value and two interior samples.
///
/// With `f₀` on the circle and `f₁, f₂` at inward distances `δ, 2δ`,
/// `∂ν u ≈ (3 f₀ - 4 f₁ + f₂) / (2δ)`.
pub fn neumann_trace(
    field: &ComplexField,
    boundary: &Arc<BoundaryDiscretization>,
    stencil: TraceStencil,
) -> Result<BoundaryTrace> {
    let grid = field.grid();
    if (boundary.radius() - grid.radius()).abs() > 1e-12 * grid.radius() {
        return Err(Error::Geometry(format!(
            "boundary radius {} differs from the grid radius {}",
            boundary.radius(),
            grid.radius()
        )));
    }
    if !(stencil.step > 0.0) {
        return Err(Error::Config(format!("trace step must be positive (got {})", stencil.step)));
    }
    let delta = stencil.step * grid.spacing();
    let values = boundary
        .points
        .iter()
        .zip(&boundary.normals)
        .map(|(&x, nu)| {
            let f0 = field.dirichlet.eval(x);
            let f1 = field.interpolate([x[0] - delta * nu[0], x[1] - delta * nu[1]])?;
            let f2 = field.interpolate([x[0] - 2.0 * delta * nu[0], x[1] - 2.0 * delta * nu[1]])?;
            Ok((f0 * 3.0 - f1 * 4.0 + f2) / (2.0 * delta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryTrace::new(Arc::clone(boundary), values))
}
