//! Cartesian lattice with an embedded disk and its boundary discretization.
//!
//! Nodes sit at `x_i = -half_width + i h` on both axes. A node is interior when
//! it lies strictly inside the circle of radius `radius`. For every interior
//! node and each of the four axis directions we record either the neighbouring
//! unknown or the fraction `theta in (0, 1]` of the grid spacing at which the
//! axis segment crosses the circle. The latter drives Shortley–Weller
//! differencing near the curved boundary.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Axis directions in stencil order.
pub const DIRECTIONS: [[f64; 2]; 4] = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];

/// Index of the direction opposite to `d` in [`DIRECTIONS`].
pub const fn opposite(d: usize) -> usize {
    d ^ 1
}

/// What lies along one stencil arm of an interior node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbour {
    /// Another interior unknown, one full spacing away.
    Node(usize),
    /// The circle, crossed at `fraction * h` from the node.
    Boundary(f64),
}

impl Neighbour {
    pub fn fraction(&self) -> f64 {
        match *self {
            Neighbour::Node(_) => 1.0,
            Neighbour::Boundary(t) => t,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    n_per_side: usize,
    half_width: f64,
    radius: f64,
    h: f64,
    /// Unknown index per lattice node (row-major in `j`, then `i`), `usize::MAX` outside.
    unknown_of_node: Vec<usize>,
    /// Lattice coordinates `(i, j)` per unknown.
    nodes: Vec<(usize, usize)>,
    /// Stencil arms per unknown, ordered as [`DIRECTIONS`].
    arms: Vec<[Neighbour; 4]>,
}

const OUTSIDE: usize = usize::MAX;

/// Builds the lattice on `[-half_width, half_width]^2` with an embedded disk.
pub fn build_grid(n_per_side: usize, half_width: f64, radius: f64) -> Result<Grid> {
    if n_per_side < 16 {
        return Err(Error::Config(format!("n_per_side must be at least 16 (got {n_per_side})")));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::Domain(format!("half_width must be positive (got {half_width})")));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive (got {radius})")));
    }
    if radius >= half_width {
        return Err(Error::Domain(format!("radius {radius} must be smaller than half_width {half_width}")));
    }

    let n = n_per_side;
    let h = 2.0 * half_width / (n - 1) as f64;
    let coord = |i: usize| -half_width + i as f64 * h;
    let r2 = radius * radius;

    let mut unknown_of_node = vec![OUTSIDE; n * n];
    let mut nodes = Vec::new();
    for j in 0..n {
        let y = coord(j);
        for i in 0..n {
            let x = coord(i);
            if x * x + y * y < r2 {
                unknown_of_node[j * n + i] = nodes.len();
                nodes.push((i, j));
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::Config("the disk contains no lattice nodes; refine the grid or enlarge the radius".into()));
    }

    let arms = nodes
        .iter()
        .map(|&(i, j)| {
            let p = [coord(i), coord(j)];
            let mut out = [Neighbour::Boundary(1.0); 4];
            for (d, dir) in DIRECTIONS.iter().enumerate() {
                let (ni, nj) = (i as isize + dir[0] as isize, j as isize + dir[1] as isize);
                let inside_lattice = ni >= 0 && nj >= 0 && (ni as usize) < n && (nj as usize) < n;
                let neighbour = if inside_lattice { unknown_of_node[nj as usize * n + ni as usize] } else { OUTSIDE };
                out[d] = if neighbour != OUTSIDE {
                    Neighbour::Node(neighbour)
                } else {
                    Neighbour::Boundary(crossing_fraction(p, *dir, radius, h))
                };
            }
            out
        })
        .collect();

    Ok(Grid { n_per_side, half_width, radius, h, unknown_of_node, nodes, arms })
}

/// Fraction of `h` travelled from `p` along the unit axis `dir` before hitting the circle.
fn crossing_fraction(p: [f64; 2], dir: [f64; 2], radius: f64, h: f64) -> f64 {
    let pd = p[0] * dir[0] + p[1] * dir[1];
    let pp = p[0] * p[0] + p[1] * p[1];
    let t = -pd + (pd * pd - pp + radius * radius).sqrt();
    (t / h).clamp(f64::MIN_POSITIVE, 1.0)
}

impl Grid {
    pub fn n_per_side(&self) -> usize {
        self.n_per_side
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Lattice spacing.
    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Number of interior nodes (= unknowns).
    pub fn interior_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_count(&self) -> usize {
        self.n_per_side * self.n_per_side
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    /// Position of lattice node `(i, j)`.
    pub fn node_position(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coordinate(i), self.coordinate(j)]
    }

    /// Position of the interior unknown `p`.
    pub fn position(&self, p: usize) -> [f64; 2] {
        let (i, j) = self.nodes[p];
        self.node_position(i, j)
    }

    pub fn lattice_index(&self, p: usize) -> (usize, usize) {
        self.nodes[p]
    }

    /// Unknown index of lattice node `(i, j)`, if it is interior.
    pub fn unknown(&self, i: usize, j: usize) -> Option<usize> {
        match self.unknown_of_node[j * self.n_per_side + i] {
            OUTSIDE => None,
            p => Some(p),
        }
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        self.unknown(i, j).is_some()
    }

    /// Interior mask over all lattice nodes, row-major in `j`.
    pub fn interior_mask(&self) -> Vec<bool> {
        self.unknown_of_node.iter().map(|&u| u != OUTSIDE).collect()
    }

    pub fn arms(&self, p: usize) -> &[Neighbour; 4] {
        &self.arms[p]
    }

    /// Interior nodes with at least one arm cut by the circle, with their arms.
    pub fn cut_cells(&self) -> impl Iterator<Item = (usize, &[Neighbour; 4])> + '_ {
        self.arms.iter().enumerate().filter(|(_, a)| a.iter().any(|n| matches!(n, Neighbour::Boundary(_))))
    }

    /// Largest index distance between an unknown and its interior neighbours.
    pub fn bandwidth(&self) -> usize {
        self.arms
            .iter()
            .enumerate()
            .flat_map(|(p, a)| {
                a.iter().filter_map(move |n| match n {
                    Neighbour::Node(q) => Some(p.abs_diff(*q)),
                    Neighbour::Boundary(_) => None,
                })
            })
            .max()
            .unwrap_or(0)
    }

    /// Structural identity used to check that two fields live on the same lattice.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self.n_per_side == other.n_per_side && self.half_width == other.half_width && self.radius == other.radius
    }
}

/// Equiangular samples of the circle with exact normals and trapezoid weights.
#[derive(Debug, Clone)]
pub struct BoundaryDiscretization {
    radius: f64,
    pub angles: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

pub fn boundary_nodes(grid: &Grid, n_boundary: usize) -> Result<BoundaryDiscretization> {
    BoundaryDiscretization::circle(grid.radius(), n_boundary)
}

impl BoundaryDiscretization {
    pub fn circle(radius: f64, n_boundary: usize) -> Result<Self> {
        if n_boundary < 8 {
            return Err(Error::Config(format!("n_boundary must be at least 8 (got {n_boundary})")));
        }
        let w = 2.0 * PI * radius / n_boundary as f64;
        let angles: Vec<f64> = (0..n_boundary).map(|j| 2.0 * PI * j as f64 / n_boundary as f64).collect();
        let normals: Vec<[f64; 2]> = angles.iter().map(|t| [t.cos(), t.sin()]).collect();
        let points = normals.iter().map(|n| [radius * n[0], radius * n[1]]).collect();
        Ok(Self { radius, angles, points, normals, weights: vec![w; n_boundary] })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Trapezoid rule on the circle.
    pub fn integrate<T>(&self, values: &[T]) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        values.iter().zip(&self.weights).map(|(&v, &w)| v * w).sum()
    }

    /// Boundary L² norm of complex samples.
    pub fn l2_norm(&self, values: &[num_complex::Complex64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(n: usize, a: f64, r: f64) -> usize {
        let h = 2.0 * a / (n - 1) as f64;
        let mut count = 0;
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (-a + i as f64 * h, -a + j as f64 * h);
                if x * x + y * y < r * r {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn spacing_for_hundred_nodes() {
        let g = build_grid(100, 1.0, 0.7).unwrap();
        assert!((g.spacing() - 2.0 / 99.0).abs() < 1e-15);
        assert!((g.spacing() - 0.0202).abs() < 1e-4);
    }

    #[test]
    fn interior_count_matches_enumeration() {
        let g = build_grid(100, 1.0, 0.7).unwrap();
        assert_eq!(g.interior_count(), brute_force_count(100, 1.0, 0.7));
        let g = build_grid(37, 1.0, 0.55).unwrap();
        assert_eq!(g.interior_count(), brute_force_count(37, 1.0, 0.55));
    }

    #[test]
    fn rejects_invalid_domains() {
        assert!(matches!(build_grid(16, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(build_grid(16, 1.0, 1.2), Err(Error::Domain(_))));
        assert!(build_grid(16, 1.0, 0.999).is_ok());
        assert!(matches!(build_grid(15, 1.0, 0.5), Err(Error::Config(_))));
        // Radius below the half-spacing around the origin with an even node count.
        assert!(matches!(build_grid(16, 1.0, 0.01), Err(Error::Config(_))));
    }

    #[test]
    fn interior_nodes_strictly_inside_and_fractions_valid() {
        let g = build_grid(64, 1.0, 0.7).unwrap();
        for p in 0..g.interior_count() {
            let x = g.position(p);
            assert!(x[0].hypot(x[1]) < 0.7);
            for (d, arm) in g.arms(p).iter().enumerate() {
                let t = arm.fraction();
                assert!(t > 0.0 && t <= 1.0);
                if let Neighbour::Boundary(t) = arm {
                    let dir = DIRECTIONS[d];
                    let q = [x[0] + t * g.spacing() * dir[0], x[1] + t * g.spacing() * dir[1]];
                    assert!((q[0].hypot(q[1]) - 0.7).abs() < 1e-12);
                }
            }
        }
        assert!(g.cut_cells().count() > 0);
    }

    #[test]
    fn refinement_scales_interior_count_by_four() {
        for &n in &[50usize, 100] {
            let coarse = build_grid(n, 1.0, 0.7).unwrap().interior_count() as f64;
            let fine = build_grid(2 * n, 1.0, 0.7).unwrap().interior_count() as f64;
            let ratio = fine / coarse;
            assert!((3.8..=4.2).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn boundary_weights_and_normals() {
        let b = BoundaryDiscretization::circle(0.7, 256).unwrap();
        let total: f64 = b.weights.iter().sum();
        assert!((total - 2.0 * PI * 0.7).abs() <= 1e-12 * 2.0 * PI * 0.7);
        assert!((total - 4.39823).abs() < 1e-5);
        for n in &b.normals {
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-14);
        }
        assert_eq!(b.points[0], [0.7, 0.0]);
        assert_eq!(b.normals[0], [1.0, 0.0]);
        let g = build_grid(32, 1.0, 0.7).unwrap();
        assert!(matches!(boundary_nodes(&g, 7), Err(Error::Config(_))));
    }

    #[test]
    fn trapezoid_is_spectral_on_the_circle() {
        let b = BoundaryDiscretization::circle(0.7, 256).unwrap();
        let ones = vec![1.0; b.len()];
        assert!((b.integrate(&ones) - 2.0 * PI * 0.7).abs() < 1e-12);
        let x1: Vec<f64> = b.points.iter().map(|p| p[0]).collect();
        assert!(b.integrate(&x1).abs() < 1e-12);
        for m in 1..=8 {
            let f: Vec<f64> = b.angles.iter().map(|t| (m as f64 * t).cos()).collect();
            assert!(b.integrate(&f).abs() < 1e-10, "m = {m}");
        }
    }
}
