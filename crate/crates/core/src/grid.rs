//! Node-centered uniform grids on intervals and squares with homogeneous
//! Neumann boundaries.
//!
//! Boundary nodes are part of the grid. The discrete Laplacian uses mirror
//! ghost nodes, which makes it self-adjoint with respect to the trapezoidal
//! quadrature weights and keeps constants in its nullspace.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

const HELMHOLTZ_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dimension: usize,
    points: usize,
    length: f64,
    spacing: f64,
}

/// Builds a grid with `points_per_axis` nodes over `[0, length]` on each axis.
pub fn make_grid(dimension: usize, points_per_axis: usize, length_per_axis: f64) -> Result<Grid> {
    Grid::new(dimension, points_per_axis, length_per_axis)
}

impl Grid {
    pub fn new(dimension: usize, points_per_axis: usize, length_per_axis: f64) -> Result<Self> {
        if !(dimension == 1 || dimension == 2) {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if points_per_axis < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points per axis, got {points_per_axis}"
            )));
        }
        if !(length_per_axis > 0.0 && length_per_axis.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive, got {length_per_axis}"
            )));
        }
        Ok(Grid {
            dimension,
            points: points_per_axis,
            length: length_per_axis,
            spacing: length_per_axis / (points_per_axis - 1) as f64,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// |Ω|.
    pub fn area(&self) -> f64 {
        self.length.powi(self.dimension as i32)
    }

    /// Coordinate of node `i` along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.length
        } else {
            i as f64 * self.spacing
        }
    }

    /// Coordinates of a flat node index; `y` is zero in 1D.
    pub fn node_position(&self, index: usize) -> (f64, f64) {
        if self.dimension == 1 {
            (self.coordinate(index), 0.0)
        } else {
            (
                self.coordinate(index % self.points),
                self.coordinate(index / self.points),
            )
        }
    }

    fn axis_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.points {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    /// Trapezoidal quadrature weights, one per node.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.points;
        match self.dimension {
            1 => (0..n).map(|i| self.axis_weight(i)).collect(),
            _ => (0..n * n)
                .map(|k| self.axis_weight(k % n) * self.axis_weight(k / n))
                .collect(),
        }
    }

    pub fn field_from_fn(&self, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        ScalarField::new(
            (0..self.len())
                .map(|k| {
                    let (x, y) = self.node_position(k);
                    f(x, y)
                })
                .collect(),
        )
    }

    pub fn constant(&self, value: f64) -> ScalarField {
        ScalarField::new(vec![value; self.len()])
    }

    pub fn zeros(&self) -> ScalarField {
        self.constant(0.0)
    }

    pub fn check(&self, field: &ScalarField) -> Result<()> {
        if field.len() != self.len() {
            return Err(Error::GridMismatch {
                expected: self.len(),
                found: field.len(),
            });
        }
        Ok(())
    }

    /// Applies `op` to every grid line along `axis` (stride 1 for x, `points` for y).
    fn for_each_line(&self, axis: usize, mut op: impl FnMut(&dyn Fn(usize) -> usize)) {
        let n = self.points;
        if self.dimension == 1 {
            op(&|i| i);
            return;
        }
        for line in 0..n {
            if axis == 0 {
                op(&move |i| line * n + i);
            } else {
                op(&move |i| i * n + line);
            }
        }
    }
}

/// Values of one scalar unknown at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        debug_assert_eq!(self.len(), other.len());
        ScalarField::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &ScalarField) -> ScalarField {
        self.zip_map(other, |a, b| a + scale * b)
    }

    pub fn scaled(&self, scale: f64) -> ScalarField {
        self.map(|v| scale * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for ScalarField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

/// Second-order Neumann Laplacian with mirror ghost nodes.
pub fn laplacian_apply(grid: &Grid, f: &ScalarField) -> Result<ScalarField> {
    grid.check(f)?;
    let n = grid.points;
    let inv_h2 = 1.0 / (grid.spacing * grid.spacing);
    let mut out = vec![0.0; f.len()];
    for axis in 0..grid.dimension {
        grid.for_each_line(axis, |idx| {
            let at = |i: usize| f.values[idx(i)];
            out[idx(0)] += 2.0 * (at(1) - at(0)) * inv_h2;
            for i in 1..n - 1 {
                out[idx(i)] += (at(i - 1) - 2.0 * at(i) + at(i + 1)) * inv_h2;
            }
            out[idx(n - 1)] += 2.0 * (at(n - 2) - at(n - 1)) * inv_h2;
        });
    }
    Ok(ScalarField::new(out))
}

/// Trapezoidal quadrature of `f * g` over the domain.
pub fn l2_inner(grid: &Grid, f: &ScalarField, g: &ScalarField) -> Result<f64> {
    grid.check(f)?;
    grid.check(g)?;
    Ok(weighted_dot(&grid.weights(), f.values(), g.values()))
}

pub fn l2_norm_sq(grid: &Grid, f: &ScalarField) -> Result<f64> {
    l2_inner(grid, f, f)
}

fn weighted_dot(weights: &[f64], f: &[f64], g: &[f64]) -> f64 {
    weights
        .iter()
        .zip(f.iter().zip(g))
        .map(|(w, (a, b))| w * a * b)
        .sum()
}

/// ‖∇f‖² by trapezoidal quadrature, centered differences inside and
/// one-sided differences on the boundary.
pub fn h1_seminorm_sq(grid: &Grid, f: &ScalarField) -> Result<f64> {
    grid.check(f)?;
    let n = grid.points;
    let h = grid.spacing;
    let mut grad_sq = vec![0.0; f.len()];
    for axis in 0..grid.dimension {
        grid.for_each_line(axis, |idx| {
            let at = |i: usize| f.values[idx(i)];
            for i in 0..n {
                let slope = if i == 0 {
                    (at(1) - at(0)) / h
                } else if i == n - 1 {
                    (at(n - 1) - at(n - 2)) / h
                } else {
                    (at(i + 1) - at(i - 1)) / (2.0 * h)
                };
                grad_sq[idx(i)] += slope * slope;
            }
        });
    }
    Ok(grid
        .weights()
        .iter()
        .zip(&grad_sq)
        .map(|(w, g)| w * g)
        .sum())
}

/// Solves a tridiagonal system in place of `rhs`. `lower[0]` and
/// `upper[n-1]` are ignored. The matrix must be diagonally dominant.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut c_prime = vec![0.0; n];
    let mut denom = diag[0];
    c_prime[0] = upper[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c_prime[i - 1];
        c_prime[i] = upper[i] / denom;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c_prime[i] * rhs[i + 1];
    }
}

/// `(I − γΔ_h) x`.
pub fn helmholtz_apply(grid: &Grid, gamma: f64, x: &ScalarField) -> Result<ScalarField> {
    let lap = laplacian_apply(grid, x)?;
    Ok(x.axpy(-gamma, &lap))
}

/// Solves `(I − γΔ_h) x = rhs`.
///
/// 1D uses the Thomas algorithm. 2D runs conjugate gradients in the
/// quadrature-weighted inner product, in which the operator is symmetric
/// positive definite, to a relative residual of 1e-10.
pub fn helmholtz_solve(grid: &Grid, gamma: f64, rhs: &ScalarField) -> Result<ScalarField> {
    grid.check(rhs)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "helmholtz coefficient must be non-negative, got {gamma}"
        )));
    }
    if gamma == 0.0 {
        return Ok(rhs.clone());
    }
    match grid.dimension {
        1 => Ok(thomas_helmholtz(grid, gamma, rhs)),
        _ => cg_helmholtz(grid, gamma, rhs),
    }
}

fn thomas_helmholtz(grid: &Grid, gamma: f64, rhs: &ScalarField) -> ScalarField {
    let n = grid.points;
    let s = gamma / (grid.spacing * grid.spacing);
    let diag = vec![1.0 + 2.0 * s; n];
    let mut lower = vec![-s; n];
    let mut upper = vec![-s; n];
    // mirror ghost rows
    upper[0] = -2.0 * s;
    lower[n - 1] = -2.0 * s;
    let mut x = rhs.values.clone();
    solve_tridiagonal(&lower, &diag, &upper, &mut x);
    ScalarField::new(x)
}

fn cg_helmholtz(grid: &Grid, gamma: f64, rhs: &ScalarField) -> Result<ScalarField> {
    let w = grid.weights();
    let b_norm = weighted_dot(&w, rhs.values(), rhs.values()).sqrt();
    if b_norm == 0.0 {
        return Ok(grid.zeros());
    }
    let max_iter = 10 * grid.len();

    let mut x = rhs.clone();
    let ax = helmholtz_apply(grid, gamma, &x)?;
    let mut r = rhs.zip_map(&ax, |b, a| b - a);
    let mut p = r.clone();
    let mut rr = weighted_dot(&w, r.values(), r.values());
    let mut iterations = 0;
    while rr.sqrt() > HELMHOLTZ_TOLERANCE * b_norm {
        if iterations == max_iter {
            return Err(Error::SolverDiverged {
                iterations,
                residual: rr.sqrt() / b_norm,
            });
        }
        let ap = helmholtz_apply(grid, gamma, &p)?;
        let alpha = rr / weighted_dot(&w, p.values(), ap.values());
        x = x.axpy(alpha, &p);
        r = r.axpy(-alpha, &ap);
        let rr_next = weighted_dot(&w, r.values(), r.values());
        p = r.axpy(rr_next / rr, &p);
        rr = rr_next;
        iterations += 1;
    }
    Ok(x)
}
