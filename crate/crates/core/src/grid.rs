//! Periodic sampled fields on tori.
//!
//! A [`TorusGrid`] samples each axis of `T^d` (period `2π`) at the angles
//! `−π + 2π·i/N`. A [`MatrixSymbol`] stores one `rows × cols` complex matrix per
//! grid point. Points are laid out row-major over the axes in declaration
//! order (the last axis varies fastest) and each matrix is stored row-major.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest number of samples accepted per axis.
pub const MIN_AXIS_SIZE: usize = 8;

/// Default ellipticity screening threshold on the smallest singular value.
pub const DEFAULT_SINGULAR_TOL: f64 = 1e-8;

const PAIRWISE_BLOCK: usize = 32;
const PARALLEL_SUM_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid dimension must be at least 1")]
    EmptyGrid,
    #[error("grid of dimension {dim} given {given} axis sizes")]
    DimMismatch { dim: usize, given: usize },
    #[error("axis {axis} has odd size {size}")]
    OddSize { axis: usize, size: usize },
    #[error("axis {axis} has size {size}, below the minimum of {MIN_AXIS_SIZE}")]
    TooCoarse { axis: usize, size: usize },
    #[error("sampled function changed shape at point {point}: expected {expected:?}, got {got:?}")]
    ShapeInconsistent {
        point: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("data length {got} does not match {expected} (points × entries)")]
    DataLength { expected: usize, got: usize },
    #[error("axis {axis} out of range for a grid of dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("symbol is not invertible at point {point:?}: smallest singular value {smallest_singular_value:e}")]
    NearSingular {
        point: Vec<usize>,
        smallest_singular_value: f64,
    },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
}

/// Sample layout of `T^d` with `2π`-periodic axes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    sizes: Vec<usize>,
}

/// Builds a grid, validating that every axis size is even and at least 8.
pub fn make_grid(dim: usize, sizes: &[usize]) -> Result<TorusGrid, GridError> {
    TorusGrid::new(dim, sizes)
}

impl TorusGrid {
    pub fn new(dim: usize, sizes: &[usize]) -> Result<Self, GridError> {
        if dim == 0 {
            return Err(GridError::EmptyGrid);
        }
        if sizes.len() != dim {
            return Err(GridError::DimMismatch {
                dim,
                given: sizes.len(),
            });
        }
        for (axis, &size) in sizes.iter().enumerate() {
            if size % 2 != 0 {
                return Err(GridError::OddSize { axis, size });
            }
            if size < MIN_AXIS_SIZE {
                return Err(GridError::TooCoarse { axis, size });
            }
        }
        Ok(Self {
            sizes: sizes.to_vec(),
        })
    }

    /// Same size on every axis.
    pub fn cube(dim: usize, size: usize) -> Result<Self, GridError> {
        Self::new(dim, &vec![size; dim])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total number of sample points.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angle of sample `i` on `axis`.
    pub fn angle(&self, axis: usize, i: usize) -> f64 {
        -PI + 2.0 * PI * i as f64 / self.sizes[axis] as f64
    }

    /// Step between consecutive point indices along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.sizes[axis + 1..].iter().product()
    }

    pub fn multi_index(&self, mut point: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = point % self.sizes[axis];
            point /= self.sizes[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn angles(&self, point: usize) -> Vec<f64> {
        self.multi_index(point)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.angle(axis, i))
            .collect()
    }

    /// Quadrature weight of one cell, `Π (2π/N_a)`.
    pub fn cell_volume(&self) -> f64 {
        self.sizes
            .iter()
            .map(|&n| 2.0 * PI / n as f64)
            .product()
    }
}

/// Differentiation scheme for [`derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffScheme {
    /// Fourier differentiation with the Nyquist mode zeroed.
    Spectral,
    /// Fourth-order centered periodic stencil.
    Central4,
}

impl std::str::FromStr for DiffScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "central4" => Ok(Self::Central4),
            other => Err(format!("unknown derivative scheme `{other}`")),
        }
    }
}

/// Matrix-valued field sampled on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSymbol {
    grid: TorusGrid,
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Mul,
    Add,
    Sub,
}

impl MatrixSymbol {
    pub fn from_data(
        grid: TorusGrid,
        rows: usize,
        cols: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, GridError> {
        let expected = grid.len() * rows * cols;
        if data.len() != expected {
            return Err(GridError::DataLength {
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            grid,
            rows,
            cols,
            data,
        })
    }

    /// The same matrix at every point; `m` is row-major `rows × cols`.
    pub fn constant(grid: &TorusGrid, rows: usize, cols: usize, m: &[Complex64]) -> Self {
        assert_eq!(m.len(), rows * cols, "constant matrix has wrong length");
        let mut data = Vec::with_capacity(grid.len() * m.len());
        for _ in 0..grid.len() {
            data.extend_from_slice(m);
        }
        Self {
            grid: grid.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn identity(grid: &TorusGrid, k: usize) -> Self {
        Self::constant(grid, k, k, &identity_flat(k))
    }

    pub fn zeros(grid: &TorusGrid, rows: usize, cols: usize) -> Self {
        Self {
            grid: grid.clone(),
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); grid.len() * rows * cols],
        }
    }

    /// Scalar (1×1) field from per-point values.
    pub fn scalar(grid: &TorusGrid, values: Vec<Complex64>) -> Result<Self, GridError> {
        Self::from_data(grid.clone(), 1, 1, values)
    }

    /// Builds a field point by point from a closure returning the row-major
    /// matrix entries. The closure sees the point index and its angles.
    pub fn from_fn<F>(grid: &TorusGrid, rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, &[f64]) -> Vec<Complex64> + Sync,
    {
        let k = rows * cols;
        let mut data = vec![Complex64::new(0.0, 0.0); grid.len() * k];
        data.par_chunks_mut(k).enumerate().for_each(|(p, out)| {
            let vals = f(p, &grid.angles(p));
            assert_eq!(vals.len(), k, "closure returned {} entries, expected {k}", vals.len());
            out.copy_from_slice(&vals);
        });
        Self {
            grid: grid.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Row-major matrix entries at `point`.
    pub fn at(&self, point: usize) -> &[Complex64] {
        let k = self.rows * self.cols;
        &self.data[point * k..(point + 1) * k]
    }

    pub fn entry(&self, point: usize, r: usize, c: usize) -> Complex64 {
        self.at(point)[r * self.cols + c]
    }

    pub fn matrix_at(&self, point: usize) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, self.at(point))
    }

    /// Applies `f` to every point's matrix, producing a field of shape `rows × cols`.
    pub fn map_points<F>(&self, rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(&[Complex64], &mut [Complex64]) + Sync,
    {
        let kin = self.rows * self.cols;
        let kout = rows * cols;
        let mut data = vec![Complex64::new(0.0, 0.0); self.grid.len() * kout];
        data.par_chunks_mut(kout)
            .zip(self.data.par_chunks(kin))
            .for_each(|(out, m)| f(m, out));
        Self {
            grid: self.grid.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Pointwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        self.map_points(c, r, |m, out| {
            for i in 0..r {
                for j in 0..c {
                    out[j * r + i] = m[i * c + j].conj();
                }
            }
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.par_iter().map(|v| v * z).collect(),
        }
    }

    /// Adds `z·I` pointwise (square symbols only).
    pub fn shift_identity(&self, z: Complex64) -> Self {
        assert!(self.is_square(), "shift_identity needs a square symbol");
        let n = self.rows;
        self.map_points(n, n, |m, out| {
            out.copy_from_slice(m);
            for i in 0..n {
                out[i * n + i] += z;
            }
        })
    }

    /// Scalar field of a single matrix entry.
    pub fn entry_field(&self, r: usize, c: usize) -> Self {
        let cols = self.cols;
        self.map_points(1, 1, |m, out| out[0] = m[r * cols + c])
    }

    /// Block-diagonal direct sum of square symbols on the same grid.
    pub fn block_diag(blocks: &[&MatrixSymbol]) -> Result<Self, GridError> {
        let first = blocks.first().expect("block_diag needs at least one block");
        for b in blocks {
            if b.grid != first.grid {
                return Err(GridError::GridMismatch);
            }
            if !b.is_square() {
                return Err(GridError::ShapeMismatch {
                    op: "block_diag",
                    left: first.shape(),
                    right: b.shape(),
                });
            }
        }
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let grid = first.grid.clone();
        Ok(Self::from_fn(&grid, n, n, |p, _| {
            let mut out = vec![Complex64::new(0.0, 0.0); n * n];
            let mut off = 0;
            for b in blocks {
                let k = b.rows;
                let m = b.at(p);
                for i in 0..k {
                    for j in 0..k {
                        out[(off + i) * n + off + j] = m[i * k + j];
                    }
                }
                off += k;
            }
            out
        }))
    }

    /// Largest pointwise Frobenius norm of `σσ* − I`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        self.data
            .par_chunks(n * n)
            .map(|m| {
                let mut prod = vec![Complex64::new(0.0, 0.0); n * n];
                mul_adjoint_right(m, m, n, &mut prod);
                for i in 0..n {
                    prod[i * n + i] -= 1.0;
                }
                frobenius(&prod)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Largest pointwise Frobenius norm of `σ − σ*`.
    pub fn self_adjoint_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        self.data
            .par_chunks(n * n)
            .map(|m| {
                let mut acc = 0.0f64;
                for i in 0..n {
                    for j in 0..n {
                        acc += (m[i * n + j] - m[j * n + i].conj()).norm_sqr();
                    }
                }
                acc.sqrt()
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Largest pointwise Frobenius norm of `σ² − σ`.
    pub fn idempotency_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        self.data
            .par_chunks(n * n)
            .map(|m| {
                let mut sq = vec![Complex64::new(0.0, 0.0); n * n];
                matmul(m, m, n, n, n, &mut sq);
                for (s, v) in sq.iter_mut().zip(m) {
                    *s -= v;
                }
                frobenius(&sq)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Maximum of the idempotency and self-adjointness defects.
    pub fn projection_defect(&self) -> f64 {
        self.idempotency_defect().max(self.self_adjoint_defect())
    }
}

pub(crate) fn identity_flat(k: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); k * k];
    for i in 0..k {
        m[i * k + i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub(crate) fn frobenius(m: &[Complex64]) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `out = a·b` for row-major `a: n×k`, `b: k×m`.
pub(crate) fn matmul(
    a: &[Complex64],
    b: &[Complex64],
    n: usize,
    k: usize,
    m: usize,
    out: &mut [Complex64],
) {
    for i in 0..n {
        for j in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..k {
                acc += a[i * k + l] * b[l * m + j];
            }
            out[i * m + j] = acc;
        }
    }
}

/// `out = a·b*` for square `n×n` inputs.
fn mul_adjoint_right(a: &[Complex64], b: &[Complex64], n: usize, out: &mut [Complex64]) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                acc += a[i * n + l] * b[j * n + l].conj();
            }
            out[i * n + j] = acc;
        }
    }
}

/// Samples a matrix-valued function of the grid angles.
pub fn sample<F>(f: F, grid: &TorusGrid) -> Result<MatrixSymbol, GridError>
where
    F: Fn(&[f64]) -> DMatrix<Complex64> + Sync,
{
    let mats: Vec<DMatrix<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|p| f(&grid.angles(p)))
        .collect();
    let expected = mats[0].shape();
    let mut data = Vec::with_capacity(grid.len() * expected.0 * expected.1);
    for (point, m) in mats.iter().enumerate() {
        if m.shape() != expected {
            return Err(GridError::ShapeInconsistent {
                point,
                expected,
                got: m.shape(),
            });
        }
        for r in 0..expected.0 {
            for c in 0..expected.1 {
                data.push(m[(r, c)]);
            }
        }
    }
    MatrixSymbol::from_data(grid.clone(), expected.0, expected.1, data)
}

/// Entrywise partial derivative along `axis`.
pub fn derivative(
    s: &MatrixSymbol,
    axis: usize,
    scheme: DiffScheme,
) -> Result<MatrixSymbol, GridError> {
    let grid = &s.grid;
    if axis >= grid.dim() {
        return Err(GridError::AxisOutOfRange {
            axis,
            dim: grid.dim(),
        });
    }
    let n = grid.sizes[axis];
    let stride = grid.stride(axis);
    let outer = grid.len() / (n * stride);
    let k = s.rows * s.cols;
    let lines = outer * stride * k;

    let line_pos = |line: usize, i: usize| -> usize {
        let e = line % k;
        let rest = line / k;
        let inner = rest % stride;
        let o = rest / stride;
        ((o * n + i) * stride + inner) * k + e
    };

    let transform: Box<dyn Fn(&mut Vec<Complex64>) + Sync> = match scheme {
        DiffScheme::Spectral => {
            let mut planner = FftPlanner::new();
            let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(n);
            let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(n);
            let mult: Vec<Complex64> = (0..n)
                .map(|m| {
                    let freq = if m < n / 2 {
                        m as f64
                    } else if m == n / 2 {
                        0.0
                    } else {
                        m as f64 - n as f64
                    };
                    Complex64::new(0.0, freq / n as f64)
                })
                .collect();
            Box::new(move |buf: &mut Vec<Complex64>| {
                fwd.process(buf);
                for (v, w) in buf.iter_mut().zip(&mult) {
                    *v *= w;
                }
                inv.process(buf);
            })
        }
        DiffScheme::Central4 => {
            let h = 2.0 * PI / n as f64;
            Box::new(move |buf: &mut Vec<Complex64>| {
                let f = buf.clone();
                for i in 0..n {
                    let at = |d: isize| f[(i as isize + d).rem_euclid(n as isize) as usize];
                    buf[i] = (-at(2) + at(1) * 8.0 - at(-1) * 8.0 + at(-2)) / (12.0 * h);
                }
            })
        }
    };

    let results: Vec<Vec<Complex64>> = (0..lines)
        .into_par_iter()
        .map(|line| {
            let mut buf: Vec<Complex64> = (0..n).map(|i| s.data[line_pos(line, i)]).collect();
            transform(&mut buf);
            buf
        })
        .collect();

    let mut data = vec![Complex64::new(0.0, 0.0); s.data.len()];
    for (line, buf) in results.iter().enumerate() {
        for (i, v) in buf.iter().enumerate() {
            data[line_pos(line, i)] = *v;
        }
    }
    MatrixSymbol::from_data(grid.clone(), s.rows, s.cols, data)
}

/// Sum with a fixed pairwise reduction tree; the result does not depend on
/// the number of worker threads.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    if xs.len() >= PARALLEL_SUM_THRESHOLD {
        let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Periodic Riemann sum of a scalar field over the torus.
pub fn integrate(s: &MatrixSymbol) -> Result<Complex64, GridError> {
    if s.shape() != (1, 1) {
        return Err(GridError::ShapeMismatch {
            op: "integrate",
            left: s.shape(),
            right: (1, 1),
        });
    }
    Ok(pairwise_sum(&s.data) * s.grid.cell_volume())
}

/// Entrywise integral of a matrix field, row-major.
pub fn integrate_entries(s: &MatrixSymbol) -> Vec<Complex64> {
    let k = s.rows * s.cols;
    let vol = s.grid.cell_volume();
    (0..k)
        .map(|e| {
            let column: Vec<Complex64> = s.data.iter().skip(e).step_by(k).copied().collect();
            pairwise_sum(&column) * vol
        })
        .collect()
}

/// Smallest singular value of a square row-major matrix.
pub fn smallest_singular_value(m: &[Complex64], n: usize) -> f64 {
    let mat = DMatrix::from_row_slice(n, n, m);
    mat.singular_values().min()
}

/// Minimum over all points of the smallest singular value, and the point where it is attained.
pub fn min_singular_value(s: &MatrixSymbol) -> (f64, usize) {
    assert!(s.is_square(), "singular value scan needs a square symbol");
    let n = s.rows;
    s.data
        .par_chunks(n * n)
        .enumerate()
        .map(|(p, m)| (smallest_singular_value(m, n), p))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        )
}

/// Pointwise inverse through a partially pivoted LU solve, refusing points
/// whose smallest singular value is at or below `singular_tol`.
pub fn pointwise_inverse(s: &MatrixSymbol, singular_tol: f64) -> Result<MatrixSymbol, GridError> {
    if !s.is_square() {
        return Err(GridError::ShapeMismatch {
            op: "pointwise_inverse",
            left: s.shape(),
            right: (s.cols, s.rows),
        });
    }
    let (margin, at) = min_singular_value(s);
    if !(margin > singular_tol) {
        return Err(GridError::NearSingular {
            point: s.grid.multi_index(at),
            smallest_singular_value: margin,
        });
    }
    let n = s.rows;
    let out = s.map_points(n, n, |m, out| {
        let inv = DMatrix::from_row_slice(n, n, m)
            .lu()
            .try_inverse()
            .expect("matrix with positive singular values is invertible");
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = inv[(i, j)];
            }
        }
    });
    Ok(out)
}

/// Pointwise product, sum or difference.
pub fn pointwise_binary(
    a: &MatrixSymbol,
    b: &MatrixSymbol,
    op: BinaryOp,
) -> Result<MatrixSymbol, GridError> {
    if a.grid != b.grid {
        return Err(GridError::GridMismatch);
    }
    match op {
        BinaryOp::Mul => {
            if a.cols != b.rows {
                return Err(GridError::ShapeMismatch {
                    op: "mul",
                    left: a.shape(),
                    right: b.shape(),
                });
            }
            let (n, k, m) = (a.rows, a.cols, b.cols);
            let mut data = vec![Complex64::new(0.0, 0.0); a.grid.len() * n * m];
            data.par_chunks_mut(n * m)
                .zip(a.data.par_chunks(n * k).zip(b.data.par_chunks(k * m)))
                .for_each(|(out, (x, y))| matmul(x, y, n, k, m, out));
            MatrixSymbol::from_data(a.grid.clone(), n, m, data)
        }
        BinaryOp::Add | BinaryOp::Sub => {
            if a.shape() != b.shape() {
                return Err(GridError::ShapeMismatch {
                    op: if op == BinaryOp::Add { "add" } else { "sub" },
                    left: a.shape(),
                    right: b.shape(),
                });
            }
            let data = a
                .data
                .par_iter()
                .zip(&b.data)
                .map(|(x, y)| if op == BinaryOp::Add { x + y } else { x - y })
                .collect();
            MatrixSymbol::from_data(a.grid.clone(), a.rows, a.cols, data)
        }
    }
}

/// Pointwise trace as a scalar field.
pub fn trace(s: &MatrixSymbol) -> Result<MatrixSymbol, GridError> {
    if !s.is_square() {
        return Err(GridError::ShapeMismatch {
            op: "trace",
            left: s.shape(),
            right: (s.cols, s.rows),
        });
    }
    let n = s.rows;
    Ok(s.map_points(1, 1, |m, out| {
        out[0] = (0..n).map(|i| m[i * n + i]).sum();
    }))
}

/// Largest pointwise Frobenius norm of `a − b`.
pub fn sup_distance(a: &MatrixSymbol, b: &MatrixSymbol) -> Result<f64, GridError> {
    if a.grid != b.grid {
        return Err(GridError::GridMismatch);
    }
    if a.shape() != b.shape() {
        return Err(GridError::ShapeMismatch {
            op: "sup_distance",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let k = a.rows * a.cols;
    Ok(a.data
        .par_chunks(k)
        .zip(b.data.par_chunks(k))
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(u, v)| (u - v).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .reduce(|| 0.0, f64::max))
}
