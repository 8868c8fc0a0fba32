//! Projections, unitaries and loops built from sampled symbols.
//!
//! All constructors work pointwise and only combine the input with its
//! adjoint, so for a unitary input every block below is a function of one
//! normal matrix and the usual scalar identities carry over.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{identity_flat, matmul, GridError, MatrixSymbol, TorusGrid};

/// Tolerance used when validating unitary, projection and circle inputs.
pub const INPUT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("input is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("input is not a projection (defect {defect:e})")]
    NotProjection { defect: f64 },
    #[error("input is not self-adjoint (defect {defect:e})")]
    NotSelfAdjoint { defect: f64 },
    #[error("{what} violates its invariant (defect {defect:e})")]
    InvariantViolated { what: &'static str, defect: f64 },
}

/// A square symbol known to be pointwise unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(MatrixSymbol);

impl Unitary {
    pub fn new(s: MatrixSymbol) -> Result<Self, SymbolError> {
        let defect = s.unitarity_defect();
        if !(defect < INPUT_TOL) {
            return Err(SymbolError::NotUnitary { defect });
        }
        Ok(Self(s))
    }

    /// Scalar unitary `e^{i·phase(θ)}`.
    pub fn from_phase<F>(grid: &TorusGrid, phase: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        Self(MatrixSymbol::from_fn(grid, 1, 1, |_, t| {
            vec![Complex64::from_polar(1.0, phase(t))]
        }))
    }

    pub fn symbol(&self) -> &MatrixSymbol {
        &self.0
    }

    pub fn into_symbol(self) -> MatrixSymbol {
        self.0
    }
}

/// Scalar unitary `exp(i·Σ_m a_m cos(m·θ + φ_m))` from real Fourier data
/// `(m, a_m, φ_m)`; smooth and periodic for any finite mode list.
pub fn smooth_phase_unitary(grid: &TorusGrid, modes: &[(Vec<i32>, f64, f64)]) -> Unitary {
    Unitary::from_phase(grid, |t| {
        modes
            .iter()
            .map(|(m, a, phi)| {
                let arg: f64 = m.iter().zip(t).map(|(k, x)| *k as f64 * x).sum();
                a * (arg + phi).cos()
            })
            .sum()
    })
}

/// Real fields `(b, c)` with `b² + c² = 1` pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePair {
    grid: TorusGrid,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl CirclePair {
    pub fn new(grid: &TorusGrid, b: Vec<f64>, c: Vec<f64>) -> Result<Self, SymbolError> {
        if b.len() != grid.len() || c.len() != grid.len() {
            return Err(GridError::DataLength {
                expected: grid.len(),
                got: b.len().min(c.len()),
            }
            .into());
        }
        let defect = b
            .iter()
            .zip(&c)
            .map(|(x, y)| (x * x + y * y - 1.0).abs())
            .fold(0.0, f64::max);
        if !(defect < INPUT_TOL) {
            return Err(SymbolError::InvariantViolated {
                what: "circle pair",
                defect,
            });
        }
        Ok(Self {
            grid: grid.clone(),
            b,
            c,
        })
    }

    /// `(cos φ, sin φ)` for an angle field `φ`.
    pub fn from_angle<F>(grid: &TorusGrid, angle: F) -> Self
    where
        F: Fn(&[f64]) -> f64,
    {
        let (b, c) = (0..grid.len())
            .map(|p| {
                let a = angle(&grid.angles(p));
                (a.cos(), a.sin())
            })
            .unzip();
        Self {
            grid: grid.clone(),
            b,
            c,
        }
    }

    /// The point `z₁ + iz₂` of the unit circle at every sample.
    pub fn constant(grid: &TorusGrid, z: Complex64) -> Result<Self, SymbolError> {
        Self::new(grid, vec![z.re; grid.len()], vec![z.im; grid.len()])
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// The 2×2 block matrix `[[p, q], [r, s]]` of `k×k` blocks, row-major.
fn blocks(
    k: usize,
    p: &[Complex64],
    q: &[Complex64],
    r: &[Complex64],
    s: &[Complex64],
) -> Vec<Complex64> {
    let n = 2 * k;
    let mut out = vec![zero(); n * n];
    for i in 0..k {
        for j in 0..k {
            out[i * n + j] = p[i * k + j];
            out[i * n + k + j] = q[i * k + j];
            out[(k + i) * n + j] = r[i * k + j];
            out[(k + i) * n + k + j] = s[i * k + j];
        }
    }
    out
}

fn adjoint_flat(m: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut out = vec![zero(); k * k];
    for i in 0..k {
        for j in 0..k {
            out[j * k + i] = m[i * k + j].conj();
        }
    }
    out
}

fn mul_flat(a: &[Complex64], b: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut out = vec![zero(); k * k];
    matmul(a, b, k, k, k, &mut out);
    out
}

/// `Σ coeffs[i]·terms[i]` over equally sized flat matrices.
fn lin_comb(terms: &[(&[Complex64], Complex64)]) -> Vec<Complex64> {
    let mut out = vec![zero(); terms[0].0.len()];
    for (m, w) in terms {
        for (o, v) in out.iter_mut().zip(m.iter()) {
            *o += v * w;
        }
    }
    out
}

/// Bott projection of a unitary `a` and a circle pair `(b, c)`:
///
/// ```text
/// [ 1 − (2−a−a*)(1−b)/8                   (a²−1)/2·√((1−b)/8) − (a−1)²c/8 ]
/// [ (a*²−1)/2·√((1−b)/8) − (a*−1)²c/8     (2−a−a*)(1−b)/8                 ]
/// ```
pub fn bott_projection(a: &Unitary, bc: &CirclePair) -> Result<MatrixSymbol, SymbolError> {
    let s = a.symbol();
    if s.grid() != bc.grid() {
        return Err(GridError::GridMismatch.into());
    }
    let k = s.rows();
    let id = identity_flat(k);
    Ok(MatrixSymbol::from_fn(s.grid(), 2 * k, 2 * k, |p, _| {
        let a = s.at(p);
        let a_star = adjoint_flat(a, k);
        let b = bc.b[p];
        let c = bc.c[p];
        let w = (1.0 - b) / 8.0;
        let root = if w < 0.0 && w > -1e-14 { 0.0 } else { w.sqrt() };
        // 2 − a − a*
        let two_minus = lin_comb(&[(&id, Complex64::new(2.0, 0.0)), (a, -one()), (&a_star, -one())]);
        let a_minus = lin_comb(&[(a, one()), (&id, -one())]);
        let as_minus = lin_comb(&[(&a_star, one()), (&id, -one())]);
        let a_sq = mul_flat(a, a, k);
        let as_sq = mul_flat(&a_star, &a_star, k);
        let a_minus_sq = mul_flat(&a_minus, &a_minus, k);
        let as_minus_sq = mul_flat(&as_minus, &as_minus, k);
        let top_left = lin_comb(&[(&id, one()), (&two_minus, Complex64::new(-w, 0.0))]);
        let top_right = lin_comb(&[
            (&a_sq, Complex64::new(root / 2.0, 0.0)),
            (&id, Complex64::new(-root / 2.0, 0.0)),
            (&a_minus_sq, Complex64::new(-c / 8.0, 0.0)),
        ]);
        let bottom_left = lin_comb(&[
            (&as_sq, Complex64::new(root / 2.0, 0.0)),
            (&id, Complex64::new(-root / 2.0, 0.0)),
            (&as_minus_sq, Complex64::new(-c / 8.0, 0.0)),
        ]);
        let bottom_right = lin_comb(&[(&two_minus, Complex64::new(w, 0.0))]);
        blocks(k, &top_left, &top_right, &bottom_left, &bottom_right)
    }))
}

/// Loop of unitaries `z·p + (I − p)`.
pub fn bott_loop(p: &MatrixSymbol, z: Complex64) -> Result<MatrixSymbol, SymbolError> {
    let defect = p.projection_defect();
    if !(defect < INPUT_TOL) {
        return Err(SymbolError::NotProjection { defect });
    }
    let modulus_defect = (z.norm() - 1.0).abs();
    if !(modulus_defect < INPUT_TOL) {
        return Err(SymbolError::InvariantViolated {
            what: "loop parameter on the unit circle",
            defect: modulus_defect,
        });
    }
    Ok(p.scale(z - 1.0).shift_identity(one()))
}

/// Closed form of the projection path `q_t`, `t ∈ [0, 1]`, obtained by
/// conjugating `diag(I, 0)` with `w_t = diag(u, 1)·u_t·diag(u*, 1)·u_t*`, where
/// `u_t` is the rotation by `πt/2`. With `c = cos(πt/2)`, `s = sin(πt/2)`:
///
/// ```text
/// q_t = [ 1 − (2−u−u*)c²s²        cs(c² + s²u)(u − 1)  ]
///       [ cs(c² + s²u*)(u* − 1)   (2−u−u*)c²s²         ]
/// ```
pub fn theta_path(u: &Unitary, t: f64) -> MatrixSymbol {
    let s_sym = u.symbol();
    let k = s_sym.rows();
    let id = identity_flat(k);
    let (s, c) = (PI * t / 2.0).sin_cos();
    let cs = c * s;
    let c2s2 = cs * cs;
    s_sym.map_points(2 * k, 2 * k, |u, out| {
        let u_star = adjoint_flat(u, k);
        let two_minus = lin_comb(&[(&id, Complex64::new(2.0, 0.0)), (u, -one()), (&u_star, -one())]);
        let top_left = lin_comb(&[(&id, one()), (&two_minus, Complex64::new(-c2s2, 0.0))]);
        let bottom_right = lin_comb(&[(&two_minus, Complex64::new(c2s2, 0.0))]);
        let left = lin_comb(&[(&id, Complex64::new(c * c, 0.0)), (u, Complex64::new(s * s, 0.0))]);
        let right = lin_comb(&[(u, one()), (&id, -one())]);
        let top_right = mul_flat(&left, &right, k)
            .into_iter()
            .map(|v| v * cs)
            .collect::<Vec<_>>();
        let bottom_left = adjoint_flat(&top_right, k);
        out.copy_from_slice(&blocks(k, &top_left, &top_right, &bottom_left, &bottom_right));
    })
}

/// The path written on the circle: `bott_projection(u, (z₁, z₂))` with the
/// constant circle point `z = z₁ + iz₂`. Agrees with [`theta_path`] at `z = e^{2πit}`.
pub fn theta_circle_form(u: &Unitary, z: Complex64) -> Result<MatrixSymbol, SymbolError> {
    let bc = CirclePair::constant(u.symbol().grid(), z)?;
    bott_projection(u, &bc)
}

/// Projection attached to an almost-inverse pair `(a, b)`:
///
/// ```text
/// [ 2ab − (ab)²     a(2 − ba)(1 − ba) ]
/// [ (1 − ba)b       (1 − ba)²         ]
/// ```
pub fn index_projection(a: &MatrixSymbol, b: &MatrixSymbol) -> Result<MatrixSymbol, SymbolError> {
    if a.grid() != b.grid() {
        return Err(GridError::GridMismatch.into());
    }
    if !a.is_square() || a.shape() != b.shape() {
        return Err(GridError::ShapeMismatch {
            op: "index_projection",
            left: a.shape(),
            right: b.shape(),
        }
        .into());
    }
    let k = a.rows();
    let id = identity_flat(k);
    Ok(MatrixSymbol::from_fn(a.grid(), 2 * k, 2 * k, |p, _| {
        let (x, y) = (a.at(p), b.at(p));
        let ab = mul_flat(x, y, k);
        let ba = mul_flat(y, x, k);
        let abab = mul_flat(&ab, &ab, k);
        let one_minus_ba = lin_comb(&[(&id, one()), (&ba, -one())]);
        let two_minus_ba = lin_comb(&[(&id, Complex64::new(2.0, 0.0)), (&ba, -one())]);
        let top_left = lin_comb(&[(&ab, Complex64::new(2.0, 0.0)), (&abab, -one())]);
        let top_right = mul_flat(&mul_flat(x, &two_minus_ba, k), &one_minus_ba, k);
        let bottom_left = mul_flat(&one_minus_ba, y, k);
        let bottom_right = mul_flat(&one_minus_ba, &one_minus_ba, k);
        blocks(k, &top_left, &top_right, &bottom_left, &bottom_right)
    }))
}

/// Pointwise `exp(2πi·p)` of a self-adjoint symbol via its eigendecomposition.
pub fn unitary_exponential(p: &MatrixSymbol) -> Result<MatrixSymbol, SymbolError> {
    let defect = p.self_adjoint_defect();
    if !(defect < INPUT_TOL) {
        return Err(SymbolError::NotSelfAdjoint { defect });
    }
    let n = p.rows();
    Ok(p.map_points(n, n, |m, out| {
        let mat = DMatrix::from_row_slice(n, n, m);
        // Symmetrize so the eigensolver sees an exactly Hermitian input.
        let herm = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| {
            Complex64::from_polar(1.0, 2.0 * PI * l)
        }));
        let v = eig.eigenvectors;
        let e = &v * phases * v.adjoint();
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = e[(i, j)];
            }
        }
    }))
}

/// Rank-one projection field `Q(e^{iα}, cos β, sin β)` on the first two axes
/// of `grid`.
pub fn bott_projection_alpha_beta(grid: &TorusGrid) -> MatrixSymbol {
    let a = Unitary::from_phase(grid, |t| t[0]);
    let bc = CirclePair::from_angle(grid, |t| t[1]);
    bott_projection(&a, &bc).expect("inputs satisfy their invariants by construction")
}

/// `σ_T(α, β, λ) = I + f(λ)·Q(e^{iα}, cos β, sin β)` with
/// `f(λ) = −cos λ + i sin λ − 1`, on a three-dimensional grid.
pub fn sigma_t(grid: &TorusGrid) -> Result<MatrixSymbol, SymbolError> {
    if grid.dim() != 3 {
        return Err(GridError::DimMismatch {
            dim: 3,
            given: grid.dim(),
        }
        .into());
    }
    let q = bott_projection_alpha_beta(grid);
    Ok(MatrixSymbol::from_fn(grid, 2, 2, |p, angles| {
        let lambda = angles[2];
        let mut out = vec![zero(); 4];
        let f = Complex64::new(-lambda.cos() - 1.0, lambda.sin());
        let m = q.at(p);
        for i in 0..2 {
            for j in 0..2 {
                out[i * 2 + j] = f * m[i * 2 + j] + if i == j { one() } else { zero() };
            }
        }
        out
    }))
}

/// `m`-fold block-diagonal sum of `σ_T`.
pub fn sigma_t_blocks(grid: &TorusGrid, m: usize) -> Result<MatrixSymbol, SymbolError> {
    let s = sigma_t(grid)?;
    let blocks: Vec<&MatrixSymbol> = std::iter::repeat(&s).take(m.max(1)).collect();
    Ok(MatrixSymbol::block_diag(&blocks)?)
}

/// The functions `B′₄ = (1+τ²+j²)^{−1/2}`, `B′₅ = −τB′₄`, `B′₆ = −jB′₄` at one point.
pub fn b456(tau: f64, j: f64) -> [f64; 3] {
    let b4 = 1.0 / (1.0 + tau * tau + j * j).sqrt();
    [b4, -tau * b4, -j * b4]
}

/// `B′₄, B′₅, B′₆` tabulated on `τ ∈ [−r, r]` (uniform, `tau_steps` intervals)
/// times the integers `j ∈ [−r, r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct B456Table {
    pub taus: Vec<f64>,
    pub js: Vec<i64>,
    /// Row-major over `(τ, j)`.
    pub values: Vec<[f64; 3]>,
}

impl B456Table {
    pub fn new(radius: i64, tau_steps: usize) -> Self {
        let r = radius as f64;
        let taus: Vec<f64> = (0..=tau_steps)
            .map(|i| -r + 2.0 * r * i as f64 / tau_steps as f64)
            .collect();
        let js: Vec<i64> = (-radius..=radius).collect();
        let values = taus
            .iter()
            .flat_map(|&t| js.iter().map(move |&j| b456(t, j as f64)))
            .collect();
        Self { taus, js, values }
    }

    /// `sup |B′₄² + B′₅² + B′₆² − 1|` over the table.
    pub fn sum_of_squares_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|[a, b, c]| (a * a + b * b + c * c - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sup_distance};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_10(grid: &TorusGrid, k: usize) -> MatrixSymbol {
        let mut m = vec![zero(); 4 * k * k];
        for i in 0..k {
            m[i * 2 * k + i] = one();
        }
        MatrixSymbol::constant(grid, 2 * k, 2 * k, &m)
    }

    #[test]
    fn bott_projection_trivial_inputs() {
        let g = make_grid(2, &[16, 16]).unwrap();
        let one_u = Unitary::new(MatrixSymbol::identity(&g, 1)).unwrap();
        let bc = CirclePair::from_angle(&g, |t| t[1] * 3.0);
        let q = bott_projection(&one_u, &bc).unwrap();
        assert!(sup_distance(&q, &diag_10(&g, 1)).unwrap() < 1e-15);

        let a = Unitary::from_phase(&g, |t| t[0] + 2.0 * t[1]);
        let q = bott_projection(&a, &CirclePair::constant(&g, one()).unwrap()).unwrap();
        assert!(sup_distance(&q, &diag_10(&g, 1)).unwrap() < 1e-15);
    }

    #[test]
    fn bott_projection_of_phase_and_circle() {
        let g = make_grid(2, &[32, 32]).unwrap();
        let q = bott_projection_alpha_beta(&g);
        assert!(q.idempotency_defect() < 1e-12);
        assert!(q.self_adjoint_defect() < 1e-12);
        let tr = crate::grid::trace(&q).unwrap();
        assert!(tr.data().iter().all(|z| (z - one()).norm() < 1e-14));
    }

    #[test]
    fn bott_projection_rejects_bad_inputs() {
        let g = make_grid(1, &[8]).unwrap();
        let not_unitary = MatrixSymbol::constant(&g, 1, 1, &[c(2.0, 0.0)]);
        assert!(matches!(
            Unitary::new(not_unitary),
            Err(SymbolError::NotUnitary { .. })
        ));
        assert!(matches!(
            CirclePair::new(&g, vec![0.5; 8], vec![0.5; 8]),
            Err(SymbolError::InvariantViolated { .. })
        ));
    }

    #[test]
    fn bott_loop_examples() {
        let g = make_grid(1, &[8]).unwrap();
        let p = diag_10(&g, 1);
        let f = bott_loop(&p, c(-1.0, 0.0)).unwrap();
        let want = MatrixSymbol::constant(&g, 2, 2, &[c(-1.0, 0.0), zero(), zero(), one()]);
        assert!(sup_distance(&f, &want).unwrap() < 1e-15);
        let zero_p = MatrixSymbol::zeros(&g, 2, 2);
        let f = bott_loop(&zero_p, c(0.6, 0.8)).unwrap();
        assert!(sup_distance(&f, &MatrixSymbol::identity(&g, 2)).unwrap() < 1e-15);
        assert!(matches!(
            bott_loop(&MatrixSymbol::identity(&g, 2).scale(c(2.0, 0.0)), one()),
            Err(SymbolError::NotProjection { .. })
        ));
    }

    #[test]
    fn bott_loop_over_the_circle_is_unitary() {
        let g = make_grid(2, &[16, 16]).unwrap();
        let q = bott_projection_alpha_beta(&g);
        for i in 0..64 {
            let z = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / 64.0);
            assert!(bott_loop(&q, z).unwrap().unitarity_defect() < 1e-11);
        }
        let at_one = bott_loop(&q, one()).unwrap();
        assert!(sup_distance(&at_one, &MatrixSymbol::identity(&g, 2)).unwrap() < 1e-15);
    }

    /// Direct product `w_t diag(I,0) w_t*` used as an independent reference.
    fn theta_by_rotation(u: &Unitary, t: f64) -> MatrixSymbol {
        let s = u.symbol();
        let k = s.rows();
        let (sn, cs) = (PI * t / 2.0).sin_cos();
        let grid = s.grid().clone();
        MatrixSymbol::from_fn(&grid, 2 * k, 2 * k, |p, _| {
            let um = s.matrix_at(p);
            let id = DMatrix::<Complex64>::identity(k, k);
            let mut du = DMatrix::<Complex64>::identity(2 * k, 2 * k);
            du.view_mut((0, 0), (k, k)).copy_from(&um);
            let mut du_star = DMatrix::<Complex64>::identity(2 * k, 2 * k);
            du_star.view_mut((0, 0), (k, k)).copy_from(&um.adjoint());
            let mut rot = DMatrix::<Complex64>::zeros(2 * k, 2 * k);
            rot.view_mut((0, 0), (k, k)).copy_from(&(&id * c(cs, 0.0)));
            rot.view_mut((0, k), (k, k)).copy_from(&(&id * c(-sn, 0.0)));
            rot.view_mut((k, 0), (k, k)).copy_from(&(&id * c(sn, 0.0)));
            rot.view_mut((k, k), (k, k)).copy_from(&(&id * c(cs, 0.0)));
            let w = &du * &rot * &du_star * rot.adjoint();
            let mut e = DMatrix::<Complex64>::zeros(2 * k, 2 * k);
            e.view_mut((0, 0), (k, k)).copy_from(&id);
            let q = &w * e * w.adjoint();
            let mut out = Vec::with_capacity(4 * k * k);
            for i in 0..2 * k {
                for j in 0..2 * k {
                    out.push(q[(i, j)]);
                }
            }
            out
        })
    }

    #[test]
    fn theta_path_endpoints_and_midpoint() {
        let g = make_grid(1, &[16]).unwrap();
        let u = Unitary::from_phase(&g, |t| 0.3 + 2.0 * t[0].sin());
        for t in [0.0, 1.0] {
            assert!(sup_distance(&theta_path(&u, t), &diag_10(&g, 1)).unwrap() < 1e-15);
        }
        let q = theta_path(&u, 0.5);
        assert!(q.projection_defect() < 1e-12);
        let tr = crate::grid::trace(&q).unwrap();
        assert!(tr.data().iter().all(|z| (z - one()).norm() < 1e-14));
    }

    #[test]
    fn theta_path_matches_rotation_and_circle_forms() {
        let g = make_grid(1, &[16]).unwrap();
        let u = Unitary::from_phase(&g, |t| t[0]);
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let closed = theta_path(&u, t);
            let rotated = theta_by_rotation(&u, t);
            assert!(sup_distance(&closed, &rotated).unwrap() < 1e-12, "t = {t}");
            let z = Complex64::from_polar(1.0, 2.0 * PI * t);
            let circle = theta_circle_form(&u, z).unwrap();
            assert!(sup_distance(&closed, &circle).unwrap() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn theta_path_for_matrix_unitary() {
        let g = make_grid(1, &[8]).unwrap();
        let u = Unitary::new(MatrixSymbol::from_fn(&g, 2, 2, |_, t| {
            let (s, co) = t[0].sin_cos();
            vec![c(co, 0.0), c(0.0, s), c(0.0, s), c(co, 0.0)]
        }))
        .unwrap();
        for t in [0.2, 0.5, 0.9] {
            let closed = theta_path(&u, t);
            assert!(sup_distance(&closed, &theta_by_rotation(&u, t)).unwrap() < 1e-12);
            assert!(closed.projection_defect() < 1e-12);
        }
    }

    #[test]
    fn theta_circle_form_trivial_cases() {
        let g = make_grid(1, &[8]).unwrap();
        let u = Unitary::from_phase(&g, |t| t[0]);
        let q = theta_circle_form(&u, one()).unwrap();
        assert!(sup_distance(&q, &diag_10(&g, 1)).unwrap() < 1e-15);
        let trivial = Unitary::new(MatrixSymbol::identity(&g, 1)).unwrap();
        let q = theta_circle_form(&trivial, c(0.0, 1.0)).unwrap();
        assert!(sup_distance(&q, &diag_10(&g, 1)).unwrap() < 1e-15);
    }

    #[test]
    fn index_projection_examples() {
        let g = make_grid(1, &[16]).unwrap();
        let a = MatrixSymbol::from_fn(&g, 1, 1, |_, t| vec![c(0.0, t[0]).exp()]);
        let b = MatrixSymbol::from_fn(&g, 1, 1, |_, t| vec![c(0.0, -t[0]).exp()]);
        let p = index_projection(&a, &b).unwrap();
        assert!(sup_distance(&p, &diag_10(&g, 1)).unwrap() < 1e-14);

        let z = MatrixSymbol::zeros(&g, 2, 2);
        let p = index_projection(&z, &z).unwrap();
        let mut want = vec![zero(); 16];
        for i in 2..4 {
            want[i * 4 + i] = one();
        }
        assert_eq!(p, MatrixSymbol::constant(&g, 4, 4, &want));
        assert!(matches!(
            index_projection(&a, &z),
            Err(SymbolError::Grid(GridError::ShapeMismatch { .. }))
        ));
    }

    #[test]
    fn unitary_exponential_examples() {
        let g = make_grid(2, &[16, 16]).unwrap();
        let q = bott_projection_alpha_beta(&g);
        let e = unitary_exponential(&q).unwrap();
        assert!(sup_distance(&e, &MatrixSymbol::identity(&g, 2)).unwrap() < 1e-10);
        let e = unitary_exponential(&diag_10(&g, 1)).unwrap();
        assert!(sup_distance(&e, &MatrixSymbol::identity(&g, 2)).unwrap() < 1e-14);
        let half = MatrixSymbol::identity(&g, 2).scale(c(0.5, 0.0));
        let e = unitary_exponential(&half).unwrap();
        assert!(sup_distance(&e, &MatrixSymbol::identity(&g, 2).scale(c(-1.0, 0.0))).unwrap() < 1e-14);
        let skew = MatrixSymbol::constant(&g, 1, 1, &[c(0.0, 1.0)]);
        assert!(matches!(
            unitary_exponential(&skew),
            Err(SymbolError::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn sigma_t_has_unit_determinant_modulus() {
        let g = make_grid(3, &[16, 16, 16]).unwrap();
        let s = sigma_t(&g).unwrap();
        for p in 0..g.len() {
            let m = s.at(p);
            let det = m[0] * m[3] - m[1] * m[2];
            let lambda = g.angles(p)[2];
            assert!((det + Complex64::from_polar(1.0, -lambda)).norm() < 1e-13);
        }
        assert!(s.unitarity_defect() < 1e-13);
        assert!(sigma_t(&make_grid(2, &[8, 8]).unwrap()).is_err());
    }

    #[test]
    fn sigma_t_blocks_shape() {
        let g = make_grid(3, &[8, 8, 8]).unwrap();
        let b = sigma_t_blocks(&g, 3).unwrap();
        assert_eq!(b.shape(), (6, 6));
        let s = sigma_t(&g).unwrap();
        assert_eq!(b.entry(5, 3, 2), s.entry(5, 1, 0));
    }

    #[test]
    fn b456_sum_of_squares() {
        let table = B456Table::new(20, 800);
        assert_eq!(table.values.len(), 801 * 41);
        assert!(table.sum_of_squares_defect() < 1e-14);
        assert_eq!(b456(0.0, 0.0), [1.0, -0.0, -0.0]);
    }
}
