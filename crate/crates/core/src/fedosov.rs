//! Index integrals of elliptic symbols on odd-dimensional tori.
//!
//! For a symbol `σ` on `T^{2n−1}` the index is
//! `c_n ∫ Tr(σ⁻¹dσ)^{2n−1}` with `c_n = (−1)^{n+1}(n−1)! / ((2πi)^n (2n−1)!)`.
//! Only `n = 1` (winding numbers on `T¹`) and `n = 2` (three-forms on `T³`)
//! are supported. On `T³` with axes `(α, β, λ)` in that order and
//! `X_a = σ⁻¹∂_aσ`, the three-form is `(A₁ + A₂ + A₃) dα∧dβ∧dλ` where
//!
//! ```text
//! A₁ = X_α(X_β X_λ − X_λ X_β)
//! A₂ = X_β(X_λ X_α − X_α X_λ)
//! A₃ = X_λ(X_α X_β − X_β X_α)
//! ```

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{
    derivative, integrate, matmul, min_singular_value, pairwise_sum, pointwise_binary,
    pointwise_inverse, trace, BinaryOp, DiffScheme, GridError, MatrixSymbol,
    DEFAULT_SINGULAR_TOL,
};
use crate::symbols::SymbolError;

/// Default bound on `|normalized − rounded|` and on the imaginary part.
pub const DEFAULT_INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("index formula is implemented for n = 1 and n = 2, got n = {0}")]
    UnsupportedDimension(usize),
    #[error("symbol must be square, got {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("winding number needs a scalar symbol on a one-dimensional grid")]
    NotScalarLoop,
    #[error("normalized integral {normalized} is not within {tol:e} of an integer (residual {residual:e})", normalized = report.normalized, residual = report.residual)]
    IntegralityFailure { report: Box<IndexReport>, tol: f64 },
    #[error("at t = {t}: {source}")]
    AtParameter {
        t: f64,
        #[source]
        source: Box<IndexError>,
    },
}

/// `c_n = (−1)^{n+1}(n−1)! / ((2πi)^n (2n−1)!)`.
pub fn normalizer(n: usize) -> Complex64 {
    let fact = |m: usize| (1..=m).product::<usize>() as f64;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let two_pi_i_n = Complex64::new(0.0, 2.0 * PI).powu(n as u32);
    Complex64::new(sign * fact(n - 1) / fact(2 * n - 1), 0.0) / two_pi_i_n
}

/// Input of [`fedosov_index`].
#[derive(Debug, Clone)]
pub struct FedosovProblem {
    pub sigma: MatrixSymbol,
    pub n: usize,
    pub scheme: DiffScheme,
    pub singular_tol: f64,
    pub integrality_tol: f64,
}

impl FedosovProblem {
    /// Problem with the spectral scheme and default tolerances.
    pub fn new(sigma: MatrixSymbol, n: usize) -> Self {
        Self {
            sigma,
            n,
            scheme: DiffScheme::Spectral,
            singular_tol: DEFAULT_SINGULAR_TOL,
            integrality_tol: DEFAULT_INTEGRALITY_TOL,
        }
    }

    pub fn with_scheme(mut self, scheme: DiffScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_integrality_tol(mut self, tol: f64) -> Self {
        self.integrality_tol = tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub n: usize,
    pub raw_integral: Complex64,
    pub normalizer: Complex64,
    pub normalized: Complex64,
    pub rounded: i64,
    pub residual: f64,
    /// Integrals of `Tr A₁`, `Tr A₂`, `Tr A₃` (empty for `n = 1`).
    pub contributions: Vec<Complex64>,
    pub ellipticity_margin: f64,
    pub grid_sizes: Vec<usize>,
    pub scheme: DiffScheme,
    pub runtime_ms: f64,
}

impl IndexReport {
    fn finish(
        n: usize,
        raw: Complex64,
        contributions: Vec<Complex64>,
        margin: f64,
        sigma: &MatrixSymbol,
        scheme: DiffScheme,
        started: Instant,
    ) -> Self {
        let c = normalizer(n);
        let normalized = c * raw;
        let rounded = normalized.re.round();
        Self {
            n,
            raw_integral: raw,
            normalizer: c,
            normalized,
            rounded: rounded as i64,
            residual: (normalized - rounded).norm(),
            contributions,
            ellipticity_margin: margin,
            grid_sizes: sigma.grid().sizes().to_vec(),
            scheme,
            runtime_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }

    fn check(self, tol: f64) -> Result<Self, IndexError> {
        if self.residual < tol && self.normalized.im.abs() < tol {
            Ok(self)
        } else {
            Err(IndexError::IntegralityFailure {
                report: Box::new(self),
                tol,
            })
        }
    }
}

/// Minimum over the grid of the smallest singular value of `σ(p)`.
pub fn ellipticity_check(sigma: &MatrixSymbol) -> Result<f64, IndexError> {
    if !sigma.is_square() {
        return Err(IndexError::NotSquare {
            rows: sigma.rows(),
            cols: sigma.cols(),
        });
    }
    Ok(min_singular_value(sigma).0)
}

/// Winding number `(1/2πi)∮ f⁻¹ df` of a scalar loop sampled on `T¹`.
pub fn winding_number(f: &MatrixSymbol, scheme: DiffScheme) -> Result<IndexReport, IndexError> {
    if f.shape() != (1, 1) || f.grid().dim() != 1 {
        return Err(IndexError::NotScalarLoop);
    }
    let problem = FedosovProblem::new(f.clone(), 1).with_scheme(scheme);
    fedosov_index(&problem)
}

/// Evaluates the index integral with ellipticity screening and an
/// integrality check; a residual at or above `integrality_tol` is an error
/// that carries the full report.
pub fn fedosov_index(problem: &FedosovProblem) -> Result<IndexReport, IndexError> {
    let started = Instant::now();
    let sigma = &problem.sigma;
    if !sigma.is_square() {
        return Err(IndexError::NotSquare {
            rows: sigma.rows(),
            cols: sigma.cols(),
        });
    }
    if !(problem.n == 1 || problem.n == 2) {
        return Err(IndexError::UnsupportedDimension(problem.n));
    }
    let dim = 2 * problem.n - 1;
    if sigma.grid().dim() != dim {
        return Err(GridError::DimMismatch {
            dim,
            given: sigma.grid().dim(),
        }
        .into());
    }
    let margin = ellipticity_check(sigma)?;
    let inv = pointwise_inverse(sigma, problem.singular_tol)?;
    let xs: Vec<MatrixSymbol> = (0..dim)
        .map(|axis| {
            let d = derivative(sigma, axis, problem.scheme)?;
            pointwise_binary(&inv, &d, BinaryOp::Mul)
        })
        .collect::<Result<_, _>>()?;

    let report = if problem.n == 1 {
        let raw = integrate(&trace(&xs[0])?)?;
        IndexReport::finish(1, raw, Vec::new(), margin, sigma, problem.scheme, started)
    } else {
        let contributions = three_form_contributions(&xs[0], &xs[1], &xs[2]);
        let raw = contributions.iter().sum();
        IndexReport::finish(2, raw, contributions, margin, sigma, problem.scheme, started)
    };
    report.check(problem.integrality_tol)
}

/// Integrals of `Tr A₁`, `Tr A₂`, `Tr A₃` for `X_α, X_β, X_λ`.
fn three_form_contributions(
    xa: &MatrixSymbol,
    xb: &MatrixSymbol,
    xl: &MatrixSymbol,
) -> Vec<Complex64> {
    let k = xa.rows();
    let kk = k * k;
    let points = xa.grid().len();
    let traces: Vec<[Complex64; 3]> = (0..points)
        .into_par_iter()
        .map(|p| {
            let (a, b, l) = (
                &xa.data()[p * kk..(p + 1) * kk],
                &xb.data()[p * kk..(p + 1) * kk],
                &xl.data()[p * kk..(p + 1) * kk],
            );
            let mut t1 = vec![Complex64::new(0.0, 0.0); kk];
            let mut t2 = vec![Complex64::new(0.0, 0.0); kk];
            // Tr X(YZ − ZY)
            let mut term = |x: &[Complex64], y: &[Complex64], z: &[Complex64]| {
                matmul(y, z, k, k, k, &mut t1);
                matmul(z, y, k, k, k, &mut t2);
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..k {
                    for j in 0..k {
                        acc += x[i * k + j] * (t1[j * k + i] - t2[j * k + i]);
                    }
                }
                acc
            };
            [term(a, b, l), term(b, l, a), term(l, a, b)]
        })
        .collect();
    let vol = xa.grid().cell_volume();
    (0..3)
        .map(|i| {
            let column: Vec<Complex64> = traces.iter().map(|t| t[i]).collect();
            pairwise_sum(&column) * vol
        })
        .collect()
}

/// Result of scanning a one-parameter family of symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyScan {
    pub samples: Vec<(f64, IndexReport)>,
    /// Indices `i` where the rounded index differs from sample `i − 1`.
    pub changes: Vec<usize>,
}

impl HomotopyScan {
    pub fn is_constant(&self) -> bool {
        self.changes.is_empty()
    }
}

/// Evaluates the index of `family(t)` at every `t`, flagging index changes.
/// Errors are reported together with the offending parameter.
pub fn homotopy_scan<F>(
    family: F,
    t_samples: &[f64],
    n: usize,
    scheme: DiffScheme,
) -> Result<HomotopyScan, IndexError>
where
    F: Fn(f64) -> Result<MatrixSymbol, IndexError>,
{
    let mut samples: Vec<(f64, IndexReport)> = Vec::with_capacity(t_samples.len());
    let mut changes = Vec::new();
    for &t in t_samples {
        let report = family(t)
            .and_then(|sigma| fedosov_index(&FedosovProblem::new(sigma, n).with_scheme(scheme)))
            .map_err(|e| IndexError::AtParameter {
                t,
                source: Box::new(e),
            })?;
        if let Some((_, prev)) = samples.last() {
            if prev.rounded != report.rounded {
                changes.push(samples.len());
            }
        }
        samples.push((t, report));
    }
    Ok(HomotopyScan { samples, changes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::symbols::sigma_t;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalizers() {
        assert!((normalizer(1) - c(0.0, -1.0 / (2.0 * PI))).norm() < 1e-16);
        assert!((normalizer(2) - c(1.0 / (24.0 * PI * PI), 0.0)).norm() < 1e-16);
    }

    #[test]
    fn winding_examples() {
        let g = make_grid(1, &[64]).unwrap();
        let f = MatrixSymbol::from_fn(&g, 1, 1, |_, t| vec![c(0.0, t[0]).exp()]);
        assert_eq!(winding_number(&f, DiffScheme::Spectral).unwrap().rounded, 1);
        let one = MatrixSymbol::identity(&g, 1);
        let r = winding_number(&one, DiffScheme::Spectral).unwrap();
        assert_eq!(r.rounded, 0);
        assert_eq!(r.raw_integral, c(0.0, 0.0));
    }

    #[test]
    fn ellipticity_of_identity_and_sigma_t() {
        let g = make_grid(3, &[8, 8, 8]).unwrap();
        assert!((ellipticity_check(&MatrixSymbol::identity(&g, 2)).unwrap() - 1.0).abs() < 1e-15);
        let s = sigma_t(&g).unwrap();
        assert!((ellipticity_check(&s).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_symbol_has_index_zero() {
        let g = make_grid(3, &[8, 8, 8]).unwrap();
        let r = fedosov_index(&FedosovProblem::new(MatrixSymbol::identity(&g, 2), 2)).unwrap();
        assert_eq!(r.raw_integral, c(0.0, 0.0));
        assert_eq!(r.rounded, 0);
    }

    #[test]
    fn sigma_t_coarse_grid_rounds_to_one() {
        let g = make_grid(3, &[16, 16, 16]).unwrap();
        let r = fedosov_index(&FedosovProblem::new(sigma_t(&g).unwrap(), 2).with_integrality_tol(1e-3))
            .unwrap();
        assert_eq!(r.rounded, 1);
        assert_eq!(r.contributions.len(), 3);
    }

    #[test]
    fn vanishing_symbol_is_rejected() {
        let g = make_grid(1, &[16]).unwrap();
        let f = MatrixSymbol::from_fn(&g, 1, 1, |p, _| {
            vec![if p == 3 { c(0.0, 0.0) } else { c(1.0, 0.0) }]
        });
        assert!(matches!(
            winding_number(&f, DiffScheme::Spectral),
            Err(IndexError::Grid(GridError::NearSingular { .. }))
        ));
    }

    #[test]
    fn wrong_dimension_and_shape() {
        let g = make_grid(2, &[8, 8]).unwrap();
        assert!(matches!(
            fedosov_index(&FedosovProblem::new(MatrixSymbol::identity(&g, 1), 2)),
            Err(IndexError::Grid(GridError::DimMismatch { .. }))
        ));
        assert!(matches!(
            fedosov_index(&FedosovProblem::new(MatrixSymbol::identity(&g, 1), 3)),
            Err(IndexError::UnsupportedDimension(3))
        ));
        assert!(matches!(
            fedosov_index(&FedosovProblem::new(MatrixSymbol::zeros(&g, 1, 2), 2)),
            Err(IndexError::NotSquare { .. })
        ));
    }

    #[test]
    fn scan_reports_offending_parameter() {
        let g = make_grid(1, &[16]).unwrap();
        let family = |t: f64| {
            Ok(MatrixSymbol::from_fn(&g, 1, 1, move |_, th| {
                vec![c(0.0, th[0]).exp() * t + (1.0 - t)]
            }))
        };
        // t e^{iθ} + (1 − t) vanishes at t = 1/2, θ = −π.
        let err = homotopy_scan(family, &[0.0, 0.25, 0.5, 0.75], 1, DiffScheme::Spectral).unwrap_err();
        match err {
            IndexError::AtParameter { t, .. } => assert_eq!(t, 0.5),
            other => panic!("unexpected {other:?}"),
        }
        let scan = homotopy_scan(family, &[0.0, 0.25, 0.75, 1.0], 1, DiffScheme::Spectral).unwrap();
        assert_eq!(scan.changes, vec![2]);
        assert!(!scan.is_constant());
    }
}
