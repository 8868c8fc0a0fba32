//! Fredholm indices of shift/multiplier operators on `ℓ²(ℤ^d, ℂ^k)`, `d ∈ {1, 2}`.
//!
//! An operator is a finite sum of terms `(s, m)` acting as
//! `(Au)(p) = Σ_s m_s(p)·u(p + s)`, so the term `(s, 1)` is the shift `Y_s`
//! with `(Y_s u)(p) = u(p + s)` and `(−1, b)` is `b(M)Y₋₁`.
//!
//! Indices are only certified by three methods, never by square truncation:
//! - `exact_scan`: pointwise nullities of a pure multiplier over a window;
//! - `exact_band`: kernels of operators on `ℤ` whose tails are monomials,
//!   whose kernel vectors therefore have computable finite support;
//! - `winding`: winding numbers of the limit symbols at `±∞`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fedosov::{winding_number, IndexError};
use crate::grid::{DiffScheme, MatrixSymbol, TorusGrid};

/// Singular values below this count toward a kernel.
pub const KERNEL_TOL: f64 = 1e-10;

/// Agreement required between a multiplier and its declared limit form.
pub const LIMIT_TOL: f64 = 1e-12;

/// Sign relating `winding(f₊) − winding(f₋)` to the index. Fixed by
/// comparison with `exact_kernel_band` on the step Toeplitz operator
/// `b(M)Y₋₁ + c(M)`; the lattice tests re-derive it.
pub const WINDING_SIGN: i64 = 1;

/// Samples per period used to evaluate limit-symbol winding numbers.
const SYMBOL_GRID: usize = 256;

/// Default windows.
pub const DEFAULT_WINDOW_1D: i64 = 64;
pub const DEFAULT_WINDOW_2D: i64 = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("operator is not a single shift-free multiplier")]
    NotPureMultiplier,
    #[error("limit operator at {side} is not a nonzero invertible monomial")]
    TailNotMonomial { side: Side },
    #[error("limit symbol at {side} vanishes (min modulus {min_modulus:e})")]
    LimitSymbolVanishes { side: Side, min_modulus: f64 },
    #[error("operator is not scalar (k = {0})")]
    NotScalar(usize),
    #[error("multiplier `{0}` has no limit values at ±∞")]
    MissingLimits(String),
    #[error("multiplier `{0}` is not invertible at infinity")]
    NotInvertibleAtInfinity(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("term {term} has matrix size {got}, operator has {expected}")]
    SizeMismatch { term: usize, expected: usize, got: usize },
    #[error("no certified method applies: {0}")]
    NoApplicableMethod(String),
    #[error("methods disagree: {0:?}")]
    MethodDisagreement(Vec<MethodResult>),
    #[error(transparent)]
    Winding(#[from] IndexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Minus => "−∞",
            Side::Plus => "+∞",
        })
    }
}

/// Inclusive box `[lo₀, hi₀] × … × [lo_{d−1}, hi_{d−1}]` in `ℤ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "window bounds of different dimension");
        Self { lo, hi }
    }

    /// `[−r, r]^dim`.
    pub fn symmetric(dim: usize, r: i64) -> Self {
        Self::new(vec![-r; dim], vec![r; dim])
    }

    pub fn interval(lo: i64, hi: i64) -> Self {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.is_empty() || (self.contains(&other.lo) && self.contains(&other.hi))
    }

    /// Grows every side by `by`.
    pub fn expand(&self, by: i64) -> Self {
        Self::new(
            self.lo.iter().map(|l| l - by).collect(),
            self.hi.iter().map(|h| h + by).collect(),
        )
    }

    /// Translates by `s`.
    pub fn translate(&self, s: &[i64]) -> Self {
        Self::new(
            self.lo.iter().zip(s).map(|(l, d)| l + d).collect(),
            self.hi.iter().zip(s).map(|(h, d)| h + d).collect(),
        )
    }

    /// Same centre, every half-width multiplied by `factor` (rounded up).
    pub fn scaled(&self, factor: f64) -> Self {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| {
                let extra = (((h - l) as f64) * (factor - 1.0) / 2.0).ceil() as i64;
                (l - extra, h + extra)
            })
            .unzip();
        Self::new(lo, hi)
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (*l..=*h).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Points at sup-distance exactly 1 outside the window.
    pub fn shell(&self) -> Vec<Vec<i64>> {
        self.expand(1)
            .points()
            .into_iter()
            .filter(|p| !self.contains(p))
            .collect()
    }
}

/// Behaviour of a multiplier outside its variation window.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitForm {
    /// Equal to a single matrix everywhere outside the window.
    Constant(Vec<Complex64>),
    /// On `ℤ`: equal to `minus` left of the window and to `plus` right of it.
    EventuallyConstant {
        minus: Vec<Complex64>,
        plus: Vec<Complex64>,
    },
    /// Smallest singular value at least `min_singular` outside the window.
    InvertibleOutside { min_singular: f64 },
}

type EvalFn = Arc<dyn Fn(&[i64]) -> Vec<Complex64> + Send + Sync>;

/// Matrix-valued function on the lattice with declared behaviour at infinity.
#[derive(Clone)]
pub struct Multiplier {
    k: usize,
    label: String,
    eval: EvalFn,
    limit: LimitForm,
    variation: Window,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier")
            .field("label", &self.label)
            .field("k", &self.k)
            .field("limit", &self.limit)
            .field("variation", &self.variation)
            .finish()
    }
}

fn smallest_sv(m: &[Complex64], k: usize) -> f64 {
    DMatrix::from_row_slice(k, k, m).singular_values().min()
}

fn nullity(m: &[Complex64], k: usize) -> usize {
    DMatrix::from_row_slice(k, k, m)
        .singular_values()
        .iter()
        .filter(|&&s| s < KERNEL_TOL)
        .count()
}

fn adjoint_flat(m: &[Complex64], k: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); k * k];
    for i in 0..k {
        for j in 0..k {
            out[j * k + i] = m[i * k + j].conj();
        }
    }
    out
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl Multiplier {
    pub fn new<F>(k: usize, label: impl Into<String>, variation: Window, limit: LimitForm, eval: F) -> Self
    where
        F: Fn(&[i64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        Self {
            k,
            label: label.into(),
            eval: Arc::new(eval),
            limit,
            variation,
        }
    }

    /// Constant matrix on `ℤ^dim`.
    pub fn constant(dim: usize, k: usize, value: Vec<Complex64>) -> Self {
        let v = value.clone();
        Self::new(
            k,
            "constant",
            Window::new(vec![0; dim], vec![-1; dim]),
            LimitForm::Constant(value),
            move |_| v.clone(),
        )
    }

    /// Scalar constant on `ℤ^dim`.
    pub fn scalar(dim: usize, z: Complex64) -> Self {
        Self::constant(dim, 1, vec![z])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn limit(&self) -> &LimitForm {
        &self.limit
    }

    pub fn variation(&self) -> &Window {
        &self.variation
    }

    pub fn eval(&self, p: &[i64]) -> Vec<Complex64> {
        (self.eval)(p)
    }

    /// Value at `±∞` on `ℤ`, when declared.
    pub fn limit_at(&self, side: Side) -> Option<Vec<Complex64>> {
        match &self.limit {
            LimitForm::Constant(v) => Some(v.clone()),
            LimitForm::EventuallyConstant { minus, plus } => Some(match side {
                Side::Minus => minus.clone(),
                Side::Plus => plus.clone(),
            }),
            LimitForm::InvertibleOutside { .. } => None,
        }
    }

    /// `p ↦ m(p − s)*`, the multiplier of the adjoint of the term `(s, m)`.
    fn adjoint_shifted(&self, s: &[i64]) -> Self {
        let k = self.k;
        let inner = self.eval.clone();
        let shift = s.to_vec();
        let limit = match &self.limit {
            LimitForm::Constant(v) => LimitForm::Constant(adjoint_flat(v, k)),
            LimitForm::EventuallyConstant { minus, plus } => LimitForm::EventuallyConstant {
                minus: adjoint_flat(minus, k),
                plus: adjoint_flat(plus, k),
            },
            LimitForm::InvertibleOutside { min_singular } => LimitForm::InvertibleOutside {
                min_singular: *min_singular,
            },
        };
        Self {
            k,
            label: format!("{}*", self.label),
            eval: Arc::new(move |p: &[i64]| {
                let q: Vec<i64> = p.iter().zip(&shift).map(|(x, d)| x - d).collect();
                adjoint_flat(&inner(&q), k)
            }),
            limit,
            variation: self.variation.translate(s),
        }
    }

    /// Checks that `window` contains the variation window and that the
    /// multiplier agrees with its limit form on the shell around `window`.
    fn check_window(&self, window: &Window) -> Result<(), LatticeError> {
        if !window.contains_window(&self.variation) {
            return Err(LatticeError::WindowTooSmall(format!(
                "multiplier `{}` varies on {:?}..{:?}, outside the window {:?}..{:?}",
                self.label, self.variation.lo, self.variation.hi, window.lo, window.hi
            )));
        }
        for p in window.shell() {
            let v = self.eval(&p);
            let ok = match &self.limit {
                LimitForm::Constant(c) => max_abs_diff(&v, c) < LIMIT_TOL,
                LimitForm::EventuallyConstant { minus, plus } => {
                    let target = if p[0] < window.lo[0] { minus } else { plus };
                    max_abs_diff(&v, target) < LIMIT_TOL
                }
                LimitForm::InvertibleOutside { min_singular } => {
                    smallest_sv(&v, self.k) >= min_singular - LIMIT_TOL
                }
            };
            if !ok {
                return Err(LatticeError::WindowTooSmall(format!(
                    "multiplier `{}` departs from its limit form at {p:?}",
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Smallest singular value the limit form guarantees outside the variation window.
    fn limit_margin(&self) -> f64 {
        match &self.limit {
            LimitForm::Constant(v) => smallest_sv(v, self.k),
            LimitForm::EventuallyConstant { minus, plus } => {
                smallest_sv(minus, self.k).min(smallest_sv(plus, self.k))
            }
            LimitForm::InvertibleOutside { min_singular } => *min_singular,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Term {
    pub shift: Vec<i64>,
    pub multiplier: Multiplier,
}

/// Finite sum of shift/multiplier terms on `ℓ²(ℤ^dim, ℂ^k)`.
#[derive(Debug, Clone)]
pub struct LatticeOperator {
    dim: usize,
    k: usize,
    terms: Vec<Term>,
}

impl LatticeOperator {
    pub fn new(dim: usize, k: usize, terms: Vec<Term>) -> Result<Self, LatticeError> {
        for (i, t) in terms.iter().enumerate() {
            if t.shift.len() != dim {
                return Err(LatticeError::DimMismatch {
                    expected: dim,
                    got: t.shift.len(),
                });
            }
            if t.multiplier.variation.dim() != dim {
                return Err(LatticeError::DimMismatch {
                    expected: dim,
                    got: t.multiplier.variation.dim(),
                });
            }
            if t.multiplier.k != k {
                return Err(LatticeError::SizeMismatch {
                    term: i,
                    expected: k,
                    got: t.multiplier.k,
                });
            }
        }
        Ok(Self { dim, k, terms })
    }

    /// Multiplication operator `m(M)`.
    pub fn multiplication(dim: usize, m: Multiplier) -> Result<Self, LatticeError> {
        let k = m.k;
        Self::new(
            dim,
            k,
            vec![Term {
                shift: vec![0; dim],
                multiplier: m,
            }],
        )
    }

    /// Scalar shift `Y_s`, `(Y_s u)(p) = u(p + s)`.
    pub fn shift(s: Vec<i64>) -> Self {
        let dim = s.len();
        Self {
            dim,
            k: 1,
            terms: vec![Term {
                shift: s,
                multiplier: Multiplier::scalar(dim, Complex64::new(1.0, 0.0)),
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn max_shift(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|t| t.shift.iter().map(|s| s.abs()))
            .max()
            .unwrap_or(0)
    }

    fn is_pure_multiplier(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].shift.iter().all(|&s| s == 0)
    }

    /// Limit of every term at `side` (shift, matrix) on `ℤ`, merged by shift.
    fn limit_operator(&self, side: Side) -> Result<BTreeMap<i64, Vec<Complex64>>, LatticeError> {
        let mut out: BTreeMap<i64, Vec<Complex64>> = BTreeMap::new();
        for t in &self.terms {
            let v = t
                .multiplier
                .limit_at(side)
                .ok_or_else(|| LatticeError::MissingLimits(t.multiplier.label.clone()))?;
            let entry = out
                .entry(t.shift[0])
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); self.k * self.k]);
            for (e, x) in entry.iter_mut().zip(v) {
                *e += x;
            }
        }
        Ok(out)
    }
}

/// Finitely supported vector in `ℓ²(ℤ^d, ℂ^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVector {
    pub k: usize,
    pub entries: BTreeMap<Vec<i64>, Vec<Complex64>>,
}

impl LatticeVector {
    pub fn zero(k: usize) -> Self {
        Self {
            k,
            entries: BTreeMap::new(),
        }
    }

    /// Standard basis vector `δ_p ⊗ e_i`.
    pub fn delta(k: usize, p: Vec<i64>, i: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); k];
        v[i] = Complex64::new(1.0, 0.0);
        let mut entries = BTreeMap::new();
        entries.insert(p, v);
        Self { k, entries }
    }

    pub fn get(&self, p: &[i64]) -> Vec<Complex64> {
        self.entries
            .get(p)
            .cloned()
            .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); self.k])
    }

    /// `⟨x, y⟩ = Σ_p Σ_i x_i(p)·conj(y_i(p))`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.entries
            .iter()
            .filter_map(|(p, x)| other.entries.get(p).map(|y| (x, y)))
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a * b.conj()).sum::<Complex64>())
            .sum()
    }

    /// Drops entries whose components are all exactly zero.
    pub fn pruned(mut self) -> Self {
        self.entries
            .retain(|_, v| v.iter().any(|z| *z != Complex64::new(0.0, 0.0)));
        self
    }
}

/// `(Au)(p) = Σ_s m_s(p)·u(p + s)`.
pub fn apply(a: &LatticeOperator, u: &LatticeVector) -> LatticeVector {
    let k = a.k;
    let mut out: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
    for (q, uq) in &u.entries {
        for t in &a.terms {
            let p: Vec<i64> = q.iter().zip(&t.shift).map(|(x, s)| x - s).collect();
            let m = t.multiplier.eval(&p);
            let acc = out
                .entry(p)
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); k]);
            for i in 0..k {
                for j in 0..k {
                    acc[i] += m[i * k + j] * uq[j];
                }
            }
        }
    }
    LatticeVector { k, entries: out }
}

/// Adjoint operator: `(s, m) ↦ (−s, p ↦ m(p − s)*)`.
pub fn adjoint(a: &LatticeOperator) -> LatticeOperator {
    LatticeOperator {
        dim: a.dim,
        k: a.k,
        terms: a
            .terms
            .iter()
            .map(|t| Term {
                shift: t.shift.iter().map(|s| -s).collect(),
                multiplier: t.multiplier.adjoint_shifted(&t.shift),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    ExactScan,
    ExactBand,
    Winding,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certificate::ExactScan => "exact_scan",
            Certificate::ExactBand => "exact_band",
            Certificate::Winding => "winding",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub certificate: Certificate,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCount {
    pub ker_dim: Option<usize>,
    pub coker_dim: Option<usize>,
    pub index: i64,
    pub window: Window,
    pub certificate: Certificate,
    /// Every method that was run, including the one reported above.
    pub methods: Vec<MethodResult>,
}

impl KernelCount {
    fn exact(ker: usize, coker: usize, window: Window, certificate: Certificate) -> Self {
        let index = ker as i64 - coker as i64;
        Self {
            ker_dim: Some(ker),
            coker_dim: Some(coker),
            index,
            window,
            certificate,
            methods: vec![MethodResult { certificate, index }],
        }
    }
}

fn check_dim(a: &LatticeOperator, window: &Window) -> Result<(), LatticeError> {
    if window.dim() != a.dim {
        return Err(LatticeError::DimMismatch {
            expected: a.dim,
            got: window.dim(),
        });
    }
    Ok(())
}

/// Kernel and cokernel of a pure multiplier by scanning pointwise nullities
/// over `window`, after checking that the multiplier is invertible outside it.
pub fn multiplier_kernel_dims(a: &LatticeOperator, window: &Window) -> Result<KernelCount, LatticeError> {
    if !a.is_pure_multiplier() {
        return Err(LatticeError::NotPureMultiplier);
    }
    check_dim(a, window)?;
    let m = &a.terms[0].multiplier;
    if !(m.limit_margin() > KERNEL_TOL) {
        return Err(LatticeError::NotInvertibleAtInfinity(m.label.clone()));
    }
    m.check_window(window)?;
    let k = a.k;
    let adj = adjoint(a);
    let m_star = &adj.terms[0].multiplier;
    let points = window.points();
    let (ker, coker) = points
        .par_iter()
        .map(|p| (nullity(&m.eval(p), k), nullity(&m_star.eval(p), k)))
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(KernelCount::exact(ker, coker, window.clone(), Certificate::ExactScan))
}

/// Shift of the single nonzero, invertible limit coefficient at `side`.
fn monomial_tail(a: &LatticeOperator, side: Side) -> Result<i64, LatticeError> {
    let limits = a.limit_operator(side)?;
    let nonzero: Vec<(&i64, &Vec<Complex64>)> = limits
        .iter()
        .filter(|(_, v)| v.iter().any(|z| z.norm() > LIMIT_TOL))
        .collect();
    match nonzero.as_slice() {
        [(s, v)] if smallest_sv(v, a.k) > KERNEL_TOL => Ok(**s),
        _ => Err(LatticeError::TailNotMonomial { side }),
    }
}

/// Dimension of `ker A` for a band operator on `ℤ` with monomial tails.
///
/// Right of the window the equation `Au = 0` reads `c₊u(p + s₊) = 0`, and
/// left of it `c₋u(p + s₋) = 0`, so kernel vectors are supported in
/// `[L + s₋, R + s₊]`. The kernel is the null space of the rectangular
/// system formed by all equations touching that support.
fn band_kernel_dim(a: &LatticeOperator, window: &Window) -> Result<usize, LatticeError> {
    let s_plus = monomial_tail(a, Side::Plus)?;
    let s_minus = monomial_tail(a, Side::Minus)?;
    for t in &a.terms {
        t.multiplier.check_window(window)?;
    }
    let (l, r) = (window.lo[0], window.hi[0]);
    let (lo, hi) = (l + s_minus, r + s_plus);
    if lo > hi {
        return Ok(0);
    }
    let k = a.k;
    let s_max = a.terms.iter().map(|t| t.shift[0]).max().unwrap_or(0);
    let s_min = a.terms.iter().map(|t| t.shift[0]).min().unwrap_or(0);
    let (row_lo, row_hi) = (lo - s_max, hi - s_min);
    let cols = ((hi - lo + 1) as usize) * k;
    let rows = ((row_hi - row_lo + 1) as usize) * k;
    let mut mat = DMatrix::<Complex64>::zeros(rows, cols);
    for p in row_lo..=row_hi {
        for t in &a.terms {
            let q = p + t.shift[0];
            if q < lo || q > hi {
                continue;
            }
            let m = t.multiplier.eval(&[p]);
            let (ri, ci) = (((p - row_lo) as usize) * k, ((q - lo) as usize) * k);
            for i in 0..k {
                for j in 0..k {
                    mat[(ri + i, ci + j)] += m[i * k + j];
                }
            }
        }
    }
    let svals = mat.singular_values();
    let rank = svals.iter().filter(|&&s| s >= KERNEL_TOL).count();
    Ok(cols - rank)
}

/// Kernel and cokernel of a band operator on `ℤ` whose multipliers are
/// constant outside `window` and whose limit operators are monomials.
pub fn exact_kernel_band(a: &LatticeOperator, window: &Window) -> Result<KernelCount, LatticeError> {
    if a.dim != 1 {
        return Err(LatticeError::DimMismatch {
            expected: 1,
            got: a.dim,
        });
    }
    check_dim(a, window)?;
    let ker = band_kernel_dim(a, window)?;
    let coker = band_kernel_dim(&adjoint(a), &window.expand(a.max_shift()))?;
    Ok(KernelCount::exact(ker, coker, window.clone(), Certificate::ExactBand))
}

/// Limit symbol `f(θ) = Σ_s c_s e^{isθ}` sampled on `T¹`.
fn limit_symbol(coeffs: &BTreeMap<i64, Vec<Complex64>>) -> MatrixSymbol {
    let grid = TorusGrid::new(1, &[SYMBOL_GRID]).expect("valid symbol grid");
    MatrixSymbol::from_fn(&grid, 1, 1, |_, t| {
        vec![coeffs
            .iter()
            .map(|(s, c)| c[0] * Complex64::from_polar(1.0, *s as f64 * t[0]))
            .sum()]
    })
}

fn checked_winding(a: &LatticeOperator, side: Side) -> Result<i64, LatticeError> {
    let f = limit_symbol(&a.limit_operator(side)?);
    let min_modulus = f.data().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(min_modulus > 1e-8) {
        return Err(LatticeError::LimitSymbolVanishes { side, min_modulus });
    }
    Ok(winding_number(&f, DiffScheme::Spectral)?.rounded)
}

/// Index `WINDING_SIGN·(winding(f₊) − winding(f₋))` of a scalar band operator
/// on `ℤ` from its limit symbols.
pub fn band_symbol_index(a: &LatticeOperator) -> Result<KernelCount, LatticeError> {
    if a.dim != 1 {
        return Err(LatticeError::DimMismatch {
            expected: 1,
            got: a.dim,
        });
    }
    if a.k != 1 {
        return Err(LatticeError::NotScalar(a.k));
    }
    let index = WINDING_SIGN * (checked_winding(a, Side::Plus)? - checked_winding(a, Side::Minus)?);
    let window = a
        .terms
        .iter()
        .map(|t| t.multiplier.variation.clone())
        .reduce(|x, y| {
            Window::new(
                vec![x.lo[0].min(y.lo[0])],
                vec![x.hi[0].max(y.hi[0])],
            )
        })
        .unwrap_or_else(|| Window::interval(0, -1));
    Ok(KernelCount {
        ker_dim: None,
        coker_dim: None,
        index,
        window,
        certificate: Certificate::Winding,
        methods: vec![MethodResult {
            certificate: Certificate::Winding,
            index,
        }],
    })
}

/// Runs every certified method that applies to `a` and checks they agree.
/// The reported counts come from the first exact method.
pub fn fredholm_index(a: &LatticeOperator, window: &Window) -> Result<KernelCount, LatticeError> {
    check_dim(a, window)?;
    let mut reasons = Vec::new();
    let mut results: Vec<KernelCount> = Vec::new();

    if a.is_pure_multiplier() {
        results.push(multiplier_kernel_dims(a, window)?);
    } else {
        reasons.push("exact_scan: not a single shift-free multiplier".to_string());
    }

    if a.dim == 1 {
        let tails = a.terms.iter().all(|t| t.multiplier.limit_at(Side::Plus).is_some())
            && monomial_tail(a, Side::Plus).is_ok()
            && monomial_tail(a, Side::Minus).is_ok();
        if tails {
            results.push(exact_kernel_band(a, window)?);
        } else {
            reasons.push("exact_band: tails are not invertible monomials".to_string());
        }
        if a.k == 1 && a.terms.iter().all(|t| t.multiplier.limit_at(Side::Plus).is_some()) {
            match band_symbol_index(a) {
                Ok(r) => results.push(r),
                Err(e @ LatticeError::LimitSymbolVanishes { .. }) => reasons.push(format!("winding: {e}")),
                Err(e) => return Err(e),
            }
        } else {
            reasons.push("winding: needs a scalar operator with limits at ±∞".to_string());
        }
    } else {
        reasons.push("exact_band, winding: need an operator on ℤ".to_string());
    }

    let methods: Vec<MethodResult> = results.iter().flat_map(|r| r.methods.clone()).collect();
    let mut primary = match results.into_iter().next() {
        Some(r) => r,
        None => return Err(LatticeError::NoApplicableMethod(reasons.join("; "))),
    };
    if methods.iter().any(|m| m.index != primary.index) {
        return Err(LatticeError::MethodDisagreement(methods));
    }
    primary.methods = methods;
    Ok(primary)
}

/// `2π`-periodic Laurent polynomial `Σ_s c_s e^{isθ}` as a scalar band operator
/// `Σ_s c_s Y_s` (constant coefficients).
pub fn laurent_operator(coeffs: &[(i64, Complex64)]) -> LatticeOperator {
    let terms = coeffs
        .iter()
        .map(|&(s, c)| Term {
            shift: vec![s],
            multiplier: Multiplier::scalar(1, c),
        })
        .collect();
    LatticeOperator {
        dim: 1,
        k: 1,
        terms,
    }
}
