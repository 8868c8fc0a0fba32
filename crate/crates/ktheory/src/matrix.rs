//! Integer matrices, Smith normal form and lattice computations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// From nested rows; all rows must have the same length. An empty
    /// slice gives a `0 × 0` matrix.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().map(Into::into).collect(),
        }
    }

    /// `rows × cols` matrix whose columns are `columns`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column of wrong length");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "shape mismatch in product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row mismatch in hcat");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += q·row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + q * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// `col[dst] += q·col[src]`.
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + q * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }
}

/// `D = U·M·V` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | …`,
/// all `dᵢ ≥ 0`. The inverses of `U` and `V` are tracked alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

/// Smith normal form `(U, D, V)` of `m`.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = smith(m);
    (s.u, s.d, s.v)
}

/// Position of the smallest nonzero `|entry|` in the block `[t.., t..]`,
/// first in row-major order on ties.
fn smallest_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Full Smith decomposition with inverses. Pivot rule: smallest nonzero
/// absolute value in the remaining block, ties broken row-major.
pub fn smith(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);

    // Row operation E on D, mirrored on U (left) and U⁻¹ (right, inverted).
    macro_rules! row_add {
        ($dst:expr, $src:expr, $q:expr) => {{
            let q: BigInt = $q;
            d.add_row($dst, $src, &q);
            u.add_row($dst, $src, &q);
            u_inv.add_col($src, $dst, &(-q));
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $q:expr) => {{
            let q: BigInt = $q;
            d.add_col($dst, $src, &q);
            v.add_col($dst, $src, &q);
            v_inv.add_row($src, $dst, &(-q));
        }};
    }

    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = smallest_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        let mut dirty = false;
        for i in t + 1..r {
            if !d.get(i, t).is_zero() {
                let q = d.get(i, t).div_floor(d.get(t, t));
                row_add!(i, t, -q);
                dirty |= !d.get(i, t).is_zero();
            }
        }
        for j in t + 1..c {
            if !d.get(t, j).is_zero() {
                let q = d.get(t, j).div_floor(d.get(t, t));
                col_add!(j, t, -q);
                dirty |= !d.get(t, j).is_zero();
            }
        }
        if dirty {
            // A smaller remainder appeared; pick the pivot again.
            continue;
        }
        // Pivot row and column are clear; enforce divisibility of the rest.
        let offender = (t + 1..r)
            .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
            .find(|&(i, j)| !d.get(i, j).is_multiple_of(d.get(t, t)));
        if let Some((i, _)) = offender {
            row_add!(t, i, BigInt::one());
            continue;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }
    SmithForm {
        u,
        d,
        v,
        u_inv,
        v_inv,
        rank: t,
    }
}

/// Basis (as columns) of `{x ∈ ℤⁿ : A·x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith(a);
    (s.rank..a.cols()).map(|j| s.v.column(j)).collect()
}

/// Basis (as columns) of the lattice spanned by `gens` in `ℤ^dim`.
pub fn lattice_basis(dim: usize, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let g = IntMatrix::from_columns(dim, gens);
    let s = smith(&g);
    // G·V = U⁻¹·D, so the span is generated by dᵢ times column i of U⁻¹.
    (0..s.rank)
        .map(|i| {
            let di = s.d.get(i, i);
            s.u_inv.column(i).iter().map(|x| x * di).collect()
        })
        .collect()
}

/// Integer solution `x` of `B·x = y`, if one exists.
pub fn solve_integer(b: &IntMatrix, y: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith(b);
    // B = U⁻¹ D V⁻¹, so D·(V⁻¹x) = U·y.
    let z = s.u.mul_vec(y);
    let mut w = vec![BigInt::zero(); b.cols()];
    for (i, zi) in z.iter().enumerate() {
        if i < s.rank {
            let di = s.d.get(i, i);
            if !zi.is_multiple_of(di) {
                return None;
            }
            w[i] = zi / di;
        } else if !zi.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&w))
}

/// Whether `y` lies in the lattice spanned by `gens` in `ℤ^dim`.
pub fn lattice_contains(dim: usize, gens: &[Vec<BigInt>], y: &[BigInt]) -> bool {
    if y.iter().all(Zero::is_zero) {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    solve_integer(&IntMatrix::from_columns(dim, gens), y).is_some()
}

/// Whether the lattices spanned by `a` and `b` coincide.
pub fn lattices_equal(dim: usize, a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> bool {
    a.iter().all(|x| lattice_contains(dim, b, x)) && b.iter().all(|x| lattice_contains(dim, a, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check(mat: &IntMatrix) -> SmithForm {
        let s = smith(mat);
        assert_eq!(s.u.mul(mat).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(mat.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(mat.cols()));
        assert_eq!(s.u.determinant().abs(), BigInt::one());
        assert_eq!(s.v.determinant().abs(), BigInt::one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(w[1].is_zero() || w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn identity_and_zero() {
        let id = IntMatrix::identity(3);
        let (u, d, v) = smith_normal_form(&id);
        assert_eq!((u, d.clone(), v), (id.clone(), id.clone(), id));
        let z = IntMatrix::zeros(2, 3);
        assert_eq!(check(&z).d, z);
    }

    #[test]
    fn two_by_two_example() {
        let s = check(&m(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn coprime_diagonal_merges() {
        let s = check(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn rectangular_and_negative() {
        check(&m(&[vec![-4, 6, 2], vec![10, -3, 7]]));
        check(&m(&[vec![0, 0], vec![0, -5], vec![3, 0]]));
        check(&IntMatrix::zeros(0, 3));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(m(&[vec![2, 4], vec![6, 8]]).determinant(), BigInt::from(-8));
        assert_eq!(m(&[vec![0, 1], vec![1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(
            m(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]).determinant(),
            BigInt::from(-3)
        );
    }

    #[test]
    fn kernels_and_solutions() {
        let a = m(&[vec![1, 2, 3]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        let b = m(&[vec![2, 0], vec![0, 3]]);
        let y: Vec<BigInt> = vec![4.into(), 9.into()];
        assert_eq!(solve_integer(&b, &y), Some(vec![2.into(), 3.into()]));
        assert_eq!(solve_integer(&b, &[1.into(), 0.into()]), None);
        let gens: Vec<Vec<BigInt>> = vec![vec![2.into(), 2.into()], vec![0.into(), 4.into()]];
        let basis = lattice_basis(2, &gens);
        assert!(lattices_equal(2, &gens, &basis));
        assert!(lattice_contains(2, &gens, &[2.into(), 6.into()]));
        assert!(!lattice_contains(2, &gens, &[1.into(), 1.into()]));
    }
}
