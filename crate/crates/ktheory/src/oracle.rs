//! Independent reference computation of invariant factors, used to
//! cross-check [`crate::matrix::smith`].
//!
//! It diagonalizes with plain Euclidean row and column steps, taking
//! pivots in scan order and never enforcing divisibility, then turns the
//! diagonal into a divisibility chain by replacing pairs with their gcd
//! and lcm. No code is shared with the Smith routine.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::group::FgAbelianGroup;
use crate::matrix::IntMatrix;

/// Nonzero diagonal entries (positive, unordered) of some diagonal form of `m`.
pub fn naive_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.to_rows();
    let (r, c) = (m.rows(), m.cols());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        // First nonzero entry in scan order.
        let Some((pi, pj)) = (t..r)
            .flat_map(|i| (t..c).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..r {
                while !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    for j in t..c {
                        let v = &a[i][j] - &q * &a[t][j];
                        a[i][j] = v;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                    }
                }
            }
            for j in t + 1..c {
                while !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    for row in a.iter_mut().skip(t) {
                        let v = &row[j] - &q * &row[t];
                        row[j] = v;
                    }
                    if !a[t][j].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        done = false;
                    }
                }
            }
            if done && (t + 1..r).all(|i| a[i][t].is_zero()) {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Group presented by `m`, via [`naive_diagonal`] and gcd/lcm normalization.
pub fn naive_group(m: &IntMatrix) -> FgAbelianGroup {
    let mut d = naive_diagonal(m);
    let rank = m.rows() - d.len();
    // Pairwise gcd/lcm until the list is a divisibility chain.
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    let factors: Vec<BigInt> = d.into_iter().filter(|x| x > &BigInt::one()).collect();
    FgAbelianGroup::new(rank, factors).expect("gcd/lcm sweep yields a chain")
}
