//! Middle terms of short exact sequences `0 → A → X → C → 0`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::group::{group_from_presentation, groups_of_order, FgAbelianGroup};
use crate::matrix::{lattice_contains, solve_integer, IntMatrix};
use crate::KtheoryError;

/// Default exponent bound for extension and subgroup enumeration.
pub const DEFAULT_BOUND: u64 = 12;

/// All `X` (canonical, sorted, deduplicated) fitting into `0 → A → X → C → 0`.
///
/// The free part of `C` always splits off, so `X = X₀ ⊕ ℤ^{rank C}` where
/// `0 → A → X₀ → T → 0` and `T` is the torsion of `C`. Then `rank X₀ = rank A`
/// and the torsion of `X₀` has order `|T_A|·d` with `d` dividing `|T|`. Each
/// such candidate is tested by searching for a lattice `L` between the
/// relation lattice `R` of `X₀` and `ℤ^m` with `ℤ^m/L ≅ T` and `L/R ≅ A`.
pub fn solve_extension(
    a: &FgAbelianGroup,
    c: &FgAbelianGroup,
    bound: u64,
) -> Result<Vec<FgAbelianGroup>, KtheoryError> {
    let needed = [a.largest_factor(), c.largest_factor()]
        .into_iter()
        .flatten()
        .max()
        .cloned()
        .unwrap_or_else(BigInt::zero);
    if needed > BigInt::from(bound) {
        return Err(KtheoryError::BoundTooSmall {
            bound,
            needed: needed.to_string(),
        });
    }
    if c.is_free() || a.is_zero() {
        return Ok(vec![a.direct_sum(c)]);
    }
    let t = c.torsion();
    let t_order = t.torsion_order().to_u64().expect("bounded torsion");
    let a_tors = a.torsion_order().to_u64().expect("bounded torsion");
    let free_c = FgAbelianGroup::free(c.rank());
    let mut out = Vec::new();
    for d in (1..=t_order).filter(|d| t_order % d == 0) {
        for tors in groups_of_order(a_tors * d) {
            let x0 = FgAbelianGroup::free(a.rank()).direct_sum(&tors);
            if admits_extension(&x0, a, &t) {
                out.push(x0.direct_sum(&free_c));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Whether `x` has a subgroup isomorphic to `a` with quotient isomorphic to
/// the finite group `t`.
fn admits_extension(x: &FgAbelianGroup, a: &FgAbelianGroup, t: &FgAbelianGroup) -> bool {
    let m = x.ngens();
    let index = t.torsion_order().to_u64().expect("bounded torsion");
    let exponent = t.largest_factor().and_then(ToPrimitive::to_u64).unwrap_or(1);
    let rel = x.relations();
    let mut found = false;
    full_rank_hnf(m, index, exponent, &mut |basis| {
        if found || !rel.iter().all(|r| lattice_contains(m, basis, r)) {
            return;
        }
        let b = IntMatrix::from_columns(m, basis);
        if group_from_presentation(&b) != *t {
            return;
        }
        let coords: Vec<Vec<BigInt>> = rel
            .iter()
            .map(|r| solve_integer(&b, r).expect("relations lie in the lattice"))
            .collect();
        if group_from_presentation(&IntMatrix::from_columns(m, &coords)) == *a {
            found = true;
        }
    });
    found
}

/// Visits every sublattice of `ℤ^m` of the given index whose quotient has
/// exponent dividing `exponent`, as the rows of its upper-triangular Hermite
/// form (positive pivots, entries above each pivot in `[0, pivot)`). Such a
/// lattice contains `exponent·ℤ^m`, so every pivot divides `exponent`.
fn full_rank_hnf(m: usize, index: u64, exponent: u64, visit: &mut dyn FnMut(&[Vec<BigInt>])) {
    fn diagonals(m: usize, rem: u64, e: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if acc.len() == m {
            if rem == 1 {
                out.push(acc.clone());
            }
            return;
        }
        for h in (1..=rem).filter(|h| rem % h == 0 && e % h == 0) {
            acc.push(h);
            diagonals(m, rem / h, e, acc, out);
            acc.pop();
        }
    }
    let mut diags = Vec::new();
    diagonals(m, index, exponent, &mut Vec::new(), &mut diags);
    for diag in diags {
        // Free slots: (i, j) with i < j, ranging over [0, diag[j]).
        let slots: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .collect();
        let mut idx = vec![0u64; slots.len()];
        loop {
            let mut rows: Vec<Vec<BigInt>> = (0..m)
                .map(|i| {
                    let mut r = vec![BigInt::zero(); m];
                    r[i] = BigInt::from(diag[i]);
                    r
                })
                .collect();
            for (k, &(i, j)) in slots.iter().enumerate() {
                rows[i][j] = BigInt::from(idx[k]);
            }
            visit(&rows);
            let mut k = 0;
            while k < slots.len() {
                idx[k] += 1;
                if idx[k] < diag[slots[k].1] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == slots.len() {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbelianGroup {
        s.parse().unwrap()
    }

    fn names(v: &[FgAbelianGroup]) -> Vec<String> {
        v.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn free_quotient_splits() {
        assert_eq!(names(&solve_extension(&g("Z"), &g("Z^2"), 12).unwrap()), vec!["Z^3"]);
        assert_eq!(
            names(&solve_extension(&g("Z_3"), &g("Z"), 12).unwrap()),
            vec!["Z + Z_3"]
        );
    }

    #[test]
    fn two_by_two() {
        assert_eq!(
            names(&solve_extension(&g("Z_2"), &g("Z_2"), 12).unwrap()),
            vec!["Z_2 + Z_2", "Z_4"]
        );
    }

    #[test]
    fn trivial_sub() {
        assert_eq!(
            solve_extension(&g("0"), &g("Z + Z_6"), 12).unwrap(),
            vec![g("Z + Z_6")]
        );
    }

    #[test]
    fn free_sub_with_torsion_quotient() {
        // ℤ →×2 ℤ → ℤ₂ and the split ℤ ⊕ ℤ₂ both occur.
        assert_eq!(
            names(&solve_extension(&g("Z"), &g("Z_2"), 12).unwrap()),
            vec!["Z", "Z + Z_2"]
        );
        // ℤ_p-extensions of ℤ_p ⊕ ℤ: torsion can shrink into the free part.
        let xs = solve_extension(&g("Z + Z_2"), &g("Z_2"), 12).unwrap();
        assert!(xs.contains(&g("Z + Z_2")));
        assert!(xs.contains(&g("Z + Z_4")));
        assert!(xs.contains(&g("Z + Z_2 + Z_2")));
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(
            solve_extension(&g("Z_13"), &g("Z_2"), 12),
            Err(KtheoryError::BoundTooSmall { .. })
        ));
    }
}
