//! Finitely generated abelian groups in invariant-factor form.
//!
//! A group `ℤ^r ⊕ ℤ_{d₁} ⊕ … ⊕ ℤ_{d_k}` has `r + k` standard generators: the
//! free ones first, then one per invariant factor. Elements and subgroups
//! are written in these coordinates; torsion coordinates are only defined
//! modulo their order, which the relation lattice accounts for.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matrix::{lattice_basis, lattice_contains, lattices_equal, smith, solve_integer, IntMatrix};
use crate::KtheoryError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FgAbelianGroup {
    rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl FgAbelianGroup {
    /// Validated constructor; factors must be `≥ 2` and form a divisibility chain.
    pub fn new(rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self, KtheoryError> {
        let two = BigInt::from(2);
        if invariant_factors.iter().any(|d| d < &two) {
            return Err(KtheoryError::InvalidGroup(
                "invariant factors must be at least 2".into(),
            ));
        }
        if invariant_factors.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(KtheoryError::InvalidGroup(
                "invariant factors must divide each other in order".into(),
            ));
        }
        Ok(Self {
            rank,
            invariant_factors,
        })
    }

    /// `ℤ^rank ⊕ ⨁ ℤ_{orders[i]}` canonicalized; orders `0` add free rank
    /// and orders `1` vanish.
    pub fn from_orders(rank: usize, orders: &[u64]) -> Self {
        let diag: Vec<BigInt> = orders.iter().map(|&o| BigInt::from(o)).collect();
        let n = diag.len();
        let mut g = group_from_presentation(&IntMatrix::diagonal(n, n, &diag));
        g.rank += rank;
        g
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    pub fn free(rank: usize) -> Self {
        Self {
            rank,
            invariant_factors: Vec::new(),
        }
    }

    /// `ℤ/n`; `n = 0` gives `ℤ` and `n = 1` the zero group.
    pub fn cyclic(n: u64) -> Self {
        Self::from_orders(0, &[n])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Number of standard generators.
    pub fn ngens(&self) -> usize {
        self.rank + self.invariant_factors.len()
    }

    pub fn is_zero(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn torsion(&self) -> Self {
        Self {
            rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn largest_factor(&self) -> Option<&BigInt> {
        self.invariant_factors.last()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders = self.invariant_factors.clone();
        orders.extend(other.invariant_factors.iter().cloned());
        let n = orders.len();
        let mut g = group_from_presentation(&IntMatrix::diagonal(n, n, &orders));
        g.rank += self.rank + other.rank;
        g
    }

    /// Relation lattice generators (columns) in `ℤ^ngens`.
    pub fn relations(&self) -> Vec<Vec<BigInt>> {
        let m = self.ngens();
        self.invariant_factors
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut v = vec![BigInt::zero(); m];
                v[self.rank + i] = d.clone();
                v
            })
            .collect()
    }

    /// The `i`th standard generator.
    pub fn generator(&self, i: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.ngens()];
        v[i] = BigInt::one();
        v
    }

    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        (0..self.ngens()).map(|i| self.generator(i)).collect()
    }

    /// Reduces torsion coordinates into `[0, dᵢ)`.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter()
            .enumerate()
            .map(|(i, v)| match i.checked_sub(self.rank) {
                Some(t) => v.mod_floor(&self.invariant_factors[t]),
                None => v.clone(),
            })
            .collect()
    }

    fn with_relations(&self, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let mut all = gens.to_vec();
        all.extend(self.relations());
        all
    }

    /// Whether `x` lies in the subgroup generated by `gens`.
    pub fn subgroup_contains(&self, gens: &[Vec<BigInt>], x: &[BigInt]) -> bool {
        lattice_contains(self.ngens(), &self.with_relations(gens), x)
    }

    /// Whether two generating sets span the same subgroup.
    pub fn same_subgroup(&self, a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> bool {
        lattices_equal(self.ngens(), &self.with_relations(a), &self.with_relations(b))
    }

    /// Isomorphism type of the subgroup generated by `gens`.
    pub fn subgroup_type(&self, gens: &[Vec<BigInt>]) -> Self {
        let m = self.ngens();
        let basis = lattice_basis(m, &self.with_relations(gens));
        if basis.is_empty() {
            return Self::zero();
        }
        let b = IntMatrix::from_columns(m, &basis);
        // Express the relations in the lattice basis; the subgroup is the
        // lattice modulo them.
        let coords: Vec<Vec<BigInt>> = self
            .relations()
            .iter()
            .map(|r| solve_integer(&b, r).expect("relations lie in the lattice"))
            .collect();
        group_from_presentation(&IntMatrix::from_columns(basis.len(), &coords))
    }

    /// Isomorphism type of the quotient by the subgroup generated by `gens`.
    pub fn quotient_type(&self, gens: &[Vec<BigInt>]) -> Self {
        let m = self.ngens();
        group_from_presentation(&IntMatrix::from_columns(m, &self.with_relations(gens)))
    }

    /// Whether some surjection `g ↠ self` exists.
    pub fn is_quotient_of(&self, g: &Self) -> bool {
        if self.rank > g.rank {
            return false;
        }
        primary_counts_dominated(self, g, self.rank, g.rank)
    }

    /// Whether `self` is isomorphic to a subgroup of `g`.
    pub fn embeds_in(&self, g: &Self) -> bool {
        self.rank <= g.rank && primary_counts_dominated(self, g, 0, 0)
    }

    /// All subgroups whose echelon generators have pivots in `1..=bound`
    /// and free entries in `[−bound, bound]`. Each comes with a flag telling
    /// whether its generators touch that box; a touching subgroup may belong
    /// to a family that continues past the bound.
    ///
    /// Every subgroup of a finite group is found once `bound` reaches its
    /// largest invariant factor; for free parts the box is a genuine cut-off.
    pub fn subgroups(&self, bound: u64) -> Vec<EnumeratedSubgroup> {
        let m = self.ngens();
        let rel = self.relations();
        let mut out = Vec::new();
        for mask in 0u32..(1 << m) {
            let pivots: Vec<usize> = (0..m).filter(|&c| mask & (1 << c) != 0).collect();
            let mut rows: Vec<Vec<BigInt>> = Vec::new();
            echelon_rows(m, &pivots, 0, bound, &mut rows, &mut |rows| {
                if !rel.iter().all(|r| lattice_contains(m, rows, r)) {
                    return;
                }
                let b = bound as i64;
                let at_bound = rows.iter().enumerate().any(|(i, row)| {
                    let p = pivots[i];
                    row[p] == BigInt::from(b)
                        || row
                            .iter()
                            .enumerate()
                            .any(|(c, x)| c > p && !pivots.contains(&c) && x.abs() == BigInt::from(b))
                });
                out.push(EnumeratedSubgroup {
                    generators: rows.to_vec(),
                    at_bound,
                });
            });
        }
        out
    }
}

/// Subgroup produced by [`FgAbelianGroup::subgroups`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedSubgroup {
    pub generators: Vec<Vec<BigInt>>,
    pub at_bound: bool,
}

/// Row `depth` of an echelon basis with pivot columns `pivots`. Entries in
/// later pivot columns are reduced modulo that pivot, which the caller
/// cannot know yet, so they are filled in `[0, bound)` and filtered after.
fn echelon_rows(
    m: usize,
    pivots: &[usize],
    depth: usize,
    bound: u64,
    rows: &mut Vec<Vec<BigInt>>,
    visit: &mut dyn FnMut(&[Vec<BigInt>]),
) {
    if depth == pivots.len() {
        // Enforce reduction above pivots: 0 ≤ entry < pivot.
        let reduced = (0..rows.len()).all(|i| {
            (i + 1..rows.len()).all(|k| {
                let c = pivots[k];
                !rows[i][c].is_negative() && rows[i][c] < rows[k][c]
            })
        });
        if reduced {
            visit(rows);
        }
        return;
    }
    let p = pivots[depth];
    let b = bound as i64;
    let free_cols: Vec<usize> = (p + 1..m).collect();
    let ranges: Vec<(i64, i64)> = free_cols
        .iter()
        .map(|c| if pivots.contains(c) { (0, b - 1) } else { (-b, b) })
        .collect();
    for h in 1..=b {
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let mut row = vec![BigInt::zero(); m];
            row[p] = BigInt::from(h);
            for (k, &c) in free_cols.iter().enumerate() {
                row[c] = BigInt::from(idx[k]);
            }
            rows.push(row);
            echelon_rows(m, pivots, depth + 1, bound, rows, visit);
            rows.pop();
            // Odometer over the free entries.
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                if idx[k] < ranges[k].1 {
                    idx[k] += 1;
                    break;
                }
                idx[k] = ranges[k].0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
}

/// Prime-power factorization by trial division.
fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// For every prime `p` and `k ≥ 1`: `extra_h + #{factors of h divisible by p^k}`
/// is at most `extra_g + #{factors of g divisible by p^k}`.
fn primary_counts_dominated(
    h: &FgAbelianGroup,
    g: &FgAbelianGroup,
    extra_h: usize,
    extra_g: usize,
) -> bool {
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    for d in &h.invariant_factors {
        for (p, e) in factorize(d) {
            match primes.iter_mut().find(|(q, _)| *q == p) {
                Some(entry) => entry.1 = entry.1.max(e),
                None => primes.push((p, e)),
            }
        }
    }
    primes.iter().all(|(p, emax)| {
        (1..=*emax).all(|k| {
            let pk = p.pow(k);
            let count = |x: &FgAbelianGroup| {
                x.invariant_factors
                    .iter()
                    .filter(|d| d.is_multiple_of(&pk))
                    .count()
            };
            extra_h + count(h) <= extra_g + count(g)
        })
    })
}

/// Canonical form of `ℤ^rows / M·ℤ^cols`.
pub fn group_from_presentation(m: &IntMatrix) -> FgAbelianGroup {
    let s = smith(m);
    let diag = s.diagonal();
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    FgAbelianGroup {
        rank: m.rows() - nonzero,
        invariant_factors: diag
            .into_iter()
            .filter(|d| d > &BigInt::one())
            .collect(),
    }
}

/// All invariant-factor lists of abelian groups of order `n`.
pub fn groups_of_order(n: u64) -> Vec<FgAbelianGroup> {
    fn rec(rem: u64, prev: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rem == 1 {
            out.push(acc.clone());
            return;
        }
        for d in 2..=rem {
            if rem % d == 0 && d % prev == 0 {
                acc.push(d);
                rec(rem / d, d, acc, out);
                acc.pop();
            }
        }
    }
    let mut lists = Vec::new();
    if n >= 1 {
        rec(n, 1, &mut Vec::new(), &mut lists);
    }
    lists
        .into_iter()
        .map(|l| FgAbelianGroup {
            rank: 0,
            invariant_factors: l.into_iter().map(BigInt::from).collect(),
        })
        .collect()
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z_{d}"));
        }
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for FgAbelianGroup {
    type Err = KtheoryError;

    /// Accepts sums such as `Z^2 + Z_3 + Z_6`, `0`, or `Z+Z_2+Z_3` (any
    /// cyclic orders; the result is canonicalized). `⊕` also works as the
    /// separator and `ℤ` in place of `Z`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KtheoryError::Parse(format!("cannot read `{s}` as an abelian group"));
        let norm = s.replace('⊕', "+").replace('ℤ', "Z");
        let mut rank = 0usize;
        let mut orders = Vec::new();
        for term in norm.split('+').map(str::trim) {
            if term == "0" {
                continue;
            }
            let rest = term.strip_prefix('Z').ok_or_else(bad)?;
            if rest.is_empty() {
                rank += 1;
            } else if let Some(e) = rest.strip_prefix('^') {
                rank += e.trim().parse::<usize>().map_err(|_| bad())?;
            } else if let Some(o) = rest.strip_prefix('_') {
                let o = o.trim().parse::<u64>().map_err(|_| bad())?;
                if o == 0 {
                    return Err(bad());
                }
                orders.push(o);
            } else {
                return Err(bad());
            }
        }
        Ok(Self::from_orders(rank, &orders))
    }
}

impl Serialize for FgAbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FgAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbelianGroup {
        s.parse().unwrap()
    }

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn presentation_examples() {
        let m = |rows: &[Vec<i64>]| group_from_presentation(&IntMatrix::from_rows(rows));
        assert_eq!(m(&[vec![2, 0], vec![0, 0]]), g("Z + Z_2"));
        assert_eq!(m(&[vec![2, 0], vec![0, 3]]), g("Z_6"));
        assert_eq!(group_from_presentation(&IntMatrix::zeros(3, 0)), g("Z^3"));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(g("Z_2 + Z_3").to_string(), "Z_6");
        assert_eq!(g("Z^2 ⊕ Z_2 ⊕ Z_4").to_string(), "Z^2 + Z_2 + Z_4");
        assert_eq!(g("0"), FgAbelianGroup::zero());
        assert_eq!(g("Z_1"), FgAbelianGroup::zero());
        assert!("Q".parse::<FgAbelianGroup>().is_err());
        assert!("Z_0".parse::<FgAbelianGroup>().is_err());
        assert!(FgAbelianGroup::new(0, v(&[4, 2])).is_err());
        assert!(FgAbelianGroup::new(0, v(&[1])).is_err());
    }

    #[test]
    fn subgroup_and_quotient_types() {
        let z2 = g("Z^2");
        let h = vec![v(&[1, 1])];
        assert_eq!(z2.subgroup_type(&h), g("Z"));
        assert_eq!(z2.quotient_type(&h), g("Z"));
        let h2 = vec![v(&[2, 0]), v(&[0, 3])];
        assert_eq!(z2.quotient_type(&h2), g("Z_6"));
        let t = g("Z_4");
        assert_eq!(t.subgroup_type(&[v(&[2])]), g("Z_2"));
        assert_eq!(t.quotient_type(&[v(&[2])]), g("Z_2"));
        assert!(t.subgroup_contains(&[v(&[2])], &v(&[6])));
        assert!(t.same_subgroup(&[v(&[2])], &[v(&[6])]));
    }

    #[test]
    fn quotient_and_embedding_predicates() {
        assert!(g("Z_5").is_quotient_of(&g("Z")));
        assert!(!g("Z_2 + Z_2").is_quotient_of(&g("Z")));
        assert!(g("Z_2 + Z_2").is_quotient_of(&g("Z + Z_2")));
        assert!(!g("Z_4").is_quotient_of(&g("Z_2")));
        assert!(!g("Z_2").embeds_in(&g("Z^3")));
        assert!(g("Z_2").embeds_in(&g("Z + Z_4")));
        assert!(!g("Z^2").embeds_in(&g("Z + Z_4")));
    }

    #[test]
    fn order_enumeration() {
        let names: Vec<String> = groups_of_order(8).iter().map(|x| x.to_string()).collect();
        assert_eq!(names, vec!["Z_2 + Z_2 + Z_2", "Z_2 + Z_4", "Z_8"]);
        assert_eq!(groups_of_order(1), vec![FgAbelianGroup::zero()]);
        assert_eq!(groups_of_order(12).len(), 2);
    }

    #[test]
    fn subgroup_enumeration() {
        // ℤ_6 has exactly four subgroups.
        assert_eq!(g("Z_6").subgroups(6).len(), 4);
        // ℤ_2 ⊕ ℤ_2 has five.
        assert_eq!(g("Z_2 + Z_2").subgroups(2).len(), 5);
        // ℤ: the zero subgroup and nℤ for n ≤ bound.
        let subs = g("Z").subgroups(5);
        assert_eq!(subs.len(), 6);
        assert_eq!(subs.iter().filter(|s| s.at_bound).count(), 1);
    }
}
