//! Homomorphisms between finitely generated abelian groups and exactness.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::group::FgAbelianGroup;
use crate::matrix::{integer_kernel, lattices_equal, IntMatrix};
use crate::KtheoryError;

/// A homomorphism given by its matrix on standard generators: column `j` is
/// the image of domain generator `j`. Torsion rows are stored reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    domain: FgAbelianGroup,
    codomain: FgAbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(
        domain: FgAbelianGroup,
        codomain: FgAbelianGroup,
        matrix: IntMatrix,
    ) -> Result<Self, KtheoryError> {
        if matrix.rows() != codomain.ngens() || matrix.cols() != domain.ngens() {
            return Err(KtheoryError::IllDefinedHom(format!(
                "matrix is {}×{} but {} → {} needs {}×{}",
                matrix.rows(),
                matrix.cols(),
                domain,
                codomain,
                codomain.ngens(),
                domain.ngens()
            )));
        }
        let mut reduced = IntMatrix::zeros(matrix.rows(), matrix.cols());
        for j in 0..matrix.cols() {
            let col = codomain.reduce(&matrix.column(j));
            for (i, x) in col.into_iter().enumerate() {
                reduced.set(i, j, x);
            }
        }
        // Each torsion generator of order d must go to an element killed by d.
        for (t, d) in domain.invariant_factors().iter().enumerate() {
            let j = domain.rank() + t;
            let scaled: Vec<BigInt> = reduced.column(j).iter().map(|x| x * d).collect();
            if !codomain.subgroup_contains(&[], &scaled) {
                return Err(KtheoryError::IllDefinedHom(format!(
                    "generator {j} has order {d} but its image does not"
                )));
            }
        }
        Ok(Self {
            domain,
            codomain,
            matrix: reduced,
        })
    }

    pub fn zero(domain: FgAbelianGroup, codomain: FgAbelianGroup) -> Self {
        let matrix = IntMatrix::zeros(codomain.ngens(), domain.ngens());
        Self {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn identity(g: FgAbelianGroup) -> Self {
        let matrix = IntMatrix::identity(g.ngens());
        Self {
            domain: g.clone(),
            codomain: g,
            matrix,
        }
    }

    pub fn domain(&self) -> &FgAbelianGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FgAbelianGroup {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.codomain.reduce(&self.matrix.mul_vec(x))
    }

    /// Generators of the image, in codomain coordinates.
    pub fn image_generators(&self) -> Vec<Vec<BigInt>> {
        self.matrix.columns()
    }

    /// Generators of the kernel, in domain coordinates.
    pub fn kernel_generators(&self) -> Vec<Vec<BigInt>> {
        // x ∈ ker ⇔ M·x ∈ relation lattice ⇔ [M | −R]·(x, y) = 0 for some y.
        let n = self.domain.ngens();
        let rel = self.codomain.relations();
        let mut neg = IntMatrix::zeros(self.codomain.ngens(), rel.len());
        for (j, r) in rel.iter().enumerate() {
            for (i, x) in r.iter().enumerate() {
                neg.set(i, j, -x);
            }
        }
        integer_kernel(&self.matrix.hcat(&neg))
            .into_iter()
            .map(|v| v[..n].to_vec())
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect()
    }

    pub fn kernel(&self) -> FgAbelianGroup {
        self.domain.subgroup_type(&self.kernel_generators())
    }

    pub fn image(&self) -> FgAbelianGroup {
        self.codomain.subgroup_type(&self.image_generators())
    }

    pub fn cokernel(&self) -> FgAbelianGroup {
        self.codomain.quotient_type(&self.image_generators())
    }

    pub fn is_zero(&self) -> bool {
        self.image().is_zero()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_zero()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GroupHom) -> Result<GroupHom, KtheoryError> {
        if first.codomain != self.domain {
            return Err(KtheoryError::IllDefinedHom(
                "composition of non-matching maps".into(),
            ));
        }
        GroupHom::new(
            first.domain.clone(),
            self.codomain.clone(),
            self.matrix.mul(&first.matrix),
        )
    }

    /// Inclusion of the kernel, presented on its own canonical generators.
    pub fn kernel_inclusion(&self) -> GroupHom {
        inclusion_of(&self.domain, &self.kernel_generators())
    }

    /// Projection onto the cokernel in canonical coordinates.
    pub fn cokernel_projection(&self) -> GroupHom {
        projection_onto_quotient(&self.codomain, &self.image_generators())
    }
}

/// Inclusion `H ↪ g` of the subgroup generated by `gens`, with `H` in
/// canonical form.
pub fn inclusion_of(g: &FgAbelianGroup, gens: &[Vec<BigInt>]) -> GroupHom {
    use crate::matrix::{lattice_basis, smith, solve_integer};
    let m = g.ngens();
    let mut all = gens.to_vec();
    all.extend(g.relations());
    let basis = lattice_basis(m, &all);
    let h = g.subgroup_type(gens);
    if basis.is_empty() {
        return GroupHom::zero(h, g.clone());
    }
    // Relations of H in basis coordinates: H = ℤ^b / im C. With
    // U·C·V = D, the canonical generators of H are the rows of U acting on
    // basis coordinates: generator i of H is basis · U⁻¹ column i.
    let b = IntMatrix::from_columns(m, &basis);
    let coords: Vec<Vec<BigInt>> = g
        .relations()
        .iter()
        .map(|r| solve_integer(&b, r).expect("relations lie in the lattice"))
        .collect();
    let c = IntMatrix::from_columns(basis.len(), &coords);
    let s = smith(&c);
    let diag = s.diagonal();
    // Canonical order: free generators are the rows of U with zero diagonal,
    // torsion ones those with dᵢ ≥ 2, in increasing order of dᵢ.
    let mut free_idx = Vec::new();
    let mut tors_idx = Vec::new();
    for i in 0..basis.len() {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            free_idx.push(i);
        } else if d > BigInt::from(1) {
            tors_idx.push(i);
        }
    }
    let order: Vec<usize> = free_idx.into_iter().chain(tors_idx).collect();
    let images: Vec<Vec<BigInt>> = order
        .iter()
        .map(|&i| b.mul_vec(&s.u_inv.column(i)))
        .collect();
    GroupHom::new(h, g.clone(), IntMatrix::from_columns(m, &images))
        .expect("inclusion is well defined")
}

/// Projection `g ↠ g / ⟨gens⟩` with the quotient in canonical form.
pub fn projection_onto_quotient(g: &FgAbelianGroup, gens: &[Vec<BigInt>]) -> GroupHom {
    use crate::matrix::smith;
    let m = g.ngens();
    let mut all = gens.to_vec();
    all.extend(g.relations());
    let q = g.quotient_type(gens);
    if m == 0 {
        return GroupHom::zero(g.clone(), q);
    }
    // U·P·V = D: coordinates U·x live in ⊕ ℤ/dᵢ.
    let p = IntMatrix::from_columns(m, &all);
    let s = smith(&p);
    let diag = s.diagonal();
    let mut free_rows = Vec::new();
    let mut tors_rows = Vec::new();
    for i in 0..m {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            free_rows.push(i);
        } else if d > BigInt::from(1) {
            tors_rows.push(i);
        }
    }
    let rows: Vec<Vec<BigInt>> = free_rows
        .into_iter()
        .chain(tors_rows)
        .map(|i| s.u.row(i))
        .collect();
    let mut mat = IntMatrix::zeros(q.ngens(), m);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            mat.set(i, j, x.clone());
        }
    }
    GroupHom::new(g.clone(), q, mat).expect("projection is well defined")
}

/// Exactness verdict at one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeExactness {
    pub node: usize,
    pub exact: bool,
    pub image: FgAbelianGroup,
    pub kernel: FgAbelianGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub nodes: Vec<NodeExactness>,
    pub first_failure: Option<usize>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `im(arrow k−1) = ker(arrow k)` at each node.
///
/// With as many arrows as nodes the sequence is read as a cycle
/// (`arrows[k] : nodes[k] → nodes[k+1 mod n]`) and every node is checked;
/// with one arrow fewer it is a chain and only interior nodes are checked.
pub fn check_exact(
    nodes: &[FgAbelianGroup],
    arrows: &[GroupHom],
) -> Result<ExactnessReport, KtheoryError> {
    let n = nodes.len();
    let cyclic = arrows.len() == n;
    if !cyclic && arrows.len() + 1 != n {
        return Err(KtheoryError::InvalidSequence(format!(
            "{} nodes need {} or {} arrows, got {}",
            n,
            n.saturating_sub(1),
            n,
            arrows.len()
        )));
    }
    for (k, f) in arrows.iter().enumerate() {
        let (src, dst) = (&nodes[k], &nodes[(k + 1) % n]);
        if f.domain() != src || f.codomain() != dst {
            return Err(KtheoryError::IllDefinedHom(format!(
                "arrow {k} is {} → {} but the nodes are {} → {}",
                f.domain(),
                f.codomain(),
                src,
                dst
            )));
        }
    }
    let checked: Vec<usize> = if cyclic { (0..n).collect() } else { (1..n.saturating_sub(1)).collect() };
    let mut report = ExactnessReport {
        nodes: Vec::new(),
        first_failure: None,
    };
    for k in checked {
        let incoming = &arrows[(k + n - 1) % n];
        let outgoing = &arrows[k];
        let g = &nodes[k];
        let im = incoming.image_generators();
        let ker = outgoing.kernel_generators();
        let mut a = im.clone();
        a.extend(g.relations());
        let mut b = ker.clone();
        b.extend(g.relations());
        let exact = lattices_equal(g.ngens(), &a, &b);
        if !exact && report.first_failure.is_none() {
            report.first_failure = Some(k);
        }
        report.nodes.push(NodeExactness {
            node: k,
            exact,
            image: g.subgroup_type(&im),
            kernel: g.subgroup_type(&ker),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbelianGroup {
        s.parse().unwrap()
    }

    fn hom(dom: &str, cod: &str, rows: &[Vec<i64>]) -> GroupHom {
        let (d, c) = (g(dom), g(cod));
        let m = if rows.is_empty() {
            IntMatrix::zeros(c.ngens(), d.ngens())
        } else {
            IntMatrix::from_rows(rows)
        };
        GroupHom::new(d, c, m).unwrap()
    }

    #[test]
    fn kernel_image_cokernel_examples() {
        let times3 = hom("Z", "Z", &[vec![3]]);
        assert_eq!(times3.kernel(), g("0"));
        assert_eq!(times3.cokernel(), g("Z_3"));
        let zero = hom("Z^2", "Z", &[vec![0, 0]]);
        assert_eq!(zero.kernel(), g("Z^2"));
        assert_eq!(zero.cokernel(), g("Z"));
        let proj = hom("Z^3", "Z^2", &[vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(proj.kernel(), g("Z"));
        assert_eq!(proj.cokernel(), g("0"));
        assert_eq!(proj.image(), g("Z^2"));
    }

    #[test]
    fn ill_defined_maps_are_rejected() {
        // ℤ₂ → ℤ sending the generator to 1 is not a homomorphism.
        assert!(matches!(
            GroupHom::new(g("Z_2"), g("Z"), IntMatrix::from_rows(&[vec![1]])),
            Err(KtheoryError::IllDefinedHom(_))
        ));
        // ℤ₂ → ℤ₄, 1 ↦ 2 is fine; 1 ↦ 1 is not.
        assert!(GroupHom::new(g("Z_2"), g("Z_4"), IntMatrix::from_rows(&[vec![2]])).is_ok());
        assert!(GroupHom::new(g("Z_2"), g("Z_4"), IntMatrix::from_rows(&[vec![1]])).is_err());
        assert!(GroupHom::new(g("Z"), g("Z"), IntMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn textbook_short_exact_sequence() {
        let nodes = [g("0"), g("Z"), g("Z"), g("Z_5"), g("0")];
        let arrows = [
            hom("0", "Z", &[]),
            hom("Z", "Z", &[vec![5]]),
            hom("Z", "Z_5", &[vec![1]]),
            hom("Z_5", "0", &[]),
        ];
        let r = check_exact(&nodes, &arrows).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.nodes.len(), 3);
    }

    #[test]
    fn identities_fail_in_the_middle() {
        let nodes = [g("0"), g("Z"), g("Z"), g("Z"), g("0")];
        let arrows = [
            hom("0", "Z", &[]),
            GroupHom::identity(g("Z")),
            GroupHom::identity(g("Z")),
            hom("Z", "0", &[]),
        ];
        let r = check_exact(&nodes, &arrows).unwrap();
        assert_eq!(r.first_failure, Some(2));
    }

    #[test]
    fn all_zero_sequence_is_exact() {
        let nodes = vec![g("0"); 6];
        let arrows: Vec<GroupHom> = (0..6).map(|_| GroupHom::zero(g("0"), g("0"))).collect();
        assert!(check_exact(&nodes, &arrows).unwrap().is_exact());
    }

    #[test]
    fn kernel_inclusion_and_cokernel_projection() {
        let f = hom("Z^2 + Z_4", "Z + Z_6", &[vec![2, 0, 0], vec![1, 3, 3]]);
        let inc = f.kernel_inclusion();
        assert_eq!(inc.domain(), &f.kernel());
        assert!(inc.is_injective());
        assert!(f.compose(&inc).unwrap().is_zero());
        let proj = f.cokernel_projection();
        assert_eq!(proj.codomain(), &f.cokernel());
        assert!(proj.is_surjective());
        assert!(proj.compose(&f).unwrap().is_zero());
        let nodes = [g("0"), f.kernel(), f.domain().clone(), f.codomain().clone(), f.cokernel(), g("0")];
        let arrows = [
            GroupHom::zero(g("0"), f.kernel()),
            inc,
            f.clone(),
            proj,
            GroupHom::zero(f.cokernel(), g("0")),
        ];
        assert!(check_exact(&nodes, &arrows).unwrap().is_exact());
    }
}
