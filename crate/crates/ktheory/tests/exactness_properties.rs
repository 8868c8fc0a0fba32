use cil_ktheory::{check_exact, solve_extension, FgAbelianGroup, GroupHom, IntMatrix};
use proptest::prelude::*;

fn group() -> impl Strategy<Value = FgAbelianGroup> {
    (0usize..=2, prop::collection::vec(prop_oneof![Just(2u64), Just(3), Just(4), Just(6)], 0..=2))
        .prop_map(|(r, orders)| FgAbelianGroup::from_orders(r, &orders))
}

/// At most one torsion factor, keeping the extension search at desk scale.
fn small_group(max_rank: usize) -> impl Strategy<Value = FgAbelianGroup> {
    (0usize..=max_rank, prop::option::of(2u64..=6))
        .prop_map(|(r, o)| FgAbelianGroup::from_orders(r, o.as_slice()))
}

/// A homomorphism between random groups: random integer matrix, then the
/// columns of torsion generators are scaled so they become well defined.
fn hom() -> impl Strategy<Value = GroupHom> {
    (group(), group(), prop::collection::vec(-5i64..=5, 16)).prop_map(|(d, c, entries)| {
        let mut m = IntMatrix::zeros(c.ngens(), d.ngens());
        for i in 0..c.ngens() {
            for j in 0..d.ngens() {
                let mut v = entries[(i * 4 + j) % 16];
                if j >= d.rank() {
                    // Torsion generator of order dj: free targets vanish and a
                    // target of order di needs a multiple of di / gcd(di, dj).
                    if i < c.rank() {
                        v = 0;
                    } else {
                        let dj: i64 = d.invariant_factors()[j - d.rank()].to_string().parse().unwrap();
                        let di: i64 = c.invariant_factors()[i - c.rank()].to_string().parse().unwrap();
                        let step = di / num_integer::gcd(di, dj);
                        v *= step;
                    }
                }
                m.set(i, j, v.into());
            }
        }
        GroupHom::new(d, c, m).expect("constructed to be well defined")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_and_cokernel_sequence_is_exact(f in hom()) {
        let zero = FgAbelianGroup::zero();
        let ker = f.kernel();
        let coker = f.cokernel();
        let nodes = [zero.clone(), ker.clone(), f.domain().clone(), f.codomain().clone(), coker.clone(), zero.clone()];
        let arrows = [
            GroupHom::zero(zero.clone(), ker),
            f.kernel_inclusion(),
            f.clone(),
            f.cokernel_projection(),
            GroupHom::zero(coker, zero),
        ];
        prop_assert!(check_exact(&nodes, &arrows).unwrap().is_exact());
    }

    #[test]
    fn split_extension_is_always_found(a in small_group(2), c in small_group(1)) {
        let xs = solve_extension(&a, &c, 12).unwrap();
        prop_assert!(xs.contains(&a.direct_sum(&c)));
        for x in &xs {
            prop_assert_eq!(x.rank(), a.rank() + c.rank());
        }
    }

    #[test]
    fn first_isomorphism_theorem(f in hom()) {
        let q = f.domain().quotient_type(&f.kernel_generators());
        prop_assert_eq!(q, f.image());
    }
}
