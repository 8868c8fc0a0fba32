//! Prefilled sequence systems for the Toeplitz-type algebras on the torus
//! and their crossed products.
//!
//! Label glossary: `Edag ⊂ Adag` is the ideal/algebra pair on the half
//! plane, `Edia ⊂ Adia` its crossed-product version, `K ⊂ E_A ⊂ A` the
//! compacts inside the ideal inside the full algebra.

use crate::sixterm::{Constraint, Node, SequenceSystem, SixTermSequence};
use crate::KtheoryError;

pub const BUILTIN_NAMES: [&str; 5] = ["adagger", "adiamond", "afull_mod_k", "efull", "afull"];

fn kills(seq: SixTermSequence, arrow: usize, gens: &[usize]) -> SixTermSequence {
    gens.iter().fold(seq, |s, &g| {
        s.constrain(arrow, Constraint::KillsGenerator { generator: g })
    })
}

fn dagger_sequence() -> SixTermSequence {
    let seq = SixTermSequence::new(
        "Edag -> Adag -> Adag/Edag",
        vec![
            Node::known("K0(Edag)", "0"),
            Node::unknown("K0(Adag)"),
            Node::known("K0(Adag/Edag)", "Z^2"),
            Node::known("K1(Edag)", "Z"),
            Node::unknown("K1(Adag)"),
            Node::known("K1(Adag/Edag)", "Z^2"),
        ],
    )
    .cite(
        "K0(Edag) = 0, K1(Edag) = Z, both K-groups of Adag/Edag are Z^2, \
         and the exponential map kills the class of the identity",
    );
    kills(seq, 2, &[0])
}

fn diamond_sequence() -> SixTermSequence {
    let seq = SixTermSequence::new(
        "Edia -> Adia -> Adia/Edia",
        vec![
            Node::known("K0(Edia)", "Z"),
            Node::unknown("K0(Adia)"),
            Node::known("K0(Adia/Edia)", "Z^4"),
            Node::known("K1(Edia)", "Z"),
            Node::unknown("K1(Adia)"),
            Node::known("K1(Adia/Edia)", "Z^4"),
        ],
    )
    .constrain(5, Constraint::Surjective)
    .cite(
        "both K-groups of Edia are Z, both of Adia/Edia are Z^4, the index map \
         is onto (an index-one operator exists) and the exponential map kills \
         the first two generators",
    );
    kills(seq, 2, &[0, 1])
}

/// Crossed-product sequence for `Adia = Adag ⋊ ℤ`. The automorphism is
/// homotopic to the identity, so `id − α⁻¹` induces zero, and the unit
/// class spans a direct summand of `K0(Adia)`.
fn crossed_product_sequence() -> SixTermSequence {
    SixTermSequence::new(
        "crossed product Adag x Z",
        vec![
            Node::unknown("K0(Adag)"),
            Node::unknown("K0(Adag)"),
            Node::unknown("K0(Adia)"),
            Node::unknown("K1(Adag)"),
            Node::unknown("K1(Adag)"),
            Node::unknown("K1(Adia)"),
        ],
    )
    .label_arrow(0, "id - alpha^-1 (K0)")
    .label_arrow(1, "i0")
    .label_arrow(2, "delta0")
    .label_arrow(3, "id - alpha^-1 (K1)")
    .label_arrow(4, "i1")
    .label_arrow(5, "delta1")
    .constrain(0, Constraint::Zero)
    .constrain(3, Constraint::Zero)
    .constrain(1, Constraint::ImageDirectSummand)
    .cite(
        "the shift automorphism is homotopic to the identity, so id - alpha^-1 \
         induces zero on K-theory; the unit class gives a direct summand of K0(Adia)",
    )
}

fn quotient_by_compacts_sequence() -> SixTermSequence {
    let seq = SixTermSequence::new(
        "E_A/K -> A/K -> A/E",
        vec![
            Node::known("K0(E_A/K)", "Z^2"),
            Node::unknown("K0(A/K)"),
            Node::known("K0(A/E)", "Z^6"),
            Node::known("K1(E_A/K)", "Z^2"),
            Node::unknown("K1(A/K)"),
            Node::known("K1(A/E)", "Z^6"),
        ],
    )
    .constrain(5, Constraint::Surjective)
    .constrain(2, Constraint::ImageContains { element: vec![1, 1] })
    .cite(
        "both K-groups of E_A/K are Z^2, both of A/E are Z^6, the index map is \
         onto, the exponential map kills three generators and its image \
         contains (1,1)",
    );
    kills(seq, 2, &[0, 1, 2])
}

fn ideal_sequence() -> SixTermSequence {
    let seq = SixTermSequence::new(
        "E_A -> A -> A/E",
        vec![
            Node::known("K0(E_A)", "Z^2"),
            Node::unknown("K0(A)"),
            Node::known("K0(A/E)", "Z^6"),
            Node::known("K1(E_A)", "Z"),
            Node::unknown("K1(A)"),
            Node::known("K1(A/E)", "Z^6"),
        ],
    )
    .constrain(5, Constraint::Surjective)
    .cite(
        "K0(E_A) = Z^2, K1(E_A) = Z, both K-groups of A/E are Z^6, the index map \
         is onto and the exponential map kills three generators",
    );
    kills(seq, 2, &[0, 1, 2])
}

fn compacts_in_ideal_sequence() -> SixTermSequence {
    SixTermSequence::new(
        "K -> E_A -> E_A/K",
        vec![
            Node::known("K0(K)", "Z"),
            Node::known("K0(E_A)", "Z^2"),
            Node::known("K0(E_A/K)", "Z^2"),
            Node::known("K1(K)", "0"),
            Node::known("K1(E_A)", "Z"),
            Node::known("K1(E_A/K)", "Z^2"),
        ],
    )
    .cite(
        "K0(K) = Z with generator a rank-one projection, K1(K) = 0; exactness \
         forces the index map onto K0(K), matching an index-one operator",
    )
}

/// Compacts inside the full algebra. The index map is onto because the
/// operator with symbol `σ_T` has index one.
fn compacts_in_algebra_sequence() -> SixTermSequence {
    SixTermSequence::new(
        "K -> A -> A/K",
        vec![
            Node::known("K0(K)", "Z"),
            Node::unknown("K0(A)"),
            Node::unknown("K0(A/K)"),
            Node::known("K1(K)", "0"),
            Node::unknown("K1(A)"),
            Node::unknown("K1(A/K)"),
        ],
    )
    .constrain(5, Constraint::Surjective)
    .cite("the operator with symbol sigma_T has Fredholm index 1, so the index map is onto K0(K)")
}

fn system(name: &str, citation: &str, sequences: Vec<SixTermSequence>) -> SequenceSystem {
    SequenceSystem {
        name: name.into(),
        citation: citation.into(),
        sequences,
    }
}

/// Looks up a builtin system by name.
pub fn builtin_ktheory_scenario(name: &str) -> Result<SequenceSystem, KtheoryError> {
    Ok(match name {
        "adagger" => system(
            "adagger",
            "K-theory of Adag: (Z^2, Z^3) if the exponential map vanishes, \
             otherwise (Z, Z^2 + Z_eta)",
            vec![dagger_sequence()],
        ),
        "adiamond" => system(
            "adiamond",
            "K-theory of Adia = Adag x Z: combining the ideal sequences with the \
             crossed-product sequence forces eta = mu = 1, so K0(Adag) = Z, \
             K1(Adag) = Z^2 and K0(Adia) = K1(Adia) = Z^3",
            vec![
                diamond_sequence(),
                dagger_sequence(),
                crossed_product_sequence(),
            ],
        ),
        "afull_mod_k" => system(
            "afull_mod_k",
            "K-theory of A/K before the index argument: (Z^5, Z^5) or \
             (Z^4, Z^4 + Z_nu) with nu undetermined",
            vec![quotient_by_compacts_sequence()],
        ),
        "efull" => system(
            "efull",
            "the sequence of K inside E_A is exact only if the index map is onto K0(K)",
            vec![compacts_in_ideal_sequence()],
        ),
        "afull" => system(
            "afull",
            "K0(A) = K0(A/K) = Z^5, K1(A) = Z^4, K1(A/K) = Z^5",
            vec![
                quotient_by_compacts_sequence(),
                ideal_sequence(),
                compacts_in_ideal_sequence(),
                compacts_in_algebra_sequence(),
            ],
        ),
        other => return Err(KtheoryError::UnknownScenario(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in BUILTIN_NAMES {
            let s = builtin_ktheory_scenario(name).unwrap();
            assert_eq!(s.name, name);
            assert!(!s.citation.is_empty());
            assert!(s.sequences.iter().all(|q| !q.citation.is_empty()));
        }
        assert!(matches!(
            builtin_ktheory_scenario("aplus"),
            Err(KtheoryError::UnknownScenario(_))
        ));
    }

    #[test]
    fn dagger_sequence_shape() {
        let s = builtin_ktheory_scenario("adagger").unwrap();
        let seq = &s.sequences[0];
        assert_eq!(seq.nodes[0].group, Some("0".parse().unwrap()));
        assert_eq!(seq.nodes[3].group, Some("Z".parse().unwrap()));
        assert_eq!(s.unknown_labels(), vec!["K0(Adag)", "K1(Adag)"]);
    }
}
