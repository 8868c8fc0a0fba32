//! Text format for sequence systems.
//!
//! ```toml
//! name = "example"
//! citation = "optional free text"
//!
//! [[sequence]]
//! name = "ideal -> algebra -> quotient"
//! nodes = [
//!   { label = "K0(I)", group = "0" },
//!   { label = "K0(A)" },                 # unknown
//!   { label = "K0(A/I)", group = "Z^2" },
//!   { label = "K1(I)", group = "Z" },
//!   { label = "K1(A)" },
//!   { label = "K1(A/I)", group = "Z^2" },
//! ]
//!
//! [[sequence.arrow]]
//! index = 2                              # arrow from node 2 to node 3
//! label = "delta0"                       # optional
//! constraints = [{ kind = "kills_generator", generator = 0 }]
//! map = [[0, 1]]                         # optional, codomain rows
//! ```
//!
//! Constraint kinds: `zero`, `surjective`, `injective`,
//! `kills_generator` (with `generator`), `image_contains` (with
//! `element`) and `image_direct_summand`. Arrows not listed keep the
//! labels `i0 p0 delta0 i1 p1 delta1` and carry no constraints.

use serde::{Deserialize, Serialize};

use crate::sixterm::{Arrow, Constraint, Node, SequenceSystem, SixTermSequence, DEFAULT_ARROW_LABELS};
use crate::KtheoryError;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSystem {
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    citation: String,
    sequence: Vec<RawSequence>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSequence {
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    citation: String,
    nodes: Vec<Node>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    arrow: Vec<RawArrow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawArrow {
    index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    map: Option<Vec<Vec<i64>>>,
}

fn from_raw(raw: RawSystem) -> Result<SequenceSystem, KtheoryError> {
    let mut sequences = Vec::new();
    for rs in raw.sequence {
        if rs.nodes.len() != 6 {
            return Err(KtheoryError::InvalidSequence(format!(
                "sequence `{}` lists {} nodes; six are needed",
                rs.name,
                rs.nodes.len()
            )));
        }
        let mut seq = SixTermSequence::new(&rs.name, rs.nodes);
        seq.citation = rs.citation;
        for ra in rs.arrow {
            if ra.index >= 6 {
                return Err(KtheoryError::InvalidSequence(format!(
                    "sequence `{}` has an arrow with index {}; indices run 0 to 5",
                    seq.name, ra.index
                )));
            }
            let a: &mut Arrow = &mut seq.arrows[ra.index];
            if let Some(l) = ra.label {
                a.label = l;
            }
            a.constraints.extend(ra.constraints);
            if ra.map.is_some() {
                a.map = ra.map;
            }
        }
        sequences.push(seq);
    }
    Ok(SequenceSystem {
        name: raw.name,
        citation: raw.citation,
        sequences,
    })
}

/// Parses a system from its text form.
pub fn parse_system(text: &str) -> Result<SequenceSystem, KtheoryError> {
    let raw: RawSystem = toml::from_str(text).map_err(|e| KtheoryError::Parse(e.to_string()))?;
    from_raw(raw)
}

/// Reads a system out of an already parsed document; unrelated keys are ignored.
pub fn system_from_value(value: toml::Value) -> Result<SequenceSystem, KtheoryError> {
    let raw: RawSystem = value
        .try_into()
        .map_err(|e: toml::de::Error| KtheoryError::Parse(e.to_string()))?;
    from_raw(raw)
}

/// Text form of a system; [`parse_system`] reads it back unchanged.
pub fn write_system(system: &SequenceSystem) -> String {
    let raw = RawSystem {
        name: system.name.clone(),
        citation: system.citation.clone(),
        sequence: system
            .sequences
            .iter()
            .map(|s| RawSequence {
                name: s.name.clone(),
                citation: s.citation.clone(),
                nodes: s.nodes.clone(),
                arrow: s
                    .arrows
                    .iter()
                    .enumerate()
                    .filter(|(i, a)| {
                        a.label != DEFAULT_ARROW_LABELS[*i] || !a.constraints.is_empty() || a.map.is_some()
                    })
                    .map(|(i, a)| RawArrow {
                        index: i,
                        label: (a.label != DEFAULT_ARROW_LABELS[i]).then(|| a.label.clone()),
                        constraints: a.constraints.clone(),
                        map: a.map.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    toml::to_string(&raw).expect("sequence systems serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{builtin_ktheory_scenario, BUILTIN_NAMES};

    #[test]
    fn builtins_round_trip() {
        for name in BUILTIN_NAMES {
            let sys = builtin_ktheory_scenario(name).unwrap();
            let text = write_system(&sys);
            assert_eq!(parse_system(&text).unwrap(), sys, "{name}:\n{text}");
        }
    }

    #[test]
    fn documented_example_parses() {
        let text = r#"
name = "example"

[[sequence]]
name = "ideal -> algebra -> quotient"
nodes = [
  { label = "K0(I)", group = "0" },
  { label = "K0(A)" },
  { label = "K0(A/I)", group = "Z^2" },
  { label = "K1(I)", group = "Z" },
  { label = "K1(A)" },
  { label = "K1(A/I)", group = "Z^2" },
]

[[sequence.arrow]]
index = 2
constraints = [{ kind = "kills_generator", generator = 0 }]
"#;
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.sequences[0].arrows[2].label, "delta0");
        assert_eq!(
            sys.sequences[0].arrows[2].constraints,
            vec![Constraint::KillsGenerator { generator: 0 }]
        );
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(parse_system("name = 3"), Err(KtheoryError::Parse(_))));
        let five = r#"
name = "x"
[[sequence]]
name = "s"
nodes = [{ label = "a" }, { label = "b" }, { label = "c" }, { label = "d" }, { label = "e" }]
"#;
        assert!(matches!(parse_system(five), Err(KtheoryError::InvalidSequence(_))));
        let bad_group = r#"
name = "x"
[[sequence]]
name = "s"
nodes = [{ label = "a", group = "Q" }, { label = "b" }, { label = "c" }, { label = "d" }, { label = "e" }, { label = "f" }]
"#;
        assert!(matches!(parse_system(bad_group), Err(KtheoryError::Parse(_))));
    }
}
