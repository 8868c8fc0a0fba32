//! Scenario files.
//!
//! A scenario is a small TOML document. Only `kind` and `target` are
//! required; everything under `[parameters]` falls back to the defaults
//! below.
//!
//! ```toml
//! name = "headline"          # optional, defaults to the target name
//! kind = "fedosov"           # fedosov | winding | lattice | groups
//! target = "thm3_8"          # builtin name or an inline table
//!
//! [parameters]
//! grid = 64                  # points per axis, or a list such as [64, 64, 64]
//! scheme = "spectral"        # or "central4"
//! integrality_tol = 1e-6
//! window = 64                # lattice half-width
//! n0 = 0                     # step position of prop3_15
//! bound = 12                 # enumeration bound for group case splits
//!
//! [expected]
//! index = 1                  # fedosov, winding, lattice
//! # groups = { "K0(A)" = "Z^5" }
//! ```
//!
//! Inline targets:
//!
//! - `winding`: `target = { coefficients = [[m, re, im], ...] }`, the loop
//!   `Σ c_m e^{imθ}` sampled on a one-dimensional grid.
//! - `lattice`: the same table, read as the constant-coefficient operator
//!   `Σ c_s Y_s` on `ℓ²(ℤ)`.
//! - `groups`: a sequence system in the format of
//!   [`cil_ktheory::format`], written as a `[target]` table with
//!   `[[target.sequence]]` entries.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use cil_core::fedosov::DEFAULT_INTEGRALITY_TOL;
use cil_core::grid::DiffScheme;
use cil_core::scenarios::ScenarioId;
use cil_core::Complex64;
use cil_ktheory::format::system_from_value;
use cil_ktheory::{FgAbelianGroup, SequenceSystem, BUILTIN_NAMES, DEFAULT_BOUND};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_WINDOW: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fedosov,
    Winding,
    Lattice,
    Groups,
    Verify,
}

impl Kind {
    /// Kinds a scenario file may declare.
    pub const FILE_KINDS: [Kind; 4] = [Kind::Fedosov, Kind::Winding, Kind::Lattice, Kind::Groups];

    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Fedosov => "fedosov",
            Kind::Winding => "winding",
            Kind::Lattice => "lattice",
            Kind::Groups => "groups",
            Kind::Verify => "verify",
        }
    }

    /// Torus dimension used for grid defaults.
    fn grid_dim(&self) -> usize {
        match self {
            Kind::Winding => 1,
            _ => 3,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::FILE_KINDS
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind `{s}`, expected one of fedosov, winding, lattice, groups"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Builtin(String),
    /// `(m, c_m)` pairs.
    Coefficients(Vec<(i64, Complex64)>),
    System(SequenceSystem),
}

impl Target {
    fn describe(&self) -> String {
        match self {
            Target::Builtin(name) => name.clone(),
            Target::Coefficients(_) => "inline".into(),
            Target::System(s) => s.name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub grid: Vec<usize>,
    pub scheme: DiffScheme,
    pub integrality_tol: f64,
    pub window: i64,
    pub n0: i64,
    pub bound: u64,
}

impl Parameters {
    pub fn defaults(kind: Kind) -> Self {
        Self {
            grid: vec![DEFAULT_GRID; kind.grid_dim()],
            scheme: DiffScheme::Spectral,
            integrality_tol: DEFAULT_INTEGRALITY_TOL,
            window: DEFAULT_WINDOW,
            n0: 0,
            bound: DEFAULT_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Index(i64),
    Groups(BTreeMap<String, FgAbelianGroup>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub kind: Kind,
    pub target: Target,
    pub parameters: Parameters,
    pub expected: Option<Expected>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioFileError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ScenarioFileError {
    ScenarioFileError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Names accepted as `target` for each kind.
pub fn builtin_names(kind: Kind) -> Vec<String> {
    match kind {
        Kind::Fedosov => vec!["thm3_8".into(), "sigma_T_blocks(m)".into()],
        Kind::Lattice => ["prop3_15", "mult_jk", "a5_plus_ia6", "b456_identity"]
            .map(String::from)
            .to_vec(),
        Kind::Groups => BUILTIN_NAMES.map(String::from).to_vec(),
        Kind::Winding | Kind::Verify => Vec::new(),
    }
}

/// Checks a builtin target name against the registry of its kind.
pub fn check_builtin(kind: Kind, name: &str) -> Result<(), ScenarioFileError> {
    let ok = match kind {
        Kind::Fedosov => matches!(
            name.parse::<ScenarioId>(),
            Ok(ScenarioId::SigmaT | ScenarioId::SigmaTBlocks(_))
        ),
        Kind::Lattice => matches!(
            name.parse::<ScenarioId>(),
            Ok(ScenarioId::StepToeplitz
                | ScenarioId::MultJk
                | ScenarioId::A5PlusIA6
                | ScenarioId::B456Identity)
        ),
        Kind::Groups => BUILTIN_NAMES.contains(&name),
        Kind::Winding | Kind::Verify => false,
    };
    if ok {
        return Ok(());
    }
    let names = builtin_names(kind);
    Err(invalid(
        "target",
        if names.is_empty() {
            format!("{kind} scenarios take an inline target, not `{name}`")
        } else {
            format!("unknown {kind} builtin `{name}`, expected one of {}", names.join(", "))
        },
    ))
}

impl ScenarioFile {
    /// A builtin scenario with default parameters.
    pub fn builtin(kind: Kind, name: &str) -> Result<Self, ScenarioFileError> {
        check_builtin(kind, name)?;
        Ok(Self {
            name: name.to_string(),
            kind,
            target: Target::Builtin(name.to_string()),
            parameters: Parameters::defaults(kind),
            expected: None,
        })
    }

    pub fn inline(kind: Kind, target: Target) -> Self {
        Self {
            name: target.describe(),
            kind,
            target,
            parameters: Parameters::defaults(kind),
            expected: None,
        }
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile, ScenarioFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioFileError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioFileError> {
    let doc = toml::Table::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        ScenarioFileError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    scenario_from_table(doc)
}

fn scenario_from_table(mut doc: toml::Table) -> Result<ScenarioFile, ScenarioFileError> {
    let kind = match doc.remove("kind") {
        None => return Err(invalid("kind", "missing")),
        Some(toml::Value::String(s)) => s.parse::<Kind>().map_err(|m| invalid("kind", m))?,
        Some(_) => return Err(invalid("kind", "must be a string")),
    };
    let target = match doc.remove("target") {
        None => return Err(invalid("target", format!("missing; a {kind} scenario needs a target"))),
        Some(v) => parse_target(kind, v)?,
    };
    let name = match doc.remove("name") {
        None => target.describe(),
        Some(toml::Value::String(s)) => s,
        Some(_) => return Err(invalid("name", "must be a string")),
    };
    let parameters = match doc.remove("parameters") {
        None => Parameters::defaults(kind),
        Some(toml::Value::Table(t)) => parse_parameters(kind, t)?,
        Some(_) => return Err(invalid("parameters", "must be a table")),
    };
    let expected = match doc.remove("expected") {
        None => None,
        Some(toml::Value::Table(t)) => Some(parse_expected(kind, t)?),
        Some(_) => return Err(invalid("expected", "must be a table")),
    };
    if let Some(key) = doc.keys().next() {
        return Err(invalid(key, "unknown key"));
    }
    Ok(ScenarioFile {
        name,
        kind,
        target,
        parameters,
        expected,
    })
}

fn parse_target(kind: Kind, v: toml::Value) -> Result<Target, ScenarioFileError> {
    match (kind, v) {
        (_, toml::Value::String(name)) => {
            check_builtin(kind, &name)?;
            Ok(Target::Builtin(name))
        }
        (Kind::Winding | Kind::Lattice, toml::Value::Table(mut t)) => {
            let rows = match t.remove("coefficients") {
                Some(toml::Value::Array(rows)) => rows,
                Some(_) => return Err(invalid("target.coefficients", "must be an array")),
                None => return Err(invalid("target.coefficients", "missing")),
            };
            if rows.is_empty() {
                return Err(invalid("target.coefficients", "needs at least one entry"));
            }
            rows.iter()
                .map(|row| coefficient(row).ok_or_else(|| {
                    invalid("target.coefficients", format!("entry {row} is not [integer, re, im] or [integer, re]"))
                }))
                .collect::<Result<Vec<_>, _>>()
                .map(Target::Coefficients)
        }
        (Kind::Groups, v @ toml::Value::Table(_)) => system_from_value(v)
            .map(Target::System)
            .map_err(|e| invalid("target", e.to_string())),
        (_, _) => Err(invalid("target", format!("a {kind} target must be a builtin name or an inline table"))),
    }
}

fn number(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn coefficient(row: &toml::Value) -> Option<(i64, Complex64)> {
    let items = row.as_array()?;
    let m = items.first()?.as_integer()?;
    let re = number(items.get(1)?)?;
    let im = match items.get(2) {
        Some(v) => number(v)?,
        None => 0.0,
    };
    (items.len() <= 3).then_some((m, Complex64::new(re, im)))
}

fn parse_parameters(kind: Kind, t: toml::Table) -> Result<Parameters, ScenarioFileError> {
    let mut p = Parameters::defaults(kind);
    for (key, v) in t {
        let field = format!("parameters.{key}");
        match key.as_str() {
            "grid" => {
                p.grid = match &v {
                    toml::Value::Integer(n) => vec![positive(&field, *n)?; p.grid.len()],
                    toml::Value::Array(xs) => xs
                        .iter()
                        .map(|x| x.as_integer().ok_or_else(|| invalid(&field, "entries must be integers")))
                        .map(|n| n.and_then(|n| positive(&field, n)))
                        .collect::<Result<_, _>>()?,
                    _ => return Err(invalid(&field, "must be an integer or a list of integers")),
                }
            }
            "scheme" => {
                p.scheme = v
                    .as_str()
                    .ok_or_else(|| invalid(&field, "must be a string"))?
                    .parse()
                    .map_err(|e: String| invalid(&field, e))?
            }
            "integrality_tol" => {
                p.integrality_tol = number(&v)
                    .filter(|x| *x > 0.0)
                    .ok_or_else(|| invalid(&field, "must be a positive number"))?
            }
            "window" => p.window = positive(&field, v.as_integer().ok_or_else(|| invalid(&field, "must be an integer"))?)? as i64,
            "n0" => p.n0 = v.as_integer().ok_or_else(|| invalid(&field, "must be an integer"))?,
            "bound" => p.bound = positive(&field, v.as_integer().ok_or_else(|| invalid(&field, "must be an integer"))?)? as u64,
            _ => return Err(invalid(&field, "unknown parameter")),
        }
    }
    Ok(p)
}

fn positive(field: &str, n: i64) -> Result<usize, ScenarioFileError> {
    usize::try_from(n)
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| invalid(field, format!("must be positive, got {n}")))
}

fn parse_expected(kind: Kind, mut t: toml::Table) -> Result<Expected, ScenarioFileError> {
    let out = match kind {
        Kind::Groups => {
            let groups = match t.remove("groups") {
                Some(toml::Value::Table(g)) => g,
                Some(_) => return Err(invalid("expected.groups", "must be a table of label = group")),
                None => return Err(invalid("expected.groups", "missing")),
            };
            let mut map = BTreeMap::new();
            for (label, v) in groups {
                let field = format!("expected.groups.{label}");
                let g = v
                    .as_str()
                    .ok_or_else(|| invalid(&field, "must be a group such as \"Z^2 + Z_3\""))?
                    .parse::<FgAbelianGroup>()
                    .map_err(|e| invalid(&field, e.to_string()))?;
                map.insert(label, g);
            }
            Expected::Groups(map)
        }
        _ => match t.remove("index") {
            Some(toml::Value::Integer(i)) => Expected::Index(i),
            Some(_) => return Err(invalid("expected.index", "must be an integer")),
            None => return Err(invalid("expected.index", "missing")),
        },
    };
    if let Some(key) = t.keys().next() {
        return Err(invalid(&format!("expected.{key}"), "unknown key"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_fedosov_file_gets_defaults() {
        let s = parse_scenario("kind = \"fedosov\"\ntarget = \"thm3_8\"\n").unwrap();
        assert_eq!(s.name, "thm3_8");
        assert_eq!(s.parameters, Parameters::defaults(Kind::Fedosov));
        assert_eq!(s.parameters.grid, vec![64, 64, 64]);
        assert_eq!(s.parameters.window, 64);
        assert_eq!(s.parameters.bound, 12);
        assert_eq!(s.expected, None);
    }

    #[test]
    fn missing_target_names_the_field() {
        let err = parse_scenario("kind = \"fedosov\"\n").unwrap_err();
        assert!(matches!(err, ScenarioFileError::Validation { ref field, .. } if field == "target"), "{err}");
    }

    #[test]
    fn parse_errors_carry_the_line() {
        let err = parse_scenario("kind = \"fedosov\"\ntarget = \"thm3_8\"\n[parameters]\ngrid = = 3\n").unwrap_err();
        assert!(matches!(err, ScenarioFileError::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn scalar_grid_is_replicated_per_axis() {
        let s = parse_scenario("kind = \"fedosov\"\ntarget = \"thm3_8\"\nparameters = { grid = 32 }\n").unwrap();
        assert_eq!(s.parameters.grid, vec![32, 32, 32]);
        let w = parse_scenario("kind = \"winding\"\ntarget = { coefficients = [[1, 2.0], [0, 0.5, 0.1]] }\n").unwrap();
        assert_eq!(w.parameters.grid, vec![64]);
        assert_eq!(
            w.target,
            Target::Coefficients(vec![(1, Complex64::new(2.0, 0.0)), (0, Complex64::new(0.5, 0.1))])
        );
    }

    #[test]
    fn rejects_mismatched_builtins_and_unknown_keys() {
        for text in [
            "kind = \"lattice\"\ntarget = \"thm3_8\"\n",
            "kind = \"winding\"\ntarget = \"thm3_8\"\n",
            "kind = \"groups\"\ntarget = \"bogus\"\n",
        ] {
            assert!(matches!(parse_scenario(text), Err(ScenarioFileError::Validation { ref field, .. }) if field == "target"));
        }
        let err = parse_scenario("kind = \"groups\"\ntarget = \"afull\"\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, ScenarioFileError::Validation { ref field, .. } if field == "bogus"));
        let err = parse_scenario("kind = \"lattice\"\ntarget = \"mult_jk\"\n[parameters]\nwindow = -3\n").unwrap_err();
        assert!(matches!(err, ScenarioFileError::Validation { ref field, .. } if field == "parameters.window"));
    }

    #[test]
    fn expected_groups_parse() {
        let s = parse_scenario(
            "kind = \"groups\"\ntarget = \"afull\"\n[expected.groups]\n\"K0(A)\" = \"Z^5\"\n\"K1(A)\" = \"Z^4\"\n",
        )
        .unwrap();
        let Some(Expected::Groups(g)) = s.expected else { panic!() };
        assert_eq!(g["K1(A)"], FgAbelianGroup::free(4));
    }
}
