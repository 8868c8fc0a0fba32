//! Run reports: one JSON document per invocation, plus a plain-text table.

use std::fmt::Write as _;

use cil_core::fedosov::IndexReport;
use cil_core::lattice::KernelCount;
use cil_ktheory::SystemSolution;
use serde::{Deserialize, Serialize};

use crate::scenario::{Expected, Kind, Parameters, Target};
use crate::verify::CriterionOutcome;

pub const SCHEMA: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    AssertionFailure,
    UsageError,
    NumericalError,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::AssertionFailure => 1,
            Outcome::UsageError => 2,
            Outcome::NumericalError => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunError {
    pub class: Outcome,
    /// Variant name of the underlying error, e.g. `OddSize`.
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub radius: i64,
    pub tau_steps: usize,
    pub sup_defect: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunResult {
    Index(IndexReport),
    Kernel(KernelCount),
    Identity(IdentityCheck),
    Groups(SystemSolution),
    Criteria(Vec<CriterionOutcome>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub target: Option<Target>,
    pub parameters: Option<Parameters>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool_version: String,
    pub scenario: String,
    pub kind: Kind,
    pub inputs: Inputs,
    pub citations: Vec<String>,
    pub result: Option<RunResult>,
    pub expected: Option<Expected>,
    /// `None` when nothing was asserted.
    pub passed: Option<bool>,
    pub error: Option<RunError>,
    pub seed: Option<u64>,
    pub runtime_ms: f64,
}

impl RunReport {
    pub fn new(scenario: &str, kind: Kind) -> Self {
        Self {
            schema: SCHEMA,
            tool_version: TOOL_VERSION.to_string(),
            scenario: scenario.to_string(),
            kind,
            inputs: Inputs {
                target: None,
                parameters: None,
            },
            citations: Vec::new(),
            result: None,
            expected: None,
            passed: None,
            error: None,
            seed: None,
            runtime_ms: 0.0,
        }
    }

    pub fn outcome(&self) -> Outcome {
        match (&self.error, self.passed) {
            (Some(e), _) => e.class,
            (None, Some(false)) => Outcome::AssertionFailure,
            _ => Outcome::Success,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome().exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only serializable data")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable summary.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let mut row = |k: &str, v: String| {
            let _ = writeln!(out, "{k:<22} {v}");
        };
        row("scenario", self.scenario.clone());
        row("kind", self.kind.to_string());
        for c in &self.citations {
            row("citation", c.clone());
        }
        match &self.result {
            Some(RunResult::Index(r)) => {
                row("raw integral", format!("{:.12e} {:+.3e}i", r.raw_integral.re, r.raw_integral.im));
                row("normalized", format!("{:.15} {:+.3e}i", r.normalized.re, r.normalized.im));
                row("index", r.rounded.to_string());
                row("residual", format!("{:.3e}", r.residual));
                for (i, c) in r.contributions.iter().enumerate() {
                    row(&format!("contribution {}", i + 1), format!("{:.12e}", c.re));
                }
                row("ellipticity margin", format!("{:.6}", r.ellipticity_margin));
                row("grid", format!("{:?}", r.grid_sizes));
            }
            Some(RunResult::Kernel(k)) => {
                let dim = |d: Option<usize>| d.map_or("-".to_string(), |d| d.to_string());
                row("dim ker", dim(k.ker_dim));
                row("dim coker", dim(k.coker_dim));
                row("index", k.index.to_string());
                row("certificate", k.certificate.to_string());
                for m in &k.methods {
                    row("method", format!("{} -> {}", m.certificate, m.index));
                }
            }
            Some(RunResult::Identity(c)) => {
                row("sup defect", format!("{:.3e} (tolerance {:.0e})", c.sup_defect, c.tolerance));
                row("table", format!("radius {}, {} tau steps", c.radius, c.tau_steps));
            }
            Some(RunResult::Groups(s)) => {
                row("bound", s.bound.to_string());
                row("assignments", s.assignments.len().to_string());
                for (i, a) in s.assignments.iter().enumerate() {
                    let values: Vec<String> = s.unknowns.iter().map(|l| format!("{l} = {}", a.values[l])).collect();
                    let mark = if a.family_truncated { " (family continues past bound)" } else { "" };
                    row(&format!("#{}", i + 1), format!("{}{mark}", values.join(", ")));
                }
                for f in &s.derived {
                    row("derived", format!("{}: {} is {}", f.sequence, f.arrow, f.fact));
                }
            }
            Some(RunResult::Criteria(cs)) => {
                for c in cs {
                    row(&format!("criterion {}", c.id), c.line());
                }
            }
            None => {}
        }
        if let Some(p) = self.passed {
            row("expectation", if p { "pass".into() } else { "FAIL".into() });
        }
        if let Some(e) = &self.error {
            row("error", format!("{} ({})", e.message, e.code));
        }
        row("runtime", format!("{:.1} ms", self.runtime_ms));
        out
    }
}
