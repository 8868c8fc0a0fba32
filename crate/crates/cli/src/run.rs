//! Executes a validated scenario into a [`RunReport`].

use std::time::Instant;

use cil_core::fedosov::{fedosov_index, winding_number, FedosovProblem, IndexError};
use cil_core::grid::{GridError, MatrixSymbol, TorusGrid};
use cil_core::lattice::{fredholm_index, laurent_operator, LatticeError, Window};
use cil_core::scenarios::{builtin, step_toeplitz, Builtin, ScenarioError, ScenarioId, B456_RADIUS, B456_TAU_STEPS};
use cil_core::symbols::SymbolError;
use cil_core::Complex64;
use cil_ktheory::{builtin_ktheory_scenario, solve_system, KtheoryError, SequenceSystem};

use crate::report::{IdentityCheck, Outcome, RunError, RunReport, RunResult};
use crate::scenario::{Expected, Kind, ScenarioFile, ScenarioFileError, Target};

/// Tolerance on `|B′₄² + B′₅² + B′₆² − 1|`.
pub const IDENTITY_TOL: f64 = 1e-14;

fn variant(e: &impl std::fmt::Debug) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or_default().to_string()
}

fn error(class: Outcome, code: String, message: String) -> RunError {
    RunError { class, code, message }
}

fn grid_error(e: &GridError) -> RunError {
    let class = match e {
        GridError::NearSingular { .. } => Outcome::NumericalError,
        _ => Outcome::UsageError,
    };
    error(class, variant(e), e.to_string())
}

fn symbol_error(e: &SymbolError) -> RunError {
    match e {
        SymbolError::Grid(g) => grid_error(g),
        _ => error(Outcome::NumericalError, variant(e), e.to_string()),
    }
}

fn index_error(e: &IndexError) -> RunError {
    match e {
        IndexError::Grid(g) => grid_error(g),
        IndexError::Symbol(s) => symbol_error(s),
        IndexError::AtParameter { source, .. } => {
            let inner = index_error(source);
            error(inner.class, inner.code, e.to_string())
        }
        IndexError::IntegralityFailure { .. } => error(Outcome::NumericalError, variant(e), e.to_string()),
        _ => error(Outcome::UsageError, variant(e), e.to_string()),
    }
}

fn lattice_error(e: &LatticeError) -> RunError {
    match e {
        LatticeError::Winding(w) => index_error(w),
        LatticeError::DimMismatch { .. }
        | LatticeError::SizeMismatch { .. }
        | LatticeError::NotPureMultiplier
        | LatticeError::NotScalar(_)
        | LatticeError::MissingLimits(_) => error(Outcome::UsageError, variant(e), e.to_string()),
        _ => error(Outcome::NumericalError, variant(e), e.to_string()),
    }
}

fn scenario_error(e: &ScenarioError) -> RunError {
    match e {
        ScenarioError::Symbol(s) => symbol_error(s),
        _ => error(Outcome::UsageError, variant(e), e.to_string()),
    }
}

fn ktheory_error(e: &KtheoryError) -> RunError {
    error(Outcome::UsageError, variant(e), e.to_string())
}

pub fn file_error(e: &ScenarioFileError) -> RunError {
    error(Outcome::UsageError, variant(e), e.to_string())
}

/// Runs `s`. Failures are recorded in the report rather than returned.
pub fn run(s: &ScenarioFile) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport::new(&s.name, s.kind);
    report.inputs.target = Some(s.target.clone());
    report.inputs.parameters = Some(s.parameters.clone());
    report.expected = s.expected.clone();
    let outcome = match s.kind {
        Kind::Fedosov => run_fedosov(s, &mut report),
        Kind::Winding => run_winding(s, &mut report),
        Kind::Lattice => run_lattice(s, &mut report),
        Kind::Groups => run_groups(s, &mut report),
        Kind::Verify => Err(error(Outcome::UsageError, "Validation".into(), "verify is not a scenario kind".into())),
    };
    if let Err(e) = outcome {
        report.error = Some(e);
    }
    if report.error.is_none() {
        report.passed = assess(&report);
    }
    report.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    report
}

fn builtin_id(s: &ScenarioFile) -> Option<ScenarioId> {
    match &s.target {
        Target::Builtin(name) => name.parse().ok(),
        _ => None,
    }
}

fn run_fedosov(s: &ScenarioFile, report: &mut RunReport) -> Result<(), RunError> {
    let id = builtin_id(s).ok_or_else(|| {
        error(Outcome::UsageError, "Validation".into(), "fedosov scenarios need a builtin target".into())
    })?;
    report.citations.push(id.citation());
    let grid = TorusGrid::new(3, &s.parameters.grid).map_err(|e| grid_error(&e))?;
    let sigma = match builtin(id, Some(&grid)).map_err(|e| scenario_error(&e))? {
        Builtin::Symbol(sigma) => sigma,
        _ => unreachable!("fedosov targets are symbol scenarios"),
    };
    let problem = FedosovProblem::new(sigma, 2)
        .with_scheme(s.parameters.scheme)
        .with_integrality_tol(s.parameters.integrality_tol);
    index_result(fedosov_index(&problem), report)
}

fn index_result(r: Result<cil_core::fedosov::IndexReport, IndexError>, report: &mut RunReport) -> Result<(), RunError> {
    match r {
        Ok(r) => {
            report.result = Some(RunResult::Index(r));
            Ok(())
        }
        Err(e) => {
            // Keep the raw numbers of a failed integrality check.
            if let IndexError::IntegralityFailure { report: r, .. } = &e {
                report.result = Some(RunResult::Index((**r).clone()));
            }
            Err(index_error(&e))
        }
    }
}

fn coefficients(s: &ScenarioFile) -> Result<&[(i64, Complex64)], RunError> {
    match &s.target {
        Target::Coefficients(c) => Ok(c),
        _ => Err(error(
            Outcome::UsageError,
            "Validation".into(),
            format!("{} scenario needs inline coefficients", s.kind),
        )),
    }
}

fn run_winding(s: &ScenarioFile, report: &mut RunReport) -> Result<(), RunError> {
    let coeffs = coefficients(s)?.to_vec();
    let grid = TorusGrid::new(1, &s.parameters.grid).map_err(|e| grid_error(&e))?;
    let f = MatrixSymbol::from_fn(&grid, 1, 1, |_, t| {
        vec![coeffs
            .iter()
            .map(|(m, c)| c * Complex64::from_polar(1.0, *m as f64 * t[0]))
            .sum::<Complex64>()]
    });
    index_result(winding_number(&f, s.parameters.scheme), report)
}

fn run_lattice(s: &ScenarioFile, report: &mut RunReport) -> Result<(), RunError> {
    let w = s.parameters.window;
    let (op, window) = match (&s.target, builtin_id(s)) {
        (Target::Coefficients(_), _) => (laurent_operator(coefficients(s)?), Window::symmetric(1, w)),
        (_, Some(id @ ScenarioId::B456Identity)) => {
            report.citations.push(id.citation());
            let Builtin::Table(t) = builtin(id, None).map_err(|e| scenario_error(&e))? else {
                unreachable!("b456_identity builds a table")
            };
            report.result = Some(RunResult::Identity(IdentityCheck {
                radius: B456_RADIUS,
                tau_steps: B456_TAU_STEPS,
                sup_defect: t.sum_of_squares_defect(),
                tolerance: IDENTITY_TOL,
            }));
            return Ok(());
        }
        (_, Some(id @ ScenarioId::StepToeplitz)) => {
            report.citations.push(id.citation());
            (step_toeplitz(s.parameters.n0), Window::symmetric(1, w))
        }
        (_, Some(id @ (ScenarioId::MultJk | ScenarioId::A5PlusIA6))) => {
            report.citations.push(id.citation());
            let Builtin::Operator(op) = builtin(id, None).map_err(|e| scenario_error(&e))? else {
                unreachable!("multiplier scenarios build operators")
            };
            (op, Window::symmetric(2, w))
        }
        _ => {
            return Err(error(
                Outcome::UsageError,
                "Validation".into(),
                "lattice scenarios need an operator target".into(),
            ))
        }
    };
    let k = fredholm_index(&op, &window).map_err(|e| lattice_error(&e))?;
    report.result = Some(RunResult::Kernel(k));
    Ok(())
}

fn run_groups(s: &ScenarioFile, report: &mut RunReport) -> Result<(), RunError> {
    let system: SequenceSystem = match &s.target {
        Target::Builtin(name) => builtin_ktheory_scenario(name).map_err(|e| ktheory_error(&e))?,
        Target::System(sys) => sys.clone(),
        Target::Coefficients(_) => {
            return Err(error(Outcome::UsageError, "Validation".into(), "groups scenarios need a sequence system".into()))
        }
    };
    report.citations.extend(
        std::iter::once(&system.citation)
            .chain(system.sequences.iter().map(|q| &q.citation))
            .filter(|c| !c.is_empty())
            .cloned(),
    );
    let sol = solve_system(&system, s.parameters.bound).map_err(|e| ktheory_error(&e))?;
    report.result = Some(RunResult::Groups(sol));
    Ok(())
}

/// Compares the result against the expectation, if any.
fn assess(report: &RunReport) -> Option<bool> {
    if let Some(RunResult::Identity(c)) = &report.result {
        return Some(c.sup_defect < c.tolerance);
    }
    let expected = report.expected.as_ref()?;
    Some(match (expected, &report.result) {
        (Expected::Index(n), Some(RunResult::Index(r))) => r.rounded == *n,
        (Expected::Index(n), Some(RunResult::Kernel(k))) => k.index == *n,
        (Expected::Groups(want), Some(RunResult::Groups(sol))) => {
            !sol.assignments.is_empty()
                && want.iter().all(|(label, g)| {
                    sol.assignments.iter().all(|a| {
                        a.values.get(label) == Some(g)
                    })
                })
        }
        _ => false,
    })
}

