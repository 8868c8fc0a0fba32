use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cil::report::{Outcome, RunError, RunReport, RunResult};
use cil::run::file_error;
use cil::scenario::{Expected, Kind, ScenarioFile, ScenarioFileError, Target};
use cil::verify::{run_criterion, CRITERIA, SEED};
use cil::{load_scenario, run};
use cil_core::grid::DiffScheme;
use cil_core::Complex64;
use cil_ktheory::FgAbelianGroup;
use clap::{Args, Parser, Subcommand};

/// Index computations on tori and lattices, and K-group case analysis.
#[derive(Parser)]
#[command(name = "cil", version)]
struct Cli {
    /// Write the JSON report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Three-form index integral of a builtin symbol on T^3.
    Fedosov(FedosovArgs),
    /// Winding number of a trigonometric polynomial loop.
    Winding(WindingArgs),
    /// Fredholm index of a lattice operator.
    Lattice(LatticeArgs),
    /// Case analysis of six-term sequences of K-groups.
    Groups(GroupsArgs),
    /// Run the check suite: `all` or a list of criterion numbers.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Source {
    /// Builtin scenario name.
    #[arg(long, conflicts_with = "file")]
    scenario: Option<String>,
    /// Scenario file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct FedosovArgs {
    #[command(flatten)]
    source: Source,
    /// Points per axis: one value for all axes, or three.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<usize>,
    /// `spectral` or `central4`.
    #[arg(long)]
    scheme: Option<DiffScheme>,
    /// Integrality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Expected index; a mismatch exits with status 1.
    #[arg(long, allow_hyphen_values = true)]
    expect: Option<i64>,
}

#[derive(Args)]
struct WindingArgs {
    /// Scenario file.
    #[arg(long, conflicts_with = "coeff")]
    file: Option<PathBuf>,
    /// Fourier coefficient `m:re[:im]`, repeatable.
    #[arg(long, allow_hyphen_values = true)]
    coeff: Vec<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    scheme: Option<DiffScheme>,
    #[arg(long, allow_hyphen_values = true)]
    expect: Option<i64>,
}

#[derive(Args)]
struct LatticeArgs {
    #[command(flatten)]
    source: Source,
    /// Half-width of the window.
    #[arg(long)]
    window: Option<i64>,
    /// Step position for prop3_15.
    #[arg(long, allow_hyphen_values = true)]
    n0: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    expect: Option<i64>,
}

#[derive(Args)]
struct GroupsArgs {
    #[command(flatten)]
    source: Source,
    /// Enumeration bound for case splits.
    #[arg(long)]
    bound: Option<u64>,
    /// Expected value `LABEL=GROUP`, repeatable.
    #[arg(long)]
    expect: Vec<String>,
    /// Print the derivation trace of each assignment.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all`, or criterion numbers.
    #[arg(default_value = "all")]
    which: Vec<String>,
}

fn usage(field: &str, message: impl Into<String>) -> ScenarioFileError {
    ScenarioFileError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

fn load(kind: Kind, source: &Source) -> Result<ScenarioFile, ScenarioFileError> {
    match (&source.scenario, &source.file) {
        (Some(name), _) => ScenarioFile::builtin(kind, name),
        (None, Some(path)) => {
            let s = load_scenario(path)?;
            if s.kind != kind {
                return Err(usage("kind", format!("file declares {} but the {kind} command was used", s.kind)));
            }
            Ok(s)
        }
        (None, None) => Err(usage("scenario", "pass --scenario NAME or --file PATH")),
    }
}

fn parse_coeff(s: &str) -> Result<(i64, Complex64), ScenarioFileError> {
    let bad = || usage("coeff", format!("`{s}` is not m:re[:im]"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(bad());
    }
    let m = parts[0].trim().parse().map_err(|_| bad())?;
    let re = parts[1].trim().parse().map_err(|_| bad())?;
    let im = match parts.get(2) {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    Ok((m, Complex64::new(re, im)))
}

fn build(command: &Command) -> Result<ScenarioFile, ScenarioFileError> {
    match command {
        Command::Fedosov(a) => {
            let mut s = load(Kind::Fedosov, &a.source)?;
            match a.grid.len() {
                0 => {}
                1 => s.parameters.grid = vec![a.grid[0]; 3],
                _ => s.parameters.grid = a.grid.clone(),
            }
            if let Some(x) = a.scheme {
                s.parameters.scheme = x;
            }
            if let Some(t) = a.tol {
                s.parameters.integrality_tol = t;
            }
            if let Some(n) = a.expect {
                s.expected = Some(Expected::Index(n));
            }
            Ok(s)
        }
        Command::Winding(a) => {
            let mut s = match &a.file {
                Some(path) => load(Kind::Winding, &Source { scenario: None, file: Some(path.clone()) })?,
                None if a.coeff.is_empty() => return Err(usage("coeff", "pass --coeff m:re[:im] or --file PATH")),
                None => {
                    let c = a.coeff.iter().map(|c| parse_coeff(c)).collect::<Result<_, _>>()?;
                    ScenarioFile::inline(Kind::Winding, Target::Coefficients(c))
                }
            };
            if let Some(n) = a.grid {
                s.parameters.grid = vec![n];
            }
            if let Some(x) = a.scheme {
                s.parameters.scheme = x;
            }
            if let Some(n) = a.expect {
                s.expected = Some(Expected::Index(n));
            }
            Ok(s)
        }
        Command::Lattice(a) => {
            let mut s = load(Kind::Lattice, &a.source)?;
            if let Some(w) = a.window {
                if w <= 0 {
                    return Err(usage("window", format!("must be positive, got {w}")));
                }
                s.parameters.window = w;
            }
            if let Some(n0) = a.n0 {
                s.parameters.n0 = n0;
            }
            if let Some(n) = a.expect {
                s.expected = Some(Expected::Index(n));
            }
            Ok(s)
        }
        Command::Groups(a) => {
            let mut s = load(Kind::Groups, &a.source)?;
            if let Some(b) = a.bound {
                if b == 0 {
                    return Err(usage("bound", "must be positive"));
                }
                s.parameters.bound = b;
            }
            if !a.expect.is_empty() {
                let mut want = BTreeMap::new();
                for e in &a.expect {
                    let (label, group) = e
                        .split_once('=')
                        .ok_or_else(|| usage("expect", format!("`{e}` is not LABEL=GROUP")))?;
                    let g: FgAbelianGroup = group.trim().parse().map_err(|x| usage("expect", format!("{x}")))?;
                    want.insert(label.trim().to_string(), g);
                }
                s.expected = Some(Expected::Groups(want));
            }
            Ok(s)
        }
        Command::Verify(_) => unreachable!("verify does not build a scenario"),
    }
}

fn kind_of(command: &Command) -> Kind {
    match command {
        Command::Fedosov(_) => Kind::Fedosov,
        Command::Winding(_) => Kind::Winding,
        Command::Lattice(_) => Kind::Lattice,
        Command::Groups(_) => Kind::Groups,
        Command::Verify(_) => Kind::Verify,
    }
}

fn verify(args: &VerifyArgs) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport::new("verify", Kind::Verify);
    report.seed = Some(SEED);
    let ids: Result<Vec<u8>, String> = if args.which.iter().any(|w| w == "all") {
        Ok(CRITERIA.to_vec())
    } else {
        args.which
            .iter()
            .map(|w| w.parse::<u8>().ok().filter(|id| CRITERIA.contains(id)).ok_or_else(|| w.clone()))
            .collect()
    };
    match ids {
        Ok(ids) => {
            let outcomes: Vec<_> = ids
                .into_iter()
                .map(|id| {
                    let o = run_criterion(id);
                    eprintln!("criterion {} {}", o.id, o.line());
                    o
                })
                .collect();
            report.passed = Some(outcomes.iter().all(|o| o.passed));
            report.result = Some(RunResult::Criteria(outcomes));
        }
        Err(bad) => {
            report.error = Some(RunError {
                class: Outcome::UsageError,
                code: "Validation".into(),
                message: format!("unknown criterion `{bad}`, expected `all` or 1 to 8"),
            })
        }
    }
    report.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    report
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CIL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CIL_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    let report = match &cli.command {
        Command::Verify(a) => verify(a),
        c => match build(c) {
            Ok(s) => run(&s),
            Err(e) => {
                let mut r = RunReport::new("-", kind_of(c));
                r.error = Some(file_error(&e));
                r
            }
        },
    };

    // Output errors (a closed pipe, say) must not mask the exit status.
    let mut stdout = std::io::stdout().lock();
    if cli.json {
        let _ = writeln!(stdout, "{}", report.to_json());
    } else {
        let _ = write!(stdout, "{}", report.table());
        if let (Command::Groups(GroupsArgs { trace: true, .. }), Some(RunResult::Groups(sol))) =
            (&cli.command, &report.result)
        {
            for (i, a) in sol.assignments.iter().enumerate() {
                let _ = writeln!(stdout, "\ntrace #{}", i + 1);
                for step in &a.trace {
                    let _ = writeln!(stdout, "  {step}");
                }
            }
        }
    }
    drop(stdout);
    if let Some(e) = &report.error {
        eprintln!("error: {}", e.message);
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
