//! Front end for the index computations and the K-theory solver: scenario
//! files, JSON run reports and the check suite behind `cil verify`.

#![forbid(unsafe_code)]

pub mod report;
pub mod run;
pub mod scenario;
pub mod verify;

pub use report::{Outcome, RunReport, RunResult};
pub use run::run;
pub use scenario::{load_scenario, parse_scenario, Kind, ScenarioFile, ScenarioFileError};
