//! Named builtin symbols and lattice operators.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, MatrixSymbol, TorusGrid};
use crate::lattice::{LatticeOperator, LimitForm, Multiplier, Term, Window};
use crate::symbols::{sigma_t, sigma_t_blocks, B456Table, SymbolError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{scenario}` needs a grid of dimension {dim}")]
    GridMismatch { scenario: String, dim: usize },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

impl From<GridError> for ScenarioError {
    fn from(e: GridError) -> Self {
        ScenarioError::Symbol(e.into())
    }
}

/// Registry of builtin scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    /// `σ_T` on `T³`.
    SigmaT,
    /// Step Toeplitz operator `b(M)Y₋₁ + c(M)` on `ℤ`.
    StepToeplitz,
    /// Multiplier `(j − ik)(1 + j² + k²)^{−1/2}` on `ℤ²`.
    MultJk,
    /// Same multiplier, under the name used for evaluated operators.
    A5PlusIA6,
    /// Table of `B′₄, B′₅, B′₆`.
    B456Identity,
    /// `m`-fold block-diagonal sum of `σ_T`.
    SigmaTBlocks(usize),
}

impl ScenarioId {
    pub const NAMES: [&'static str; 6] = [
        "thm3_8",
        "prop3_15",
        "mult_jk",
        "a5_plus_ia6",
        "b456_identity",
        "sigma_T_blocks(m)",
    ];

    pub fn name(&self) -> String {
        match self {
            ScenarioId::SigmaT => "thm3_8".into(),
            ScenarioId::StepToeplitz => "prop3_15".into(),
            ScenarioId::MultJk => "mult_jk".into(),
            ScenarioId::A5PlusIA6 => "a5_plus_ia6".into(),
            ScenarioId::B456Identity => "b456_identity".into(),
            ScenarioId::SigmaTBlocks(m) => format!("sigma_T_blocks({m})"),
        }
    }

    /// Statement the scenario reproduces.
    pub fn citation(&self) -> String {
        match self {
            ScenarioId::SigmaT => {
                "σ_T = I + (−cos λ + i sin λ − 1)·Q(e^{iα}, cos β, sin β) has index 1; \
                 ∫Tr(σ⁻¹dσ)³ = 24π², three equal contributions of 8π²"
                    .into()
            }
            ScenarioId::StepToeplitz => {
                "b(M)Y₋₁ + c(M) with b = 1 on j ≥ n₀: kernel 0, cokernel spanned by \
                 δ_{n₀−1} − δ_{n₀}, index −1"
                    .into()
            }
            ScenarioId::MultJk | ScenarioId::A5PlusIA6 => {
                "multiplication by (j − ik)(1 + j² + k²)^{−1/2} on ℓ²(ℤ²): kernel and \
                 cokernel of dimension 1, index 0"
                    .into()
            }
            ScenarioId::B456Identity => {
                "B′₄ = (1+τ²+j²)^{−1/2}, B′₅ = −τB′₄, B′₆ = −jB′₄ satisfy \
                 B′₄² + B′₅² + B′₆² = 1"
                    .into()
            }
            ScenarioId::SigmaTBlocks(m) => {
                format!("{m}-fold block sum of σ_T has index {m} by additivity")
            }
        }
    }

    /// Grid dimension required by symbol scenarios.
    pub fn grid_dim(&self) -> Option<usize> {
        match self {
            ScenarioId::SigmaT | ScenarioId::SigmaTBlocks(_) => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "thm3_8" => Ok(ScenarioId::SigmaT),
            "prop3_15" => Ok(ScenarioId::StepToeplitz),
            "mult_jk" => Ok(ScenarioId::MultJk),
            "a5_plus_ia6" => Ok(ScenarioId::A5PlusIA6),
            "b456_identity" => Ok(ScenarioId::B456Identity),
            _ => s
                .strip_prefix("sigma_T_blocks(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|m| m.trim().parse::<usize>().ok())
                .filter(|&m| m >= 1)
                .map(ScenarioId::SigmaTBlocks)
                .ok_or_else(|| ScenarioError::UnknownScenario(s.to_string())),
        }
    }
}

/// Object produced by a builtin scenario.
#[derive(Debug, Clone)]
pub enum Builtin {
    Symbol(MatrixSymbol),
    Operator(LatticeOperator),
    Table(B456Table),
}

/// Half-width and `τ` resolution of the `B′` table.
pub const B456_RADIUS: i64 = 20;
pub const B456_TAU_STEPS: usize = 800;

/// Builds a registered scenario. Symbol scenarios need a grid of the right
/// dimension; the step operator uses `n₀ = 0`.
pub fn builtin(id: ScenarioId, grid: Option<&TorusGrid>) -> Result<Builtin, ScenarioError> {
    let need_grid = |dim: usize| -> Result<&TorusGrid, ScenarioError> {
        grid.filter(|g| g.dim() == dim)
            .ok_or_else(|| ScenarioError::GridMismatch {
                scenario: id.name(),
                dim,
            })
    };
    Ok(match id {
        ScenarioId::SigmaT => Builtin::Symbol(sigma_t(need_grid(3)?)?),
        ScenarioId::SigmaTBlocks(m) => Builtin::Symbol(sigma_t_blocks(need_grid(3)?, m)?),
        ScenarioId::StepToeplitz => Builtin::Operator(step_toeplitz(0)),
        ScenarioId::MultJk | ScenarioId::A5PlusIA6 => Builtin::Operator(mult_jk()),
        ScenarioId::B456Identity => Builtin::Table(B456Table::new(B456_RADIUS, B456_TAU_STEPS)),
    })
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `b(M)Y₋₁ + c(M)` on `ℤ` with `b(j) = 1` for `j ≥ n₀` and `0` otherwise, `c = 1 − b`.
pub fn step_toeplitz(n0: i64) -> LatticeOperator {
    let var = Window::interval(n0, n0);
    let b = Multiplier::new(
        1,
        "b",
        var.clone(),
        LimitForm::EventuallyConstant {
            minus: vec![real(0.0)],
            plus: vec![real(1.0)],
        },
        move |p| vec![real(if p[0] >= n0 { 1.0 } else { 0.0 })],
    );
    let c = Multiplier::new(
        1,
        "c",
        var,
        LimitForm::EventuallyConstant {
            minus: vec![real(1.0)],
            plus: vec![real(0.0)],
        },
        move |p| vec![real(if p[0] >= n0 { 0.0 } else { 1.0 })],
    );
    LatticeOperator::new(
        1,
        1,
        vec![
            Term {
                shift: vec![-1],
                multiplier: b,
            },
            Term {
                shift: vec![0],
                multiplier: c,
            },
        ],
    )
    .expect("consistent terms")
}

/// Multiplication by `(j − ik)(1 + j² + k²)^{−1/2}` on `ℓ²(ℤ²)`. Away from the
/// origin its modulus is at least `1/√2`.
pub fn mult_jk() -> LatticeOperator {
    let m = Multiplier::new(
        1,
        "(j - ik)/sqrt(1 + j^2 + k^2)",
        Window::symmetric(2, 0),
        LimitForm::InvertibleOutside {
            min_singular: 0.5f64.sqrt(),
        },
        |p| {
            let (j, k) = (p[0] as f64, p[1] as f64);
            vec![Complex64::new(j, -k) / (1.0 + j * j + k * k).sqrt()]
        },
    );
    LatticeOperator::multiplication(2, m).expect("consistent terms")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{fredholm_index, Certificate};

    #[test]
    fn names_round_trip() {
        for id in [
            ScenarioId::SigmaT,
            ScenarioId::StepToeplitz,
            ScenarioId::MultJk,
            ScenarioId::A5PlusIA6,
            ScenarioId::B456Identity,
            ScenarioId::SigmaTBlocks(2),
        ] {
            assert_eq!(id.name().parse::<ScenarioId>().unwrap(), id);
        }
        assert!(matches!(
            "thm9_9".parse::<ScenarioId>(),
            Err(ScenarioError::UnknownScenario(_))
        ));
        assert!("sigma_T_blocks(0)".parse::<ScenarioId>().is_err());
    }

    #[test]
    fn grid_requirements() {
        let g2 = TorusGrid::new(2, &[8, 8]).unwrap();
        assert!(matches!(
            builtin(ScenarioId::SigmaT, Some(&g2)),
            Err(ScenarioError::GridMismatch { dim: 3, .. })
        ));
        assert!(matches!(
            builtin(ScenarioId::SigmaT, None),
            Err(ScenarioError::GridMismatch { .. })
        ));
        let g3 = TorusGrid::new(3, &[8, 8, 8]).unwrap();
        match builtin(ScenarioId::SigmaT, Some(&g3)).unwrap() {
            Builtin::Symbol(s) => assert_eq!(s.shape(), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_operator_terms() {
        match builtin(ScenarioId::StepToeplitz, None).unwrap() {
            Builtin::Operator(a) => {
                let shifts: Vec<i64> = a.terms().iter().map(|t| t.shift[0]).collect();
                assert_eq!(shifts, vec![-1, 0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mult_jk_index() {
        let r = fredholm_index(&mult_jk(), &Window::symmetric(2, 50)).unwrap();
        assert_eq!((r.ker_dim, r.coker_dim, r.index), (Some(1), Some(1), 0));
        assert_eq!(r.certificate, Certificate::ExactScan);
    }
}
