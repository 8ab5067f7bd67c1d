//! One-dimensional parameter sweeps over time, field or the dephasing
//! parameter `v`.
//!
//! Grid points are evaluated in parallel and always returned in grid
//! order, so identical grids give bit-identical records.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{correlation_point_from_v, CorrelationPoint};
use crate::error::{Error, Result};
use crate::model::{envelope_v, ExperimentConfig, SequenceKind, SpinBath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Time `t` (the inter-pulse delay for the echo).
    Time,
    /// Dimensionless field `2ω/A` relative to the reference spin.
    FieldRatio,
    /// `v`, applied to every spin directly.
    VParameter,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Time => "time",
            SweepVariable::FieldRatio => "field",
            SweepVariable::VParameter => "v",
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" | "t" => Ok(SweepVariable::Time),
            "field" | "field_ratio" => Ok(SweepVariable::FieldRatio),
            "v" | "v_parameter" => Ok(SweepVariable::VParameter),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep variable `{other}` (expected time, field or v)"
            ))),
        }
    }
}

/// Bath a sweep is evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub enum BathTemplate {
    Explicit(SpinBath),
    EqualCoupling { n: usize, a_x: f64, omega: f64 },
}

impl BathTemplate {
    pub fn n(&self) -> usize {
        match self {
            BathTemplate::Explicit(b) => b.n(),
            BathTemplate::EqualCoupling { n, .. } => *n,
        }
    }

    pub fn to_bath(&self) -> Result<SpinBath> {
        match self {
            BathTemplate::Explicit(b) => Ok(b.clone()),
            BathTemplate::EqualCoupling { n, a_x, omega } => SpinBath::equal(*n, *a_x, *omega),
        }
    }

    /// Per-spin field ratios `2ω/|A_j|` when the common Larmor frequency is
    /// set by `ratio` relative to the first spin.
    fn field_ratios(&self, ratio: f64) -> Vec<f64> {
        match self {
            BathTemplate::EqualCoupling { n, a_x, .. } => {
                let r = if *a_x == 0.0 { f64::INFINITY } else { ratio };
                vec![r; *n]
            }
            BathTemplate::Explicit(b) => {
                let reference = b.spins().first().map_or(0.0, |s| s.a_x.abs());
                b.iter()
                    .map(|s| {
                        let a = s.a_x.abs();
                        if a == 0.0 {
                            f64::INFINITY
                        } else {
                            ratio * (reference / a)
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub sequence: SequenceKind,
    pub bath: BathTemplate,
}

impl SweepGrid {
    /// Checks the grid. A range needs `start < stop` and at least two
    /// steps; `start == stop` with one step is a single-point grid.
    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidGrid("start and stop must be finite".into()));
        }
        if self.start == self.stop {
            if self.steps != 1 {
                return Err(Error::InvalidGrid(
                    "a single-point grid (start == stop) needs steps = 1".into(),
                ));
            }
        } else if self.start > self.stop {
            return Err(Error::InvalidGrid(format!(
                "start ({}) must be below stop ({})",
                self.start, self.stop
            )));
        } else if self.steps < 2 {
            return Err(Error::InvalidGrid("steps must be ≥ 2".into()));
        }
        match self.variable {
            SweepVariable::Time if self.start < 0.0 => {
                Err(Error::InvalidGrid("time must be non-negative".into()))
            }
            SweepVariable::FieldRatio if self.start < 0.0 => Err(Error::InvalidGrid(
                "field ratio 2ω/A must be non-negative".into(),
            )),
            SweepVariable::VParameter if self.start < 0.0 || self.stop > 2.0 => {
                Err(Error::InvalidGrid(format!(
                    "v must lie in [0, 2], got {}..{}",
                    self.start, self.stop
                )))
            }
            _ => Ok(()),
        }
    }

    /// Grid abscissae `start + (stop − start)·i/(steps − 1)`.
    pub fn points(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * i as f64 / last
                }
            })
            .collect()
    }
}

/// One grid point: the abscissa, each spin's `v`, and the correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub x: f64,
    pub v: Vec<f64>,
    pub point: CorrelationPoint,
}

impl SweepRecord {
    /// Mutual information normalized to its maximum, `I_red / 2`.
    pub fn i_normalized(&self) -> f64 {
        0.5 * self.point.i_red
    }
}

fn evaluate<F>(grid: &SweepGrid, cfg: &ExperimentConfig, v_at: F) -> Vec<SweepRecord>
where
    F: Fn(f64) -> Vec<f64> + Sync,
{
    grid.points()
        .into_par_iter()
        .map(|x| {
            let v = v_at(x);
            let point = correlation_point_from_v(&v, cfg);
            SweepRecord { x, v, point }
        })
        .collect()
}

fn expect_variable(grid: &SweepGrid, want: SweepVariable) -> Result<()> {
    if grid.variable != want {
        return Err(Error::InvalidGrid(format!(
            "expected a {} sweep, got {}",
            want.as_str(),
            grid.variable.as_str()
        )));
    }
    grid.validate()
}

/// Correlations along a time grid.
pub fn run_time_sweep(grid: &SweepGrid, cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    expect_variable(grid, SweepVariable::Time)?;
    let bath = grid.bath.to_bath()?;
    let seq = grid.sequence;
    Ok(evaluate(grid, cfg, |t| bath.v_list(t, seq)))
}

/// Correlations at the time-envelope of `v` along a `2ω/A` grid: the FID
/// at `sin²(tΩ/2) = 1`, the echo at `sin⁴(tΩ/2) = 1`.
pub fn run_field_sweep(grid: &SweepGrid, cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    expect_variable(grid, SweepVariable::FieldRatio)?;
    let seq = grid.sequence;
    let template = &grid.bath;
    Ok(evaluate(grid, cfg, |x| {
        template
            .field_ratios(x)
            .into_iter()
            .map(|r| envelope_v(r, seq))
            .collect()
    }))
}

/// Correlations with `v` itself as the abscissa, shared by every spin.
pub fn run_v_sweep(grid: &SweepGrid, cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    expect_variable(grid, SweepVariable::VParameter)?;
    let n = grid.bath.n();
    Ok(evaluate(grid, cfg, |v| vec![v; n]))
}

/// Dispatch on the grid's variable.
pub fn run_sweep(grid: &SweepGrid, cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    match grid.variable {
        SweepVariable::Time => run_time_sweep(grid, cfg),
        SweepVariable::FieldRatio => run_field_sweep(grid, cfg),
        SweepVariable::VParameter => run_v_sweep(grid, cfg),
    }
}

/// Field-envelope sweeps `2ω/A ∈ [0, 4] × 401` for both sequences, on a
/// pair of equally coupled spins with `A = 1`.
pub fn figure1_presets() -> Vec<(&'static str, SweepGrid)> {
    SequenceKind::ALL
        .iter()
        .map(|&seq| {
            let name = match seq {
                SequenceKind::Fid => "figure1_fid",
                SequenceKind::Echo => "figure1_echo",
            };
            let grid = SweepGrid {
                variable: SweepVariable::FieldRatio,
                start: 0.0,
                stop: 4.0,
                steps: 401,
                sequence: seq,
                bath: BathTemplate::EqualCoupling {
                    n: 2,
                    a_x: 1.0,
                    omega: 0.0,
                },
            };
            (name, grid)
        })
        .collect()
}

/// `v ∈ [0, 2] × 201` sweeps for 2 and 10 equally coupled spins.
pub fn figure2_presets() -> Vec<(&'static str, SweepGrid)> {
    [("figure2_n2", 2usize), ("figure2_n10", 10)]
        .into_iter()
        .map(|(name, n)| {
            let grid = SweepGrid {
                variable: SweepVariable::VParameter,
                start: 0.0,
                stop: 2.0,
                steps: 201,
                sequence: SequenceKind::Fid,
                bath: BathTemplate::EqualCoupling {
                    n,
                    a_x: 1.0,
                    omega: 0.0,
                },
            };
            (name, grid)
        })
        .collect()
}
