//! Model inputs: the nuclear spin bath, the pulse sequence, the electron
//! polarization, and the per-spin branch parameters every closed-form
//! expression is built from.
//!
//! Units: all frequencies are angular frequencies in one common unit and
//! times are in the reciprocal unit. Setting the hyperfine coupling of a
//! reference spin to 1 gives the dimensionless `2ω/A` field axis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polarization above which the quadratic-order formulas lose accuracy.
pub const BETA_WARN_THRESHOLD: f64 = 0.1;

/// Default electron polarization `ħω_e / kT`.
pub const DEFAULT_BETA: f64 = 0.01;

/// Hyperfine coupling and Larmor frequency of one nuclear spin-1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuclearSpinParam {
    /// x-component of the hyperfine coupling. Only its square enters the
    /// dephasing parameter, so either sign is allowed.
    #[serde(rename = "A_x")]
    pub a_x: f64,
    /// Nuclear Larmor frequency.
    pub omega: f64,
}

impl NuclearSpinParam {
    pub fn new(a_x: f64, omega: f64) -> Result<Self> {
        let spin = NuclearSpinParam { a_x, omega };
        spin.validate()?;
        Ok(spin)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a_x.is_finite() || !self.omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spin parameters must be finite (A_x = {}, omega = {})",
                self.a_x, self.omega
            )));
        }
        Ok(())
    }

    /// Branch parameters of this spin after time `t` of the given sequence.
    pub fn branch(&self, t: f64, seq: SequenceKind) -> BranchParams {
        derive_branch(self, t, seq)
    }
}

/// Ordered list of nuclear spins coupled to the electron.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinBath {
    spins: Vec<NuclearSpinParam>,
}

impl SpinBath {
    pub fn new(spins: Vec<NuclearSpinParam>) -> Result<Self> {
        for spin in &spins {
            spin.validate()?;
        }
        Ok(SpinBath { spins })
    }

    /// `n` identical spins with coupling `a_x` and Larmor frequency `omega`.
    pub fn equal(n: usize, a_x: f64, omega: f64) -> Result<Self> {
        let spin = NuclearSpinParam::new(a_x, omega)?;
        Ok(SpinBath {
            spins: vec![spin; n],
        })
    }

    pub fn empty() -> Self {
        SpinBath::default()
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[NuclearSpinParam] {
        &self.spins
    }

    pub fn iter(&self) -> impl Iterator<Item = &NuclearSpinParam> {
        self.spins.iter()
    }

    /// Branch parameters of every spin, in bath order.
    pub fn branches(&self, t: f64, seq: SequenceKind) -> Vec<BranchParams> {
        self.spins
            .iter()
            .map(|s| derive_branch(s, t, seq))
            .collect()
    }

    /// Dephasing parameter `v` of every spin, in bath order.
    pub fn v_list(&self, t: f64, seq: SequenceKind) -> Vec<f64> {
        self.spins
            .iter()
            .map(|s| derive_branch(s, t, seq).v)
            .collect()
    }
}

/// Pulse sequence applied to the electron spin.
///
/// For [`SequenceKind::Echo`] the time argument everywhere is the delay
/// between the two pulses; the echo itself is observed at `2t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Fid,
    Echo,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 2] = [SequenceKind::Fid, SequenceKind::Echo];

    pub fn as_str(self) -> &'static str {
        match self {
            SequenceKind::Fid => "fid",
            SequenceKind::Echo => "echo",
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fid" => Ok(SequenceKind::Fid),
            "echo" => Ok(SequenceKind::Echo),
            other => Err(Error::InvalidParameter(format!(
                "unknown sequence `{other}` (expected fid or echo)"
            ))),
        }
    }
}

/// Experimental conditions. The electron Larmor frequency enters only
/// through the polarization `beta_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub beta_s: f64,
}

impl ExperimentConfig {
    pub fn new(beta_s: f64) -> Result<Self> {
        if !(beta_s.is_finite() && beta_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta_S must be a positive finite number, got {beta_s}"
            )));
        }
        Ok(ExperimentConfig { beta_s })
    }

    /// True when `beta_s` is small enough for the quadratic-order
    /// correlation formulas to be trusted.
    pub fn is_perturbative(&self) -> bool {
        self.beta_s <= BETA_WARN_THRESHOLD
    }

    /// Scale from reduced correlation units to bits: `β² / (16 ln 2)`.
    pub fn bits_per_reduced_unit(&self) -> f64 {
        self.beta_s * self.beta_s / (16.0 * std::f64::consts::LN_2)
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            beta_s: DEFAULT_BETA,
        }
    }
}

/// Per-spin quantities derived from the coupling, the field and the time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchParams {
    /// Precession frequency `sqrt(ω² + A²/4)` of the nucleus in the
    /// hyperfine-shifted field.
    pub omega_eff: f64,
    /// Direction cosines of the precession axis.
    pub n_x: f64,
    pub n_z: f64,
    /// Dephasing parameter, always in `[0, 2]`.
    pub v: f64,
    /// Non-negative branch phase, `cos theta = 1 - v`, in `[0, π]`.
    pub theta: f64,
}

/// Branch parameters of one nuclear spin at time `t` under `seq`.
///
/// A spin with `A_x = ω = 0` has no precession axis; it is assigned
/// `n_x = n_z = 0` and contributes no dephasing.
pub fn derive_branch(spin: &NuclearSpinParam, t: f64, seq: SequenceKind) -> BranchParams {
    let omega_eff = spin.omega.hypot(0.5 * spin.a_x);
    if omega_eff == 0.0 {
        return BranchParams {
            omega_eff: 0.0,
            n_x: 0.0,
            n_z: 0.0,
            v: 0.0,
            theta: 0.0,
        };
    }
    let n_x = spin.a_x / (2.0 * omega_eff);
    let n_z = spin.omega / omega_eff;
    let s2 = (0.5 * t * omega_eff).sin().powi(2);
    let v = match seq {
        SequenceKind::Fid => 2.0 * n_x * n_x * s2,
        SequenceKind::Echo => 8.0 * n_x * n_x * n_z * n_z * s2 * s2,
    };
    // rounding can push the analytic bounds by an ulp
    let v = v.clamp(0.0, 2.0);
    BranchParams {
        omega_eff,
        n_x,
        n_z,
        v,
        theta: theta_from_v(v),
    }
}

/// Branch phase `2 arcsin sqrt(v/2)` for `v` in `[0, 2]`.
pub fn theta_from_v(v: f64) -> f64 {
    let s = (0.5 * v).sqrt().min(1.0);
    if s == 1.0 {
        PI
    } else {
        2.0 * s.asin()
    }
}

/// Time-envelope of `v` at field ratio `x = 2ω/A`: the FID value at
/// `sin²(tΩ/2) = 1` and the echo value at `sin⁴(tΩ/2) = 1`.
///
/// `x = ∞` (a spin with no hyperfine coupling) gives 0 for both.
pub fn envelope_v(ratio: f64, seq: SequenceKind) -> f64 {
    if ratio.is_infinite() {
        return 0.0;
    }
    let x2 = ratio * ratio;
    let v = match seq {
        SequenceKind::Fid => 2.0 / (1.0 + x2),
        SequenceKind::Echo => 8.0 * x2 / ((1.0 + x2) * (1.0 + x2)),
    };
    v.clamp(0.0, 2.0)
}
