//! Closed-form correlation measures at quadratic order in the polarization.
//!
//! Every quantity is computed in reduced units of `β²/(16 ln 2)` bits.
//! With `g = ∏(1 − v_j)` and
//! `K = ∏(1 − v_j)² − ∏[2(1 − v_j)² − 1]`:
//!
//! * total correlations `I = 2(1 − g²)`
//! * classical correlations `C = 1 − g² + |K|`, reached by measuring the
//!   electron along x when `K < 0` and along y when `K > 0`
//! * discord `D = 1 − g² − |K|`

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::model::{ExperimentConfig, SequenceKind, SpinBath};

/// Below this, `1 − g²` is treated as zero and the discord ratio as 0.
pub const DEGENERATE_INFORMATION: f64 = 1e-15;

/// All correlation measures at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationPoint {
    pub g: f64,
    pub k: f64,
    pub phi_opt: f64,
    pub i_red: f64,
    pub c_red: f64,
    pub d_red: f64,
    pub i_abs: f64,
    pub c_abs: f64,
    pub d_abs: f64,
    /// `D / I`, in `[0, 1/2]`.
    pub ratio: f64,
}

/// Normalized signal `g = ∏(1 − v_j)`: the FID amplitude, or the echo
/// amplitude observed at `2t`.
pub fn signal(bath: &SpinBath, t: f64, seq: SequenceKind) -> f64 {
    signal_from_v(&bath.v_list(t, seq))
}

pub fn signal_from_v(v: &[f64]) -> f64 {
    v.iter().map(|v| 1.0 - v).product()
}

/// `(I_red, I_abs)` for signal `g`.
pub fn mutual_information(g: f64, beta_s: f64) -> (f64, f64) {
    let loss = 1.0 - g * g;
    (2.0 * loss, beta_s * beta_s * loss / (8.0 * LN_2))
}

/// Interference factor `K`; zero for an empty list.
pub fn k_factor(v: &[f64]) -> f64 {
    let (a, b) = k_products(v);
    a - b
}

/// `(∏(1 − v)², ∏[2(1 − v)² − 1])`.
fn k_products(v: &[f64]) -> (f64, f64) {
    v.iter().fold((1.0, 1.0), |(a, b), &v| {
        let u2 = (1.0 - v) * (1.0 - v);
        (a * u2, b * (2.0 * u2 - 1.0))
    })
}

/// Optimal in-plane measurement angle: `π/2` when `K > 0`, otherwise 0.
pub fn optimal_angle(k: f64) -> f64 {
    if k > 0.0 {
        FRAC_PI_2
    } else {
        0.0
    }
}

/// Correlations for the given per-spin dephasing parameters.
pub fn correlation_point_from_v(v: &[f64], cfg: &ExperimentConfig) -> CorrelationPoint {
    let g = signal_from_v(v);
    let (a, b) = k_products(v);
    let k = a - b;
    let loss = 1.0 - g * g;
    let i_red = 2.0 * loss;
    let c_red = loss + k.abs();
    // 1 − g² − |K| reduces to 1 − b (K < 0) or 1 − 2a + b (K ≥ 0); only
    // the latter can round below zero
    let d_red = if k < 0.0 {
        1.0 - b
    } else {
        (loss - k).max(0.0)
    };
    let ratio = if loss < DEGENERATE_INFORMATION {
        0.0
    } else {
        (0.5 * (1.0 - k.abs() / loss)).clamp(0.0, 0.5)
    };
    let scale = cfg.bits_per_reduced_unit();
    CorrelationPoint {
        g,
        k,
        phi_opt: optimal_angle(k),
        i_red,
        c_red,
        d_red,
        i_abs: i_red * scale,
        c_abs: c_red * scale,
        d_abs: d_red * scale,
        ratio,
    }
}

/// Correlations of `bath` at time `t` under `seq`.
pub fn correlation_point(
    bath: &SpinBath,
    t: f64,
    seq: SequenceKind,
    cfg: &ExperimentConfig,
) -> CorrelationPoint {
    correlation_point_from_v(&bath.v_list(t, seq), cfg)
}

/// Small- and large-`Σv` estimates. Diagnostic only; the exact products
/// above are always authoritative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEstimates {
    /// `β² Σv / (4 ln 2)` bits.
    pub i_small: f64,
    /// `Σv`.
    pub ratio_small: f64,
    /// `½(1 − e^{−2Σv})`, for many weakly dephased spins.
    pub ratio_mid: f64,
    /// `β² / (8 ln 2)` bits.
    pub i_sat: f64,
    /// `1/2`: a single projection loses half the correlations.
    pub ratio_sat: f64,
}

pub fn asymptotic_estimates(v: &[f64], beta_s: f64) -> AsymptoticEstimates {
    let sum: f64 = v.iter().sum();
    let b2 = beta_s * beta_s;
    AsymptoticEstimates {
        i_small: b2 * sum / (4.0 * LN_2),
        ratio_small: sum,
        ratio_mid: 0.5 * (1.0 - (-2.0 * sum).exp()),
        i_sat: b2 / (8.0 * LN_2),
        ratio_sat: 0.5,
    }
}

/// `Σ_j s_j θ_j` for every sign pattern `s ∈ {±1}ⁿ`, in binary order of the
/// pattern with bit `j` set meaning `s_j = −1`.
pub fn signed_sums(thetas: &[f64]) -> Vec<f64> {
    let n = thetas.len();
    (0..1usize << n)
        .map(|mask| {
            thetas
                .iter()
                .enumerate()
                .map(|(j, th)| if mask >> j & 1 == 1 { -th } else { *th })
                .sum()
        })
        .collect()
}

/// Eigenphases `Θ_k = Σ_j ±Θ_j` of the nuclear propagator, all `2ⁿ` of
/// them, built from the per-spin dephasing parameters.
pub fn expanded_phases(v: &[f64]) -> Vec<f64> {
    let thetas: Vec<f64> = v.iter().map(|&v| crate::model::theta_from_v(v)).collect();
    signed_sums(&thetas)
}

/// `2⁻ⁿ Σ_k cos²(φ_k + Θ_k)`: the fraction of the electron polarization
/// kept when branch `k` is read out along angle `φ_k`.
pub fn readout_fidelity(phases: &[f64], angles: &[f64]) -> f64 {
    assert_eq!(phases.len(), angles.len(), "one angle per phase");
    let n = phases.len() as f64;
    phases
        .iter()
        .zip(angles)
        .map(|(th, phi)| (phi + th).cos().powi(2))
        .sum::<f64>()
        / n
}
