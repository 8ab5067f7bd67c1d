//! Projective measurements on the electron and the exact discord search.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::dynamics::Oracle;
use super::entropy::{
    deficit_from_shifts, entropy_deficit, hermitian_spectrum, mutual_information_exact, Bipartition,
};
use super::operator::{c, spin_half, Axis, CMatrix, DenseOperator, Role};
use crate::error::{Error, Result};
use crate::model::{SequenceKind, SpinBath};

/// Measurement quantization axis for the electron spin, given by the
/// azimuth `phi` and the z direction cosine `a_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementAxis {
    pub phi: f64,
    pub a_z: f64,
}

impl MeasurementAxis {
    pub fn new(phi: f64, a_z: f64) -> Result<Self> {
        if !phi.is_finite() || !(-1.0..=1.0).contains(&a_z) {
            return Err(Error::InvalidParameter(format!(
                "measurement axis needs finite phi and |a_z| <= 1 (phi = {phi}, a_z = {a_z})"
            )));
        }
        Ok(MeasurementAxis { phi, a_z })
    }

    /// Axis in the xy plane.
    pub fn in_plane(phi: f64) -> Self {
        MeasurementAxis { phi, a_z: 0.0 }
    }

    /// Direction cosines `(a_x, a_y, a_z)`.
    pub fn direction(&self) -> [f64; 3] {
        let s = (1.0 - self.a_z * self.a_z).max(0.0).sqrt();
        [self.phi.cos() * s, self.phi.sin() * s, self.a_z]
    }

    /// `Π± = 1/2 ± (a_x S_x + a_y S_y + a_z S_z)` on the electron.
    pub fn projectors(&self) -> [CMatrix; 2] {
        let [ax, ay, az] = self.direction();
        let a_dot_s = spin_half(Axis::X).map(|e| e * ax)
            + spin_half(Axis::Y).map(|e| e * ay)
            + spin_half(Axis::Z).map(|e| e * az);
        let half = CMatrix::identity(2, 2).map(|e| e * 0.5);
        [&half + &a_dot_s, &half - &a_dot_s]
    }

    /// Unit vectors `|±⟩` spanning the projectors.
    fn kets(&self) -> [[num_complex::Complex64; 2]; 2] {
        let theta = self.a_z.clamp(-1.0, 1.0).acos();
        let (ch, sh) = ((0.5 * theta).cos(), (0.5 * theta).sin());
        let e = c(self.phi.cos(), self.phi.sin());
        [[c(ch, 0.0), e * sh], [c(sh, 0.0), -e * ch]]
    }
}

fn electron_split(rho: &DenseOperator) -> Result<Bipartition> {
    let dim = rho.dim();
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(dim, 2 * (dim / 2).max(1)));
    }
    Ok(Bipartition {
        first: 2,
        second: dim / 2,
    })
}

/// `Σ± (Π± ⊗ 1) ρ (Π± ⊗ 1)`, the electron being the leading factor.
pub fn projected_state(rho: &DenseOperator, axis: &MeasurementAxis) -> Result<DenseOperator> {
    let split = electron_split(rho)?;
    let id = CMatrix::identity(split.second, split.second);
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for p in axis.projectors() {
        let big = p.kronecker(&id);
        out += &big * rho.matrix() * &big;
    }
    Ok(DenseOperator::new_unchecked(out, Role::Density))
}

/// Mutual information of projected states of a fixed `ρ`, evaluated
/// through the two conditional nuclear blocks `⟨±|ρ|±⟩`.
///
/// The projected state is block diagonal in the measurement basis, so its
/// spectrum is the union of the block spectra and its nuclear marginal is
/// that of `ρ`.
pub struct ProjectedInformation {
    blocks: [[CMatrix; 2]; 2],
    nuclear_deficit: f64,
}

impl ProjectedInformation {
    pub fn new(rho: &DenseOperator) -> Result<Self> {
        let split = electron_split(rho)?;
        let n = split.second;
        let m = rho.matrix();
        let block = |a: usize, b: usize| m.view((a * n, b * n), (n, n)).into_owned();
        let blocks = [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]];
        let marginal = &blocks[0][0] + &blocks[1][1];
        let nuclear_deficit = entropy_deficit(&marginal)?;
        Ok(ProjectedInformation {
            blocks,
            nuclear_deficit,
        })
    }

    /// `I(Π_S(ρ))` in bits for the given axis.
    ///
    /// Entropies are carried as deficits from their maxima, which cancel:
    /// `I = δ(joint) − δ(outcome) − δ(nuclear)`.
    pub fn eval(&self, axis: &MeasurementAxis) -> Result<f64> {
        let n = self.blocks[0][0].nrows();
        let scale = (2 * n) as f64;
        let mut outcome = [0.0; 2];
        let mut joint = Vec::with_capacity(2 * n);
        for (k, ket) in axis.kets().iter().enumerate() {
            let mut cond = self.blocks[0][0].map(|e| e * ket[0].norm_sqr());
            cond += self.blocks[0][1].map(|e| e * (ket[0].conj() * ket[1]));
            cond += self.blocks[1][0].map(|e| e * (ket[1].conj() * ket[0]));
            cond += self.blocks[1][1].map(|e| e * ket[1].norm_sqr());
            // 2N·⟨k|ρ|k⟩ − 1: shifts of the projected state's spectrum
            let shifted = cond.map(|e| e * scale) - CMatrix::identity(n, n);
            outcome[k] = shifted.trace().re / n as f64;
            joint.extend(hermitian_spectrum(&shifted));
        }
        Ok(deficit_from_shifts(&joint, 2 * n)?
            - deficit_from_shifts(&outcome, 2)?
            - self.nuclear_deficit)
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopping
/// once the bracket is narrower than `tol`. Returns `(x_max, f_max)`.
pub fn golden_section_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Grid over the measurement sphere for the out-of-plane check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereGrid {
    /// Points in `a_z ∈ [−1, 1]`, endpoints included.
    pub polar: usize,
    /// Points in `phi ∈ [0, π)`.
    pub azimuthal: usize,
}

impl Default for SphereGrid {
    fn default() -> Self {
        SphereGrid {
            polar: 21,
            azimuthal: 36,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordOptions {
    /// Uniform scan points on `[0, π)`.
    pub grid_points: usize,
    /// Final bracket width of the golden-section refinement.
    pub golden_tol: f64,
    pub sphere: Option<SphereGrid>,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        DiscordOptions {
            grid_points: 721,
            golden_tol: 1e-10,
            sphere: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    /// `I − C` in bits.
    pub d_bits: f64,
    /// Maximizing in-plane angle, in `[0, π)` up to the refinement bracket.
    pub phi_star: f64,
    pub i_bits: f64,
    /// Maximal in-plane projected mutual information.
    pub c_bits: f64,
    /// Maximal projected mutual information over the sphere grid, when
    /// requested.
    pub sphere_c_bits: Option<f64>,
}

/// Maximize `I(Π_S(ρ))` over in-plane axes: uniform scan, then
/// golden-section refinement of the best bracket. The objective has
/// period π in `phi`.
pub fn maximize_in_plane(info: &ProjectedInformation, opts: &DiscordOptions) -> Result<(f64, f64)> {
    let npts = opts.grid_points.max(3);
    let step = PI / npts as f64;
    let values = (0..npts)
        .into_par_iter()
        .map(|k| info.eval(&MeasurementAxis::in_plane(k as f64 * step)))
        .collect::<Result<Vec<f64>>>()?;
    let (best_k, best) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (k, v)| if v > acc.1 { (k, v) } else { acc },
            );
    let centre = best_k as f64 * step;
    let (phi, refined) = golden_section_max(
        |phi| info.eval(&MeasurementAxis::in_plane(phi)),
        centre - step,
        centre + step,
        opts.golden_tol,
    )?;
    if refined >= best {
        Ok((phi.rem_euclid(PI), refined))
    } else {
        Ok((centre, best))
    }
}

/// Largest projected mutual information over a `(a_z, phi)` grid.
pub fn maximize_on_sphere(info: &ProjectedInformation, grid: &SphereGrid) -> Result<f64> {
    let polar = grid.polar.max(2);
    let azim = grid.azimuthal.max(1);
    (0..polar * azim)
        .into_par_iter()
        .map(|idx| {
            let (i, k) = (idx / azim, idx % azim);
            let a_z = -1.0 + 2.0 * i as f64 / (polar - 1) as f64;
            let phi = PI * k as f64 / azim as f64;
            info.eval(&MeasurementAxis { phi, a_z })
        })
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))
}

/// Discord of an electron-leading joint state: total mutual information
/// minus the best in-plane projected mutual information.
pub fn discord_of_state(rho: &DenseOperator, opts: &DiscordOptions) -> Result<DiscordResult> {
    let split = electron_split(rho)?;
    let i_bits = mutual_information_exact(rho, split)?;
    let info = ProjectedInformation::new(rho)?;
    let (phi_star, c_bits) = maximize_in_plane(&info, opts)?;
    let sphere_c_bits = match &opts.sphere {
        Some(grid) => Some(maximize_on_sphere(&info, grid)?),
        None => None,
    };
    Ok(DiscordResult {
        d_bits: i_bits - c_bits,
        phi_star,
        i_bits,
        c_bits,
        sphere_c_bits,
    })
}

impl Oracle {
    /// Exact discord of the evolved state at polarization `beta_s`.
    pub fn discord_exact(
        &self,
        bath: &SpinBath,
        t: f64,
        seq: SequenceKind,
        beta_s: f64,
        opts: &DiscordOptions,
    ) -> Result<DiscordResult> {
        let rho = self.density_matrix(bath, t, seq, beta_s)?;
        discord_of_state(&rho, opts)
    }
}
