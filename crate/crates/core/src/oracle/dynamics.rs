//! Exact propagation on the dense Hilbert space.
//!
//! Everything here works in the electron rotating frame: the `ω_e S_z`
//! term never appears. For the echo it cancels identically and for the FID
//! it is a global rotation about z that neither `|g|` nor any correlation
//! measure can see. The sign of `⟨S_y⟩` depends on this choice.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::operator::{
    check_hermitian, embed, lowering, raising, spin_half, Axis, CMatrix, DenseOperator, Role,
};
use crate::error::{Error, Result};
use crate::model::{SequenceKind, SpinBath};

/// Fixed electron projection `S_z = ±1/2` that selects a nuclear
/// Hamiltonian branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElectronBranch {
    Up,
    Down,
}

impl ElectronBranch {
    pub fn sign(self) -> f64 {
        match self {
            ElectronBranch::Up => 1.0,
            ElectronBranch::Down => -1.0,
        }
    }
}

/// Dense reference implementation with a cap on the bath size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            cap: Oracle::DEFAULT_CAP,
        }
    }
}

impl Oracle {
    /// Largest bath handled by default: 256-dimensional nuclear space,
    /// 512-dimensional joint space.
    pub const DEFAULT_CAP: usize = 8;

    pub fn with_cap(cap: usize) -> Self {
        Oracle { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub(crate) fn check_bath(&self, bath: &SpinBath) -> Result<()> {
        if bath.n() > self.cap {
            return Err(Error::OracleCapExceeded {
                n: bath.n(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// `H± = −Σ ω_j I_jz ± ½ Σ A_j I_jx` on the `2ⁿ` nuclear space.
    pub fn nuclear_hamiltonian(
        &self,
        bath: &SpinBath,
        branch: ElectronBranch,
    ) -> Result<DenseOperator> {
        self.check_bath(bath)?;
        let n = bath.n();
        let dim = 1usize << n;
        let sx = spin_half(Axis::X);
        let sz = spin_half(Axis::Z);
        let mut h = CMatrix::zeros(dim, dim);
        for (j, spin) in bath.iter().enumerate() {
            let local =
                sz.map(|e| e * -spin.omega) + sx.map(|e| e * (0.5 * branch.sign() * spin.a_x));
            h += embed(&local, 1 << j, 1 << (n - j - 1));
        }
        Ok(DenseOperator::new_unchecked(h, Role::Hamiltonian))
    }

    /// Joint electron-nuclear Hamiltonian `S_z Σ A_j I_jx − Σ ω_j I_jz`,
    /// electron as the leading tensor factor.
    pub fn joint_hamiltonian(&self, bath: &SpinBath) -> Result<DenseOperator> {
        let up = self.nuclear_hamiltonian(bath, ElectronBranch::Up)?;
        let down = self.nuclear_hamiltonian(bath, ElectronBranch::Down)?;
        // S_z is diagonal, so H is block-diagonal with blocks H+ and H−
        let n = up.dim();
        let mut h = CMatrix::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(up.matrix());
        h.view_mut((n, n), (n, n)).copy_from(down.matrix());
        Ok(DenseOperator::new_unchecked(h, Role::Hamiltonian))
    }

    /// Nuclear propagator `U⁺` whose normalized trace is the signal:
    /// `e^{−itH+} e^{itH−}` for the FID and
    /// `e^{−itH+} e^{−itH−} e^{itH+} e^{itH−}` for the echo.
    pub fn evolution_unitary(
        &self,
        bath: &SpinBath,
        t: f64,
        seq: SequenceKind,
    ) -> Result<DenseOperator> {
        check_time(t)?;
        let hp = self.nuclear_hamiltonian(bath, ElectronBranch::Up)?;
        let hm = self.nuclear_hamiltonian(bath, ElectronBranch::Down)?;
        let fwd_p = expm_hermitian(&hp, t, 1.0)?;
        let bwd_m = expm_hermitian(&hm, t, -1.0)?;
        let u = match seq {
            SequenceKind::Fid => fwd_p.matrix() * bwd_m.matrix(),
            SequenceKind::Echo => {
                let fwd_m = expm_hermitian(&hm, t, 1.0)?;
                let bwd_p = expm_hermitian(&hp, t, -1.0)?;
                fwd_p.matrix() * fwd_m.matrix() * bwd_p.matrix() * bwd_m.matrix()
            }
        };
        DenseOperator::new(u, Role::Unitary)
    }

    /// `ρ = (1/Z)[1 − (β/2)(S₊ ⊗ U⁺ + S₋ ⊗ U⁺†)]`, `Z = 2^{n+1}`.
    pub fn density_matrix(
        &self,
        bath: &SpinBath,
        t: f64,
        seq: SequenceKind,
        beta_s: f64,
    ) -> Result<DenseOperator> {
        check_beta(beta_s)?;
        let u = self.evolution_unitary(bath, t, seq)?;
        Ok(density_from_unitary(u.matrix(), beta_s))
    }

    /// Same state built by propagating `(1 − β S_x)/Z` under the joint
    /// Hamiltonian, with a 180° x-pulse at time `t` for the echo.
    pub fn density_matrix_direct(
        &self,
        bath: &SpinBath,
        t: f64,
        seq: SequenceKind,
        beta_s: f64,
    ) -> Result<DenseOperator> {
        check_beta(beta_s)?;
        check_time(t)?;
        let h = self.joint_hamiltonian(bath)?;
        let dim = h.dim();
        let nuc = dim / 2;
        let sx = embed(&spin_half(Axis::X), 1, nuc);
        let z = dim as f64;
        let rho0 = (CMatrix::identity(dim, dim) - sx.map(|e| e * beta_s)).map(|e| e / z);

        let fwd = expm_hermitian(&h, t, 1.0)?;
        let w = match seq {
            SequenceKind::Fid => fwd.into_matrix(),
            SequenceKind::Echo => {
                let sx_op = DenseOperator::new_unchecked(sx, Role::Observable);
                let pulse = expm_hermitian(&sx_op, PI, 1.0)?;
                fwd.matrix() * pulse.matrix() * fwd.matrix()
            }
        };
        let rho = &w * rho0 * w.adjoint();
        Ok(DenseOperator::new_unchecked(rho, Role::Density))
    }
}

pub(crate) fn density_from_unitary(u: &CMatrix, beta_s: f64) -> DenseOperator {
    let nuc = u.nrows();
    let dim = 2 * nuc;
    let z = dim as f64;
    let pert = raising().kronecker(u) + lowering().kronecker(&u.adjoint());
    let rho = (CMatrix::identity(dim, dim) - pert.map(|e| e * (0.5 * beta_s))).map(|e| e / z);
    DenseOperator::new_unchecked(rho, Role::Density)
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

fn check_beta(beta_s: f64) -> Result<()> {
    // eigenvalues of ρ are (1 ± β/2)/Z
    if !(beta_s.is_finite() && (0.0..2.0).contains(&beta_s)) {
        return Err(Error::InvalidParameter(format!(
            "beta_S must lie in [0, 2) for a positive density matrix, got {beta_s}"
        )));
    }
    Ok(())
}

/// `exp(−i·sign·t·H)` for Hermitian `H`, via its eigendecomposition.
pub fn expm_hermitian(h: &DenseOperator, t: f64, sign: f64) -> Result<DenseOperator> {
    check_hermitian(h.matrix())?;
    let dim = h.dim();
    if t == 0.0 {
        return Ok(DenseOperator::identity(dim, Role::Unitary));
    }
    let eig = h.matrix().clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        dim,
        eig.eigenvalues
            .iter()
            .map(|&lam| num_complex::Complex64::from_polar(1.0, -sign * t * lam)),
    );
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (mut col, ph) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *ph;
    }
    Ok(DenseOperator::new_unchecked(
        scaled * v.adjoint(),
        Role::Unitary,
    ))
}
