use std::f64::consts::LN_2;

use super::operator::{CMatrix, DenseOperator, Role, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues of a density matrix below this are treated as rounding.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-12;

/// Split of a joint space into `first ⊗ second` factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    pub first: usize,
    pub second: usize,
}

impl Bipartition {
    /// Electron (leading qubit) against `n` nuclear spins.
    pub fn electron_nuclear(n: usize) -> Self {
        Bipartition {
            first: 2,
            second: 1 << n,
        }
    }

    pub fn dim(&self) -> usize {
        self.first * self.second
    }

    fn check(&self, rho: &DenseOperator) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim()));
        }
        Ok(())
    }
}

/// Reduced state of the first factor (second traced out).
pub fn reduce_to_first(rho: &DenseOperator, split: Bipartition) -> Result<DenseOperator> {
    split.check(rho)?;
    let (da, db) = (split.first, split.second);
    let m = rho.matrix();
    let out = CMatrix::from_fn(da, da, |a, b| {
        (0..db).fold(ZERO, |acc, j| acc + m[(a * db + j, b * db + j)])
    });
    Ok(DenseOperator::new_unchecked(out, Role::Density))
}

/// Reduced state of the second factor (first traced out).
pub fn reduce_to_second(rho: &DenseOperator, split: Bipartition) -> Result<DenseOperator> {
    split.check(rho)?;
    let (da, db) = (split.first, split.second);
    let m = rho.matrix();
    let mut out = CMatrix::zeros(db, db);
    for a in 0..da {
        out += m.view((a * db, a * db), (db, db));
    }
    Ok(DenseOperator::new_unchecked(out, Role::Density))
}

pub(crate) fn hermitian_spectrum(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// `log₂ d − S(ρ)` for a `d`-dimensional state, from the eigenvalues `ε` of
/// `d·ρ − 1`. Near the maximally mixed state this keeps full relative
/// precision, where subtracting entropies close to `log₂ d` would not.
pub(crate) fn entropy_deficit(m: &CMatrix) -> Result<f64> {
    let d = m.nrows();
    let shifted = m.map(|e| e * d as f64) - CMatrix::identity(d, d);
    deficit_from_shifts(&hermitian_spectrum(&shifted), d)
}

/// Deficit from precomputed shifts `ε_i = d λ_i − 1`.
pub(crate) fn deficit_from_shifts(shifts: &[f64], d: usize) -> Result<f64> {
    let d = d as f64;
    let mut s = 0.0;
    for &e in shifts {
        let lam = (1.0 + e) / d;
        if lam < -NEGATIVE_EIGENVALUE_TOL {
            return Err(Error::NegativeEigenvalue(lam));
        }
        if e > -1.0 {
            s += (1.0 + e) * e.ln_1p();
        }
    }
    Ok(s / (d * LN_2))
}

/// `S(ρ) = −Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DenseOperator) -> Result<f64> {
    Ok((rho.dim() as f64).log2() - entropy_deficit(rho.matrix())?)
}

/// `I = S(ρ_A) + S(ρ_B) − S(ρ)` in bits.
pub fn mutual_information_exact(rho: &DenseOperator, split: Bipartition) -> Result<f64> {
    let def_a = entropy_deficit(reduce_to_first(rho, split)?.matrix())?;
    let def_b = entropy_deficit(reduce_to_second(rho, split)?.matrix())?;
    let def_ab = entropy_deficit(rho.matrix())?;
    Ok(def_ab - def_a - def_b)
}
