use std::f64::consts::PI;

use nalgebra::linalg::Schur;
use num_complex::Complex64;

use super::operator::{unitarity_deviation, DenseOperator, OPERATOR_TOL};
use crate::correlations::signed_sums;
use crate::error::{Error, Result};

/// Multiset of eigenphases of a nuclear propagator, each wrapped to
/// `(−π, π]` and kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpectrum {
    phases: Vec<f64>,
}

/// Wrap an angle to `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

impl PhaseSpectrum {
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        let mut phases: Vec<f64> = phases.into_iter().map(wrap_phase).collect();
        phases.sort_by(f64::total_cmp);
        PhaseSpectrum { phases }
    }

    /// All `2ⁿ` sums `Σ_j ±θ_j` of per-spin branch phases.
    pub fn from_branch_phases(thetas: &[f64]) -> Self {
        PhaseSpectrum::new(signed_sums(thetas))
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Largest circular distance between matched phases after a greedy
    /// nearest-neighbour matching; `∞` when the sizes differ.
    pub fn max_mismatch(&self, other: &PhaseSpectrum) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        let mut used = vec![false; other.len()];
        let mut worst = 0.0f64;
        for &p in &self.phases {
            let (idx, dist) = other
                .phases
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, &q)| (i, circular_distance(p, q)))
                .fold((usize::MAX, f64::INFINITY), |acc, x| {
                    if x.1 < acc.1 {
                        x
                    } else {
                        acc
                    }
                });
            used[idx] = true;
            worst = worst.max(dist);
        }
        worst
    }

    /// True when negating every phase gives the same multiset within `tol`.
    pub fn is_negation_closed(&self, tol: f64) -> bool {
        let negated = PhaseSpectrum::new(self.phases.iter().map(|p| -p));
        self.max_mismatch(&negated) <= tol
    }
}

/// Eigenphases of a unitary, from its complex Schur form.
pub fn eigenphase_spectrum(u: &DenseOperator) -> Result<PhaseSpectrum> {
    let dev = unitarity_deviation(u.matrix());
    if dev > OPERATOR_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let dim = u.dim();
    if dim == 1 {
        return Ok(PhaseSpectrum::new([u.matrix()[(0, 0)].arg()]));
    }
    let schur = Schur::try_new(u.matrix().clone(), f64::EPSILON, 1000 * dim)
        .ok_or(Error::Decomposition("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    let mut eigs = Vec::with_capacity(dim);
    let mut k = 0;
    while k < dim {
        if k + 1 < dim && t[(k + 1, k)].norm() > 1e-14 {
            let [l1, l2] = eig2x2(t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
            eigs.push(l1);
            eigs.push(l2);
            k += 2;
        } else {
            eigs.push(t[(k, k)]);
            k += 1;
        }
    }
    Ok(PhaseSpectrum::new(eigs.into_iter().map(|z| z.arg())))
}

fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 2] {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    [half_tr + disc, half_tr - disc]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::operator::{CMatrix, Role};

    #[test]
    fn identity_has_zero_phases() {
        let spec = eigenphase_spectrum(&DenseOperator::identity(8, Role::Unitary)).unwrap();
        assert_eq!(spec.len(), 8);
        assert!(spec.phases().iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn diagonal_unitary_recovers_phases() {
        let phases = [0.3, -1.2, 2.9, PI];
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
        ));
        let spec = eigenphase_spectrum(&DenseOperator::new(m, Role::Unitary).unwrap()).unwrap();
        assert!(spec.max_mismatch(&PhaseSpectrum::new(phases)) < 1e-14);
    }

    #[test]
    fn signed_sums_of_right_angles() {
        let spec = PhaseSpectrum::from_branch_phases(&[PI / 2.0, PI / 2.0]);
        let expected = PhaseSpectrum::new([PI, 0.0, 0.0, -PI]);
        assert!(spec.max_mismatch(&expected) < 1e-15);
        assert!(spec.is_negation_closed(1e-15));
    }

    #[test]
    fn wrapping_identifies_plus_and_minus_pi() {
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!(circular_distance(PI - 1e-12, -PI + 1e-12) < 1e-11);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::identity(2, 2).map(|e| e * 2.0);
        let op = DenseOperator::new_unchecked(m, Role::Unitary);
        assert!(matches!(
            eigenphase_spectrum(&op),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn size_mismatch_is_infinite() {
        let a = PhaseSpectrum::new([0.0, 1.0]);
        let b = PhaseSpectrum::new([0.0]);
        assert!(a.max_mismatch(&b).is_infinite());
    }
}
