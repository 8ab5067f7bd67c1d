use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for the Hermitian, unitary and trace invariants.
pub const OPERATOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Hamiltonian,
    Unitary,
    Density,
    Observable,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Hamiltonian => "hamiltonian",
            Role::Unitary => "unitary",
            Role::Density => "density",
            Role::Observable => "observable",
        };
        f.write_str(s)
    }
}

/// Dense complex square matrix tagged with the role it plays.
///
/// Construction through [`DenseOperator::new`] checks the role invariant:
/// Hermitian for Hamiltonians, observables and density matrices, `U†U = 1`
/// for unitaries, and unit trace for density matrices. Positivity of a
/// density matrix is checked where its spectrum is computed.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    role: Role,
    mat: CMatrix,
}

impl DenseOperator {
    pub fn new(mat: CMatrix, role: Role) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        match role {
            Role::Hamiltonian | Role::Observable => {
                check_hermitian(&mat)?;
            }
            Role::Density => {
                check_hermitian(&mat)?;
                let tr = mat.trace().re;
                if (tr - 1.0).abs() > OPERATOR_TOL {
                    return Err(Error::BadTrace(tr));
                }
            }
            Role::Unitary => {
                let dev = unitarity_deviation(&mat);
                if dev > OPERATOR_TOL {
                    return Err(Error::NotUnitary(dev));
                }
            }
        }
        Ok(DenseOperator { role, mat })
    }

    pub(crate) fn new_unchecked(mat: CMatrix, role: Role) -> Self {
        DenseOperator { role, mat }
    }

    pub fn identity(dim: usize, role: Role) -> Self {
        DenseOperator {
            role,
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator {
            role: self.role,
            mat: self.mat.adjoint(),
        }
    }

    /// Largest entry-wise deviation from another operator.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        max_abs_diff(&self.mat, &other.mat)
    }

    /// `[A, B] = AB − BA`, tagged as an observable without checks.
    pub fn commutator(&self, other: &DenseOperator) -> CMatrix {
        &self.mat * &other.mat - &other.mat * &self.mat
    }
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn check_hermitian(m: &CMatrix) -> Result<()> {
    let dev = hermiticity_deviation(m);
    if dev > OPERATOR_TOL {
        Err(Error::NotHermitian(dev))
    } else {
        Ok(())
    }
}

pub(crate) fn unitarity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    max_abs_diff(&prod, &CMatrix::identity(n, n))
}

/// Spin-1/2 component axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Single-site spin-1/2 matrix for `axis` (Pauli matrix over two).
pub fn spin_half(axis: Axis) -> CMatrix {
    let h = 0.5;
    match axis {
        Axis::X => CMatrix::from_row_slice(2, 2, &[ZERO, c(h, 0.0), c(h, 0.0), ZERO]),
        Axis::Y => CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -h), c(0.0, h), ZERO]),
        Axis::Z => CMatrix::from_row_slice(2, 2, &[c(h, 0.0), ZERO, ZERO, c(-h, 0.0)]),
    }
}

/// Raising operator `S₊ = |↑⟩⟨↓|`.
pub fn raising() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

/// Lowering operator `S₋ = |↓⟩⟨↑|`.
pub fn lowering() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Spin component `axis` of site `site` in a register of `n_total`
/// spins-1/2. Site 0 is the most significant tensor factor.
pub fn spin_operator(n_total: usize, site: usize, axis: Axis) -> Result<DenseOperator> {
    if site >= n_total {
        return Err(Error::SiteOutOfRange { site, n_total });
    }
    let left = 1usize << site;
    let right = 1usize << (n_total - site - 1);
    let mat = embed(&spin_half(axis), left, right);
    Ok(DenseOperator::new_unchecked(mat, Role::Observable))
}

/// `1_left ⊗ op ⊗ 1_right`.
pub(crate) fn embed(op: &CMatrix, left: usize, right: usize) -> CMatrix {
    let id_l = CMatrix::identity(left, left);
    let id_r = CMatrix::identity(right, right);
    id_l.kronecker(op).kronecker(&id_r)
}
