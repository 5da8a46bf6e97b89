use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for structural matrix identities (symplectic, unitary, symmetric).
pub(crate) const STRUCT_TOL: f64 = 1e-10;

/// Symplectic eigenvalues within this distance below 1 are clamped to 1.
pub(crate) const NU_CLAMP_TOL: f64 = 1e-8;

/// The symplectic metric for `m` modes in interleaved ordering:
/// a direct sum of m blocks [[0, 1], [-1, 0]].
pub fn omega(m: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

/// A real 2m x 2m matrix S with S Omega S^T = Omega.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    mat: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Validates the symplectic identity to absolute tolerance 1e-10.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() % 2 != 0 || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                context: "SymplecticMatrix::new (square, even, nonzero)",
                expected: mat.nrows().max(2),
                actual: mat.ncols(),
            });
        }
        let m = mat.nrows() / 2;
        let w = omega(m);
        let dev = (&mat * &w * mat.transpose() - &w).abs().max();
        if dev > STRUCT_TOL {
            return Err(Error::NotSymplectic {
                deviation: dev,
                tol: STRUCT_TOL,
            });
        }
        Ok(Self { mat })
    }

    /// For matrices symplectic by construction; still checked in debug builds.
    pub(crate) fn new_unchecked(mat: DMatrix<f64>) -> Self {
        debug_assert!({
            let m = mat.nrows() / 2;
            let w = omega(m);
            (&mat * &w * mat.transpose() - &w).abs().max() <= 1e-9
        });
        Self { mat }
    }

    pub fn dim_modes(&self) -> usize {
        self.mat.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Whether S is also orthogonal, i.e. a passive gate.
    pub fn is_passive(&self) -> bool {
        let n = self.mat.nrows();
        (self.mat.transpose() * &self.mat - DMatrix::identity(n, n))
            .abs()
            .max()
            <= STRUCT_TOL
    }

    /// The 2x2 block coupling input mode `k` to output mode `j`.
    pub fn block(&self, j: usize, k: usize) -> Matrix2<f64> {
        Matrix2::new(
            self.mat[(2 * j, 2 * k)],
            self.mat[(2 * j, 2 * k + 1)],
            self.mat[(2 * j + 1, 2 * k)],
            self.mat[(2 * j + 1, 2 * k + 1)],
        )
    }
}

/// A real symmetric 2M x 2M covariance matrix, vacuum = identity.
///
/// Construction checks symmetry only; the spectral condition nu_i >= 1 is
/// O(M^3) and checked by [`CovarianceMatrix::validate_physical`] or wherever
/// symplectic eigenvalues are computed anyway.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    mat: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() % 2 != 0 || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                context: "CovarianceMatrix::new (square, even, nonzero)",
                expected: mat.nrows().max(2),
                actual: mat.ncols(),
            });
        }
        let dev = (&mat - mat.transpose()).abs().max();
        if dev > STRUCT_TOL {
            return Err(Error::InvalidCovariance {
                reason: format!("asymmetry {dev:.3e} exceeds {STRUCT_TOL:.1e}"),
            });
        }
        Ok(Self { mat })
    }

    pub(crate) fn new_unchecked(mat: DMatrix<f64>) -> Self {
        Self { mat }
    }

    /// The M-mode vacuum state.
    pub fn vacuum(m: usize) -> Self {
        Self {
            mat: DMatrix::identity(2 * m, 2 * m),
        }
    }

    pub fn dim_modes(&self) -> usize {
        self.mat.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.mat
    }

    /// Full physicality check: every symplectic eigenvalue >= 1 - 1e-8.
    pub fn validate_physical(&self) -> Result<()> {
        crate::gaussian::symplectic_eigenvalues(self).map(|_| ())
    }
}

/// A complex m x m unitary describing a passive linear-optics transform.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveUnitary {
    mat: DMatrix<Complex64>,
}

impl PassiveUnitary {
    /// Validates U^dagger U = I to 1e-10.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                context: "PassiveUnitary::new (square, nonzero)",
                expected: mat.nrows().max(1),
                actual: mat.ncols(),
            });
        }
        let dev = unitarity_deviation(&mat);
        if dev > STRUCT_TOL {
            return Err(Error::NotUnitary {
                deviation: dev,
                tol: STRUCT_TOL,
            });
        }
        Ok(Self { mat })
    }

    pub(crate) fn new_unchecked(mat: DMatrix<Complex64>) -> Self {
        debug_assert!(unitarity_deviation(&mat) <= 1e-9);
        Self { mat }
    }

    pub fn dim_modes(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// The real symplectic-orthogonal image; cannot fail since unitarity
    /// already holds by construction.
    pub fn symplectic(&self) -> SymplecticMatrix {
        crate::gaussian::transform::unitary_to_symplectic_unchecked(&self.mat)
    }
}

pub(crate) fn unitarity_deviation(mat: &DMatrix<Complex64>) -> f64 {
    let n = mat.nrows();
    let gram = mat.adjoint() * mat;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            dev = dev.max((gram[(i, j)] - target).norm());
        }
    }
    dev
}

/// Which entanglement entropy to compute. All entropies are in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyKind {
    VonNeumann,
    /// Renyi entropy of order alpha, alpha > 0 and alpha != 1.
    Renyi {
        alpha: f64,
    },
}

impl EntropyKind {
    /// Renyi entropy with validated order.
    pub fn renyi(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("Renyi order must be positive, finite, and != 1; got {alpha}"),
            });
        }
        Ok(Self::Renyi { alpha })
    }

    /// The conventional default order when a Renyi entropy is requested
    /// without one.
    pub fn renyi_default() -> Self {
        Self::Renyi { alpha: 2.0 }
    }
}

impl Default for EntropyKind {
    fn default() -> Self {
        Self::VonNeumann
    }
}
