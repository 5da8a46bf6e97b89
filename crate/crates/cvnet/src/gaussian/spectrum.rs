use std::f64::consts::LN_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::types::{CovarianceMatrix, EntropyKind, NU_CLAMP_TOL};

/// Symplectic eigenvalues of V, deduplicated from 2M candidate values down to
/// M and sorted in descending order.
///
/// For positive definite V (every physical covariance matrix) the eigenvalues
/// come from the symmetric problem -(L^T Omega L)^2 with V = L L^T, which a
/// symmetric solver handles without convergence pathologies. Inputs that fail
/// the Cholesky factorization fall back to a Schur decomposition of Omega V.
///
/// Values below 1 by less than a scale-aware tolerance (never tighter than
/// 1e-8) are clamped to exactly 1; values further below 1 mean V is not a
/// physical covariance matrix and are an error.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<Vec<f64>> {
    symplectic_eigenvalues_with_noise(v, 0.0)
}

/// Same as [`symplectic_eigenvalues`] with an extra absolute noise scale
/// folded into the purity floor. Callers that assemble `v` from factored
/// forms see cancellation: the rounding left in the entries tracks the size
/// of the intermediate products, which the final entries no longer reveal.
pub(crate) fn symplectic_eigenvalues_with_noise(
    v: &CovarianceMatrix,
    noise_scale: f64,
) -> Result<Vec<f64>> {
    let m = v.dim_modes();
    let n = 2 * m;
    let mat = v.matrix();

    if let Some(chol) = nalgebra::linalg::Cholesky::new(mat.clone()) {
        let l = chol.l();
        // K = L^T Omega L is antisymmetric with eigenvalues +/- i nu_j, so
        // -K^2 is symmetric positive semidefinite with each nu_j^2 doubled.
        let mut omega_l = DMatrix::zeros(n, n);
        for k in 0..m {
            for j in 0..n {
                omega_l[(2 * k, j)] = l[(2 * k + 1, j)];
                omega_l[(2 * k + 1, j)] = -l[(2 * k, j)];
            }
        }
        let k_mat = l.transpose() * omega_l;
        let mut w = -(&k_mat * &k_mat);
        w = 0.5 * (&w + w.transpose());
        let mut sq: Vec<f64> = nalgebra::linalg::SymmetricEigen::new(w)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        sq.sort_by(|a, b| b.total_cmp(a));
        // Rounding while forming -K^2 is absolute at the scale of V and of
        // the largest nu^2, and the congruence accumulates it over n-term
        // inner products, so the purity floor widens with scale and size.
        let scale = sq
            .first()
            .copied()
            .unwrap_or(0.0)
            .max(mat.iter().fold(0.0f64, |a, &x| a.max(x.abs())))
            .max(noise_scale);
        let floor = ((64 * n * n) as f64 * f64::EPSILON * scale).max(NU_CLAMP_TOL);
        let mut nus = Vec::with_capacity(m);
        for k in 0..m {
            let nu_sq = 0.5 * (sq[2 * k] + sq[2 * k + 1]);
            if nu_sq >= 1.0 {
                nus.push(nu_sq.sqrt());
            } else if nu_sq >= 1.0 - floor {
                nus.push(1.0);
            } else {
                return Err(Error::EigenvalueBelowOne {
                    value: nu_sq.max(0.0).sqrt(),
                    tol: floor,
                });
            }
        }
        return Ok(nus);
    }

    // Omega * V: row 2k is row 2k+1 of V, row 2k+1 is -row 2k of V.
    let mut wv = DMatrix::zeros(n, n);
    for k in 0..m {
        for j in 0..n {
            wv[(2 * k, j)] = mat[(2 * k + 1, j)];
            wv[(2 * k + 1, j)] = -mat[(2 * k, j)];
        }
    }

    let schur = nalgebra::linalg::Schur::try_new(wv, 1e-12, 0).ok_or(Error::Numerical {
        context: "symplectic_eigenvalues",
        reason: "Schur iteration failed to converge".into(),
    })?;
    let eigs = schur.complex_eigenvalues();

    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));

    // Eigenvalues come in +/- i nu pairs with equal modulus; average each
    // adjacent pair after sorting to collapse 2M values into M.
    let mut nus = Vec::with_capacity(m);
    for k in 0..m {
        let nu = 0.5 * (moduli[2 * k] + moduli[2 * k + 1]);
        nus.push(clamp_nu(nu)?);
    }
    Ok(nus)
}

pub(crate) fn clamp_nu(nu: f64) -> Result<f64> {
    if nu >= 1.0 {
        Ok(nu)
    } else if nu >= 1.0 - NU_CLAMP_TOL {
        Ok(1.0)
    } else {
        Err(Error::EigenvalueBelowOne {
            value: nu,
            tol: NU_CLAMP_TOL,
        })
    }
}

/// Entropy contribution of one symplectic eigenvalue, in bits.
///
/// Von Neumann: g(x) = (x+1) log2(x+1) - x log2(x) at x = (nu-1)/2, with
/// g(0) = 0. Renyi of order alpha: log2((x+1)^alpha - x^alpha) / (alpha - 1).
/// Both are evaluated in forms that stay accurate for nu up to ~1e15.
pub fn mode_entropy(nu: f64, kind: EntropyKind) -> f64 {
    let x = 0.5 * (nu - 1.0);
    if x <= 0.0 {
        return 0.0;
    }
    match kind {
        EntropyKind::VonNeumann => (x.ln_1p() + x * (1.0 / x).ln_1p()) / LN_2,
        EntropyKind::Renyi { alpha } => {
            // ln g_alpha; the x >= 1 branch avoids overflow of x^alpha and
            // cancellation between the two powers.
            let ln_g = if x < 1.0 {
                ((x + 1.0).powf(alpha) - x.powf(alpha)).ln()
            } else {
                alpha * x.ln() + (alpha * (1.0 / x).ln_1p()).exp_m1().ln()
            };
            ln_g / (LN_2 * (alpha - 1.0))
        }
    }
}

/// Total entropy from a precomputed symplectic spectrum.
pub fn entropy_from_nus(nus: &[f64], kind: EntropyKind) -> f64 {
    nus.iter().map(|&nu| mode_entropy(nu, kind)).sum()
}

/// Entanglement entropy of the state with covariance `v_sub`, in bits.
pub fn entropy(v_sub: &CovarianceMatrix, kind: EntropyKind) -> Result<f64> {
    Ok(entropy_from_nus(&symplectic_eigenvalues(v_sub)?, kind))
}
