use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::types::{CovarianceMatrix, SymplecticMatrix};

/// Single-mode squeezer diag(e^{-r}, e^{r}): x is squeezed for r > 0.
///
/// `r` must be finite; any sign is allowed.
pub fn squeezer_symplectic(r: f64) -> SymplecticMatrix {
    assert!(r.is_finite(), "squeezing strength must be finite");
    let mut mat = DMatrix::zeros(2, 2);
    mat[(0, 0)] = (-r).exp();
    mat[(1, 1)] = r.exp();
    SymplecticMatrix::new_unchecked(mat)
}

/// Real symplectic-orthogonal image of a complex passive unitary, in
/// interleaved quadrature ordering.
///
/// Rejects inputs whose unitarity deviation exceeds 1e-8. The map is a group
/// homomorphism: `map(U1 * U2) = map(U1) * map(U2)`.
pub fn unitary_to_symplectic(u: &DMatrix<Complex64>) -> Result<SymplecticMatrix> {
    if u.nrows() != u.ncols() || u.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            context: "unitary_to_symplectic (square, nonzero)",
            expected: u.nrows().max(1),
            actual: u.ncols(),
        });
    }
    let dev = crate::gaussian::types::unitarity_deviation(u);
    const OP_TOL: f64 = 1e-8;
    if dev > OP_TOL {
        return Err(Error::NotUnitary {
            deviation: dev,
            tol: OP_TOL,
        });
    }
    Ok(unitary_to_symplectic_unchecked(u))
}

/// With a' = U a the quadratures transform as x' = Re(U) x - Im(U) p,
/// p' = Im(U) x + Re(U) p; this packs those blocks in interleaved order.
pub(crate) fn unitary_to_symplectic_unchecked(u: &DMatrix<Complex64>) -> SymplecticMatrix {
    let m = u.nrows();
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        for k in 0..m {
            let re = u[(j, k)].re;
            let im = u[(j, k)].im;
            s[(2 * j, 2 * k)] = re;
            s[(2 * j, 2 * k + 1)] = -im;
            s[(2 * j + 1, 2 * k)] = im;
            s[(2 * j + 1, 2 * k + 1)] = re;
        }
    }
    SymplecticMatrix::new_unchecked(s)
}

/// Conjugates V by S embedded on the listed modes: V -> S_emb V S_emb^T.
///
/// `modes` gives the global mode index for each of the gate's modes, in gate
/// order; indices must be distinct and in range.
pub fn apply_gate(
    v: &CovarianceMatrix,
    s: &SymplecticMatrix,
    modes: &[usize],
) -> Result<CovarianceMatrix> {
    let mut out = v.clone();
    apply_gate_in_place(&mut out, s, modes)?;
    Ok(out)
}

pub(crate) fn apply_gate_in_place(
    v: &mut CovarianceMatrix,
    s: &SymplecticMatrix,
    modes: &[usize],
) -> Result<()> {
    let k = s.dim_modes();
    let m_total = v.dim_modes();
    if modes.len() != k {
        return Err(Error::DimensionMismatch {
            context: "apply_gate (gate modes vs index list)",
            expected: k,
            actual: modes.len(),
        });
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= m_total {
            return Err(Error::InvalidSubsystem {
                reason: format!("mode index {m} out of range for {m_total} modes"),
            });
        }
        if modes[..i].contains(&m) {
            return Err(Error::InvalidSubsystem {
                reason: format!("duplicate mode index {m}"),
            });
        }
    }

    let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    let n = 2 * m_total;
    let sm = s.matrix();
    let mat = v.matrix_mut();

    // Rows: V[idx, :] <- S * V[idx, :]
    let mut gathered = DMatrix::zeros(2 * k, n);
    for (a, &i) in idx.iter().enumerate() {
        gathered.row_mut(a).copy_from(&mat.row(i));
    }
    let rotated = sm * &gathered;
    for (a, &i) in idx.iter().enumerate() {
        mat.row_mut(i).copy_from(&rotated.row(a));
    }

    // Columns: V[:, idx] <- V[:, idx] * S^T
    let mut gathered_c = DMatrix::zeros(n, 2 * k);
    for (a, &i) in idx.iter().enumerate() {
        gathered_c.column_mut(a).copy_from(&mat.column(i));
    }
    let rotated_c = gathered_c * sm.transpose();
    for (a, &i) in idx.iter().enumerate() {
        mat.column_mut(i).copy_from(&rotated_c.column(a));
    }

    // Exact symmetry can drift over many conjugations; restore it on the
    // touched rows/columns.
    for &i in &idx {
        for j in 0..n {
            let avg = 0.5 * (mat[(i, j)] + mat[(j, i)]);
            mat[(i, j)] = avg;
            mat[(j, i)] = avg;
        }
    }
    Ok(())
}

/// Principal submatrix on the given modes' quadrature rows and columns.
pub fn reduced_covariance(v: &CovarianceMatrix, subsystem: &[usize]) -> Result<CovarianceMatrix> {
    if subsystem.is_empty() {
        return Err(Error::InvalidSubsystem {
            reason: "subsystem is empty".into(),
        });
    }
    let m_total = v.dim_modes();
    for (i, &m) in subsystem.iter().enumerate() {
        if m >= m_total {
            return Err(Error::InvalidSubsystem {
                reason: format!("mode index {m} out of range for {m_total} modes"),
            });
        }
        if subsystem[..i].contains(&m) {
            return Err(Error::InvalidSubsystem {
                reason: format!("duplicate mode index {m}"),
            });
        }
    }
    let idx: Vec<usize> = subsystem.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    let k = idx.len();
    let mat = v.matrix();
    let mut sub = DMatrix::zeros(k, k);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            sub[(a, b)] = mat[(i, j)];
        }
    }
    Ok(CovarianceMatrix::new_unchecked(sub))
}
