use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::{
    entropy_from_nus, symplectic_eigenvalues_with_noise, CovarianceMatrix, EntropyKind,
    SymplecticMatrix,
};

/// Baseline purity clamp for symplectic eigenvalues recovered from the
/// low-rank spectrum. Looser than the dense-path tolerance because the
/// column-space eigenproblem carries matrix entries of order e^{4r}; the
/// working floor additionally scales with the matrix norm.
const NU_TOL: f64 = 1e-6;

/// Pure Gaussian state of a passive circuit seeded by single-mode squeezers,
/// held in factored form V = I + U C U^T.
///
/// Every squeeze event contributes two columns to U and two diagonal entries
/// to C; passive gates act on four rows of U per edge. All measurements run
/// in the q-dimensional column space, so the cost scales with the number of
/// squeezers rather than with the full mode count.
#[derive(Debug, Clone)]
pub struct PureState {
    n_modes: usize,
    u: DMatrix<f64>,
    c: Vec<f64>,
}

impl PureState {
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            u: DMatrix::zeros(2 * n_modes, 0),
            c: Vec::new(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Number of squeeze events absorbed so far.
    pub fn n_squeezers(&self) -> usize {
        self.c.len() / 2
    }

    /// Applies a single-mode squeezer of strength `r` to `mode`: existing
    /// columns are rescaled on the mode's two rows and a fresh rank-2 block
    /// is appended.
    pub fn squeeze(&mut self, mode: usize, r: f64) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::InvalidParameter {
                name: "mode",
                reason: format!("index {mode} out of range for {} modes", self.n_modes),
            });
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("squeeze strength must be positive and finite, got {r}"),
            });
        }
        let (row_x, row_p) = (2 * mode, 2 * mode + 1);
        let (down, up) = ((-r).exp(), r.exp());
        let q = self.u.ncols();
        for k in 0..q {
            self.u[(row_x, k)] *= down;
            self.u[(row_p, k)] *= up;
        }
        let u = std::mem::replace(&mut self.u, DMatrix::zeros(0, 0));
        self.u = u.resize_horizontally(q + 2, 0.0);
        self.u[(row_x, q)] = 1.0;
        self.u[(row_p, q + 1)] = 1.0;
        self.c.push((-2.0 * r).exp_m1());
        self.c.push((2.0 * r).exp_m1());
        Ok(())
    }

    /// Applies a two-mode passive gate to modes `a` and `b`. The gate's
    /// symplectic matrix is orthogonal, so only the four affected rows of U
    /// change.
    pub fn apply_pair(&mut self, a: usize, b: usize, gate: &SymplecticMatrix) -> Result<()> {
        if gate.dim_modes() != 2 {
            return Err(Error::DimensionMismatch {
                context: "PureState::apply_pair (gate mode count)",
                expected: 2,
                actual: gate.dim_modes(),
            });
        }
        if a == b || a >= self.n_modes || b >= self.n_modes {
            return Err(Error::InvalidParameter {
                name: "modes",
                reason: format!("need two distinct modes below {}, got ({a}, {b})", self.n_modes),
            });
        }
        let s = gate.matrix();
        let rows = [2 * a, 2 * a + 1, 2 * b, 2 * b + 1];
        for k in 0..self.u.ncols() {
            let v = [
                self.u[(rows[0], k)],
                self.u[(rows[1], k)],
                self.u[(rows[2], k)],
                self.u[(rows[3], k)],
            ];
            for (i, &row) in rows.iter().enumerate() {
                self.u[(row, k)] =
                    s[(i, 0)] * v[0] + s[(i, 1)] * v[1] + s[(i, 2)] * v[2] + s[(i, 3)] * v[3];
            }
        }
        Ok(())
    }

    /// Expands the factored form into a dense covariance matrix.
    pub fn covariance(&self) -> CovarianceMatrix {
        let d = 2 * self.n_modes;
        let mut uc = self.u.clone();
        for (k, &ck) in self.c.iter().enumerate() {
            uc.column_mut(k).scale_mut(ck);
        }
        let w = &uc * self.u.transpose();
        let mut v = DMatrix::identity(d, d);
        for i in 0..d {
            for j in 0..d {
                v[(i, j)] += 0.5 * (w[(i, j)] + w[(j, i)]);
            }
        }
        CovarianceMatrix::new(v).expect("factored covariance is symmetric by construction")
    }

    /// Total mean photon number tr(V - I)/4; invariant under passive gates.
    pub fn photon_number(&self) -> f64 {
        0.25
            * self
                .c
                .iter()
                .enumerate()
                .map(|(k, &ck)| ck * self.u.column(k).norm_squared())
                .sum::<f64>()
    }

    /// det V computed in the column space; exactly 1 for a pure state.
    pub fn covariance_det(&self) -> f64 {
        let q = self.u.ncols();
        if q == 0 {
            return 1.0;
        }
        let g = self.u.transpose() * &self.u;
        let mut m = DMatrix::identity(q, q);
        for j in 0..q {
            for i in 0..q {
                m[(i, j)] += g[(i, j)] * self.c[j];
            }
        }
        m.determinant()
    }

    /// Membership mask for a validated subsystem mode list.
    fn subsystem_mask(&self, modes: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n_modes];
        for &m in modes {
            if m >= self.n_modes {
                return Err(Error::InvalidSubsystem {
                    reason: format!("mode {m} out of range for {} modes", self.n_modes),
                });
            }
            if std::mem::replace(&mut mask[m], true) {
                return Err(Error::InvalidSubsystem {
                    reason: format!("mode {m} listed twice"),
                });
            }
        }
        Ok(mask)
    }

    /// Symplectic pairing H = U_X^T Omega U_X summed over the modes of the
    /// mask with membership `select`, built exactly antisymmetric.
    fn pairing(&self, mask: &[bool], select: bool) -> DMatrix<f64> {
        let q = self.u.ncols();
        let mut h: DMatrix<f64> = DMatrix::zeros(q, q);
        for (m, &inside) in mask.iter().enumerate() {
            if inside != select {
                continue;
            }
            let (rx, rp) = (2 * m, 2 * m + 1);
            for i in 0..q {
                let (xi, pi) = (self.u[(rx, i)], self.u[(rp, i)]);
                for j in i + 1..q {
                    h[(i, j)] += xi * self.u[(rp, j)] - pi * self.u[(rx, j)];
                }
            }
        }
        for i in 0..q {
            for j in 0..i {
                h[(i, j)] = -h[(j, i)];
            }
        }
        h
    }

    /// Symplectic eigenvalues of the reduced state on `modes` that can
    /// differ from 1, one per squeezer and sorted descending; every other
    /// mode of the subsystem sits exactly at 1.
    ///
    /// Global purity reduces the spectrum to a q x q problem: with
    /// B = Omega V, B^2 = -I gives nu^2 = eig(I + B_LR B_RL), whose
    /// nontrivial part is eig((C H_L C) H_R) over the column space. Both
    /// factors are antisymmetric, so the product is skew-Hamiltonian and its
    /// eigenvalues come in exactly equal pairs, collapsed here to one value
    /// per squeezer.
    pub fn subsystem_symplectic_eigenvalues(&self, modes: &[usize]) -> Result<Vec<f64>> {
        let mask = self.subsystem_mask(modes)?;
        let q = self.u.ncols();
        if q == 0 {
            return Ok(Vec::new());
        }
        // Dense layouts can push q past the thinner side of the cut, where
        // the dense reduced problem is both smaller and better conditioned.
        let inside = mask.iter().filter(|&&b| b).count();
        let min_side = inside.min(self.n_modes - inside);
        if min_side > 0 && q > min_side {
            return self.dense_spectrum(modes);
        }
        let h_r = self.pairing(&mask, false);
        let mut d = self.pairing(&mask, true);
        for i in 0..q {
            for j in 0..q {
                d[(i, j)] *= self.c[i] * self.c[j];
            }
        }
        let m2 = d * h_r;
        let scale = m2.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
        let lambdas: Vec<f64> = if q == 2 {
            // One squeezer: the product of two 2x2 antisymmetric matrices is
            // a multiple of the identity, no eigensolver needed.
            vec![m2[(0, 0)], m2[(1, 1)]]
        } else {
            // The iteration budget matters: nalgebra's deflation test is
            // relative to neighboring diagonal entries, which vanish when a
            // pure subsystem makes m2 nilpotent, and the iteration can then
            // stall or emit NaN. Those cases drop to the dense path.
            match nalgebra::linalg::Schur::try_new(m2, 1e-11, 100 * q) {
                Some(schur) => {
                    let eigs = schur.complex_eigenvalues();
                    if eigs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                        return self.dense_spectrum(modes);
                    }
                    eigs.iter().map(|z| z.re).collect()
                }
                None => return self.dense_spectrum(modes),
            }
        };
        let mut lambdas = lambdas;
        lambdas.sort_by(f64::total_cmp);
        lambdas.reverse();
        // Eigenvalue noise is absolute at the matrix scale (entries reach
        // e^{4r} while eigenvalues sit at e^{2r}), so both the pair check
        // and the purity clamp widen with `scale`.
        let pair_tol = (256.0 * f64::EPSILON * scale).max(1e-12);
        let lam_floor = (64.0 * f64::EPSILON * scale).max(2.0 * NU_TOL);
        let mut out = Vec::with_capacity(q / 2);
        for k in 0..q / 2 {
            let (a, b) = (lambdas[2 * k], lambdas[2 * k + 1]);
            if (a - b).abs() > pair_tol {
                return self.dense_spectrum(modes);
            }
            let nu_sq = 1.0 + 0.5 * (a + b);
            if nu_sq >= 1.0 {
                out.push(nu_sq.sqrt());
            } else if nu_sq >= 1.0 - lam_floor {
                out.push(1.0);
            } else {
                // Too far below purity for the fast path's conditioning;
                // let the dense route decide whether it is real.
                return self.dense_spectrum(modes);
            }
        }
        Ok(out)
    }

    /// Fallback spectrum via the dense reduced covariance, shaped like the
    /// low-rank result: sorted descending and padded or trimmed to one value
    /// per squeezer, where every value touched by the resize equals 1.
    fn dense_spectrum(&self, modes: &[usize]) -> Result<Vec<f64>> {
        let q = self.u.ncols() / 2;
        // A pure global state carries the same nontrivial spectrum on both
        // sides of the cut, so reduce whichever side is thinner.
        let rows: Vec<usize> = if 2 * modes.len() <= self.n_modes || modes.len() == self.n_modes {
            modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
        } else {
            let mask = self.subsystem_mask(modes)?;
            (0..self.n_modes)
                .filter(|&m| !mask[m])
                .flat_map(|m| [2 * m, 2 * m + 1])
                .collect()
        };
        let d = rows.len();
        let mut uc = self.u.select_rows(rows.iter());
        let u_l = uc.clone();
        for (k, &ck) in self.c.iter().enumerate() {
            uc.column_mut(k).scale_mut(ck);
        }
        let w = uc * u_l.transpose();
        let mut v = DMatrix::identity(d, d);
        for i in 0..d {
            for j in 0..d {
                v[(i, j)] += 0.5 * (w[(i, j)] + w[(j, i)]);
            }
        }
        // Both the sums behind w and the rounding accumulated in U over the
        // evolution cancel terms as large as colmax^2 * |c| (full-state
        // columns: a later squeeze on an occupied vertex rescales rows far
        // outside any one cut). The purity floor must see that scale, which
        // the surviving entries no longer reveal.
        let formation = (0..self.u.ncols())
            .map(|k| {
                let m = self.u.column(k).amax();
                m * m * self.c[k].abs()
            })
            .fold(0.0f64, f64::max);
        let v = CovarianceMatrix::new(v).expect("reduced factored covariance is symmetric");
        let mut nus = symplectic_eigenvalues_with_noise(&v, formation)?;
        nus.resize(q, 1.0);
        Ok(nus)
    }

    /// Entanglement entropy of the reduced state on `modes`, in bits.
    pub fn entropy_of(&self, modes: &[usize], kind: EntropyKind) -> Result<f64> {
        Ok(entropy_from_nus(
            &self.subsystem_symplectic_eigenvalues(modes)?,
            kind,
        ))
    }
}
