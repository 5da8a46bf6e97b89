//! Gaussian-state linear algebra on quadrature phase space.
//!
//! States are zero-mean Gaussians represented by their covariance matrix in
//! the interleaved quadrature ordering (x_1, p_1, x_2, p_2, ...), normalized
//! so the vacuum covariance is the identity. Gates are symplectic matrices;
//! passive (photon-number-conserving) gates are additionally orthogonal and
//! come from complex unitaries via [`unitary_to_symplectic`]. Entanglement
//! entropies are functions of the symplectic eigenvalues alone.

mod haar;
mod spectrum;
mod transform;
mod types;

pub use haar::{haar_passive, haar_two_mode_passive};
pub use spectrum::{entropy, entropy_from_nus, mode_entropy, symplectic_eigenvalues};
pub(crate) use spectrum::symplectic_eigenvalues_with_noise;
pub use transform::{apply_gate, reduced_covariance, squeezer_symplectic, unitary_to_symplectic};
pub use types::{omega, CovarianceMatrix, EntropyKind, PassiveUnitary, SymplecticMatrix};
