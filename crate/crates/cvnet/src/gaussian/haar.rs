use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::gaussian::types::{PassiveUnitary, SymplecticMatrix};

/// Samples a Haar-random two-mode passive gate.
///
/// Four phases are uniform on [0, 2pi) and the transmissivity cos^2(theta) is
/// uniform on [0, 1]; that pair of laws makes the resulting beamsplitter
/// Haar-distributed on U(2) up to an irrelevant global phase. Returns both
/// the unitary and its symplectic image.
pub fn haar_two_mode_passive<R: Rng + ?Sized>(rng: &mut R) -> (PassiveUnitary, SymplecticMatrix) {
    let phi1 = rng.gen_range(0.0..TAU);
    let phi2 = rng.gen_range(0.0..TAU);
    let phi3 = rng.gen_range(0.0..TAU);
    let phi4 = rng.gen_range(0.0..TAU);
    let cos2: f64 = rng.gen_range(0.0..1.0);
    let theta = cos2.sqrt().acos();
    let (ct, st) = (theta.cos(), theta.sin());

    let mut u = DMatrix::zeros(2, 2);
    u[(0, 0)] = Complex64::from_polar(ct, phi1 + phi3);
    u[(0, 1)] = -Complex64::from_polar(st, phi2 + phi3);
    u[(1, 0)] = Complex64::from_polar(st, phi1 + phi4);
    u[(1, 1)] = Complex64::from_polar(ct, phi2 + phi4);

    let unitary = PassiveUnitary::new_unchecked(u);
    let symp = unitary.symplectic();
    (unitary, symp)
}

/// Samples an m x m Haar-random unitary by QR of a complex Ginibre matrix
/// with the standard phase fix (columns rescaled by the phases of R's
/// diagonal so the distribution is exactly Haar).
pub fn haar_passive<R: Rng + ?Sized>(m: usize, rng: &mut R) -> PassiveUnitary {
    assert!(m >= 1, "mode count must be at least 1");
    let ginibre = DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    PassiveUnitary::new_unchecked(q)
}
