use std::f64::consts::LN_2;

use statrs::distribution::{Beta, Continuous, ContinuousCDF};

use crate::error::{Error, Result};
use crate::gaussian::{mode_entropy, EntropyKind};

/// Entanglement entropy of a single squeezer of strength `r` whose weight
/// reaches the subsystem with total transmissivity `eta`:
/// the single-mode entropy at nu = sqrt(1 + 4 eta (1 - eta) sinh^2 r).
pub fn entropy_from_eta(eta: f64, r: f64, kind: EntropyKind) -> f64 {
    assert!(
        (-1e-9..=1.0 + 1e-9).contains(&eta),
        "transmissivity {eta} outside [0, 1]"
    );
    assert!(r >= 0.0, "squeezing strength must be nonnegative");
    let eta = eta.clamp(0.0, 1.0);
    let s2 = r.sinh().powi(2);
    let nu = (1.0 + 4.0 * eta * (1.0 - eta) * s2).sqrt();
    mode_entropy(nu, kind)
}

/// d/d eta of [`entropy_from_eta`] at fixed r, computed analytically.
pub fn entropy_eta_derivative(eta: f64, r: f64, kind: EntropyKind) -> f64 {
    assert!((0.0..=1.0).contains(&eta));
    let s2 = r.sinh().powi(2);
    let nu = (1.0 + 4.0 * eta * (1.0 - eta) * s2).sqrt();
    let x = 0.5 * (nu - 1.0);
    // dx/d eta = s^2 (1 - 2 eta) / nu.
    let dx = s2 * (1.0 - 2.0 * eta) / nu;
    let ds_dx = if x <= 0.0 {
        // g' diverges at x = 0; the product with dx = 0 at eta in {0, 1} is
        // taken as 0 by continuity along the symmetric direction.
        return 0.0;
    } else {
        match kind {
            EntropyKind::VonNeumann => (1.0 / x).ln_1p() / LN_2,
            EntropyKind::Renyi { alpha } => {
                // alpha ((x+1)^{a-1} - x^{a-1}) / (ln2 (a-1) g_a(x)), in the
                // same overflow-safe form as the entropy itself.
                let ln_top = if x < 1.0 {
                    ((x + 1.0).powf(alpha - 1.0) - x.powf(alpha - 1.0)).ln()
                } else {
                    (alpha - 1.0) * x.ln() + ((alpha - 1.0) * (1.0 / x).ln_1p()).exp_m1().ln()
                };
                let ln_g = if x < 1.0 {
                    ((x + 1.0).powf(alpha) - x.powf(alpha)).ln()
                } else {
                    alpha * x.ln() + (alpha * (1.0 / x).ln_1p()).exp_m1().ln()
                };
                alpha * (ln_top - ln_g).exp() / (LN_2 * (alpha - 1.0))
            }
        }
    };
    ds_dx * dx
}

/// Equilibrium Page curve: the entropy at the mean transmissivity |L|/|G|.
pub fn page_curve(l_size: usize, g_size: usize, r: f64, kind: EntropyKind) -> f64 {
    assert!(l_size <= g_size && g_size > 0);
    entropy_from_eta(l_size as f64 / g_size as f64, r, kind)
}

/// Large-squeezing approximation to the Page curve:
/// (1/2) log2(l (1-l)) + (r+1)/ln2 - 1 at l = |L|/|G|.
///
/// Unbounded below near the endpoints; callers plotting it should clamp.
pub fn page_curve_approx(l_size: usize, g_size: usize, r: f64) -> f64 {
    assert!(l_size <= g_size && g_size > 0);
    let l = l_size as f64 / g_size as f64;
    0.5 * (l * (1.0 - l)).log2() + (r + 1.0) / LN_2 - 1.0
}

/// The equilibrium law of the transmissivity eta for a bipartition with
/// |L| = a and |R| = b: Beta(a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaEquilibrium {
    a: usize,
    b: usize,
}

impl EtaEquilibrium {
    pub fn mean(&self) -> f64 {
        self.a as f64 / (self.a + self.b) as f64
    }

    /// |L||R| / (|G|^2 (|G| + 1)).
    pub fn variance(&self) -> f64 {
        let (a, b) = (self.a as f64, self.b as f64);
        let g = a + b;
        a * b / (g * g * (g + 1.0))
    }

    pub fn pdf(&self, eta: f64) -> f64 {
        Beta::new(self.a as f64, self.b as f64).unwrap().pdf(eta)
    }

    pub fn cdf(&self, eta: f64) -> f64 {
        Beta::new(self.a as f64, self.b as f64).unwrap().cdf(eta)
    }
}

/// Validated constructor for the equilibrium transmissivity law.
pub fn eta_equilibrium_law(l_size: usize, r_size: usize) -> Result<EtaEquilibrium> {
    if l_size == 0 || r_size == 0 {
        return Err(Error::InvalidParameter {
            name: "l_size",
            reason: "both sides of the bipartition must be nonempty".into(),
        });
    }
    Ok(EtaEquilibrium {
        a: l_size,
        b: r_size,
    })
}

/// Leading-order equilibrium variance of the entropy: the squared slope of
/// the entropy-transmissivity map times the variance of eta. Zero at the
/// degenerate sizes and, by symmetry, at |L| = |G|/2.
pub fn page_variance(l_size: usize, g_size: usize, r: f64, kind: EntropyKind) -> f64 {
    assert!(l_size <= g_size && g_size > 0);
    if l_size == 0 || l_size == g_size {
        return 0.0;
    }
    let eta = l_size as f64 / g_size as f64;
    let slope = entropy_eta_derivative(eta, r, kind);
    let law = EtaEquilibrium {
        a: l_size,
        b: g_size - l_size,
    };
    slope * slope * law.variance()
}
