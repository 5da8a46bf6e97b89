//! Distributed-sensing variance limits and the entanglement witness built on
//! them.
//!
//! A network of modes jointly estimates a uniform displacement, each mode
//! carrying a fixed mean photon budget. Separable probes cannot beat the
//! standard quantum limit [`v_classical`]; a coherently entangled probe
//! reaches [`v_entangled`], whose Heisenberg scaling is quadratically
//! better in the mode count. A weight profile interpolates between the two:
//! its [`effective_modes`] says how many modes act coherently, and
//! [`witness_bound`] converts the variance advantage into a lower bound on
//! multipartite entanglement, in bits.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::walk::WeightField;

/// (sqrt(N+1) + sqrt(N))^2, the quadrature gain of a squeezed probe with
/// mean photon number N.
fn squeezed_gain(n: f64) -> f64 {
    let s = (n + 1.0).sqrt() + n.sqrt();
    s * s
}

/// Standard quantum limit for the displacement variance: `n_modes`
/// separable probes, each squeezed to `photon_budget` photons.
///
/// Meaningful for at least one mode and a nonnegative budget; scales as
/// 1/(16 |G| N) once the budget dominates vacuum noise.
pub fn v_classical(n_modes: usize, photon_budget: f64) -> f64 {
    0.25 / (n_modes as f64 * squeezed_gain(photon_budget))
}

/// Entangled variance floor: the whole budget `n_modes * photon_budget`
/// acts as one coherent probe, improving on [`v_classical`] by a factor
/// approaching the mode count.
pub fn v_entangled(n_modes: usize, photon_budget: f64) -> f64 {
    0.25 / (n_modes as f64 * squeezed_gain(n_modes as f64 * photon_budget))
}

/// Effective number of coherently contributing modes, (sum_x sqrt(w_x))^2.
///
/// Cauchy-Schwarz pins the range to [1, len]: exactly 1 for a delta field
/// and exactly len for uniform weights.
pub fn effective_modes(w: &WeightField) -> f64 {
    let s: f64 = w.values().iter().map(|&v| v.sqrt()).sum();
    s * s
}

/// Entanglement lower bound, in bits, reached by a homodyne estimator
/// whose mode weights are `w`: log2(V_C / V) with
/// V = (1/4) / (effective_modes * gain(|G| N_S)).
///
/// The mode count is the field's length. The bound is exactly 0 for a
/// single mode and reaches log2(V_C / V_E) at uniform weights. For
/// ensemble data, average the bounds of individual realizations rather
/// than feeding averaged weights: the bound is concave in the weights, and
/// per-realization averaging reflects what repeated experiments measure.
pub fn witness_bound(w: &WeightField, photon_budget: f64) -> f64 {
    let g = w.len();
    let v = 0.25 / (effective_modes(w) * squeezed_gain(g as f64 * photon_budget));
    (v_classical(g, photon_budget) / v).log2()
}

/// Diffusive closed form of the witness bound on a Cartesian lattice,
/// (D/2) log2(8 pi t / D): the value [`witness_bound`] approaches when the
/// weights have spread into a free Gaussian of age `t` and the photon
/// budget is large.
pub fn diffusive_witness_bound(dim: usize, t: u64) -> Result<f64> {
    if dim < 1 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "diffusive form needs at least one dimension".into(),
        });
    }
    if t == 0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "diffusive form requires t > 0".into(),
        });
    }
    let d = dim as f64;
    Ok(0.5 * d * (8.0 * PI * t as f64 / d).log2())
}

/// A fixed sensing configuration: mode count and per-mode photon budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingScenario {
    n_modes: usize,
    photon_budget: f64,
}

impl SensingScenario {
    pub fn new(n_modes: usize, photon_budget: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter {
                name: "n_modes",
                reason: "sensing needs at least one mode".into(),
            });
        }
        if !(photon_budget > 0.0) || !photon_budget.is_finite() {
            return Err(Error::InvalidParameter {
                name: "photon_budget",
                reason: format!("per-mode budget must be positive and finite, got {photon_budget}"),
            });
        }
        Ok(Self { n_modes, photon_budget })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn photon_budget(&self) -> f64 {
        self.photon_budget
    }

    pub fn v_classical(&self) -> f64 {
        v_classical(self.n_modes, self.photon_budget)
    }

    pub fn v_entangled(&self) -> f64 {
        v_entangled(self.n_modes, self.photon_budget)
    }

    /// Largest value [`Self::witness_bound`] can report, log2(V_C / V_E),
    /// reached at uniform weights.
    pub fn witness_cap(&self) -> f64 {
        (self.v_classical() / self.v_entangled()).log2()
    }

    /// [`witness_bound`] for a weight field sized to this scenario.
    pub fn witness_bound(&self, w: &WeightField) -> Result<f64> {
        if w.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                context: "SensingScenario::witness_bound (weight field length)",
                expected: self.n_modes,
                actual: w.len(),
            });
        }
        Ok(witness_bound(w, self.photon_budget))
    }
}
