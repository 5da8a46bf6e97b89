//! Random-walk theory for the ensemble-averaged weights: transition
//! matrices, weight evolution, the entropy-from-transmissivity map, Page
//! curves and their fluctuations, mixing-time estimators, closed-form
//! approximations, and light-cone extraction.
//!
//! Weights evolve by one round factor (1/2)(I + A_k) per time step, so the
//! theory clock matches the circuit clock step for step; the full-cycle
//! matrix power is recovered at round boundaries.

mod closed_form;
mod continuum;
mod mixing;
mod page;

pub use closed_form::{binomial_eta, binomial_weights, gaussian_eta, gaussian_weights};
pub use continuum::{
    continuum_deviation, light_cone, ConeFit, EntropySeries, LightConeTimes, RescaledProfile,
};
pub use mixing::{mixing_time, MixingMethod, DEFAULT_MIXING_EPSILON};
pub use page::{
    entropy_eta_derivative, entropy_from_eta, eta_equilibrium_law, page_curve, page_curve_approx,
    page_variance, EtaEquilibrium,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{EdgeColoring, NetworkGraph, Subsystem};

/// Normalized nonnegative weights over the vertices at a given time step.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    values: Vec<f64>,
    t: u64,
}

const NORMALIZATION_TOL: f64 = 1e-12;

impl WeightField {
    pub fn new(values: Vec<f64>, t: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "weight field must be nonempty".into(),
            });
        }
        if let Some(&bad) = values.iter().find(|&&v| !(v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("negative or NaN weight {bad}"),
            });
        }
        let sum = kahan_sum(values.iter().copied());
        let dev = (sum - 1.0).abs();
        if dev > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { deviation: dev });
        }
        Ok(Self { values, t })
    }

    /// All weight on one vertex at time `t` = 0.
    pub fn delta(n: usize, vertex: usize) -> Result<Self> {
        if vertex >= n {
            return Err(Error::InvalidParameter {
                name: "vertex",
                reason: format!("index {vertex} out of range for {n} vertices"),
            });
        }
        let mut values = vec![0.0; n];
        values[vertex] = 1.0;
        Ok(Self { values, t: 0 })
    }

    /// The uniform equilibrium field.
    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![1.0 / n as f64; n],
            t: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Largest absolute deviation from the uniform value.
    pub fn max_deviation_from_uniform(&self) -> f64 {
        let u = 1.0 / self.len() as f64;
        self.values
            .iter()
            .map(|&v| (v - u).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// The full-cycle transition matrix for the ensemble-averaged weights:
/// the ordered product over rounds of (1/2)(I + A_k), acting on row vectors.
/// Doubly stochastic, with the uniform vector as an exact fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    mat: DMatrix<f64>,
}

/// Dense transition matrices above this size are rejected; vector evolution
/// through [`evolve_weights`] has no such limit.
const DENSE_LIMIT: usize = 4096;

impl TransitionMatrix {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let n = mat.nrows();
        if n == 0 || mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "TransitionMatrix::new (square, nonzero)",
                expected: n.max(1),
                actual: mat.ncols(),
            });
        }
        for i in 0..n {
            let row: f64 = mat.row(i).iter().sum();
            let col: f64 = mat.column(i).iter().sum();
            if (row - 1.0).abs() > 1e-12 || (col - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter {
                    name: "matrix",
                    reason: format!("row/column {i} sums ({row}, {col}) break double stochasticity"),
                });
            }
        }
        if mat.iter().any(|&v| v < -1e-15) {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: "negative entry in transition matrix".into(),
            });
        }
        Ok(Self { mat })
    }

    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Second-largest eigenvalue modulus, the decay rate of deviations from
    /// uniform per full cycle.
    pub fn lambda_star(&self) -> Result<f64> {
        let schur = nalgebra::linalg::Schur::try_new(self.mat.clone(), 1e-12, 0).ok_or(
            Error::Numerical {
                context: "lambda_star",
                reason: "Schur iteration failed to converge".into(),
            },
        )?;
        let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(if moduli.len() > 1 { moduli[1] } else { 0.0 })
    }
}

/// Validates that a coloring's rounds are matchings over this graph's edges.
pub(crate) fn validate_coloring(graph: &NetworkGraph, coloring: &EdgeColoring) -> Result<()> {
    let n = graph.n_vertices();
    let mut covered = 0usize;
    for k in 0..coloring.n_rounds() {
        let mut touched = vec![false; n];
        for &(u, v) in coloring.round(k) {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph {
                    reason: format!("round {k} references vertex outside the graph"),
                });
            }
            if !graph.adjacent(u, v) {
                return Err(Error::InvalidGraph {
                    reason: format!("round {k} contains non-edge ({u}, {v})"),
                });
            }
            if touched[u] || touched[v] {
                return Err(Error::InvalidGraph {
                    reason: format!("round {k} is not a matching at edge ({u}, {v})"),
                });
            }
            touched[u] = true;
            touched[v] = true;
        }
        covered += coloring.round(k).len();
    }
    if covered != graph.n_edges() {
        return Err(Error::InvalidGraph {
            reason: format!(
                "coloring covers {covered} of {} edges",
                graph.n_edges()
            ),
        });
    }
    Ok(())
}

/// Builds the dense full-cycle transition matrix. Limited to graphs of at
/// most 4096 vertices; larger systems should evolve vectors directly.
pub fn transition_matrix(graph: &NetworkGraph, coloring: &EdgeColoring) -> Result<TransitionMatrix> {
    validate_coloring(graph, coloring)?;
    let n = graph.n_vertices();
    if n > DENSE_LIMIT {
        return Err(Error::Unsupported {
            reason: format!("dense transition matrix limited to {DENSE_LIMIT} vertices; got {n}"),
        });
    }
    // Accumulate P <- P * M_k by applying each round factor to P's columns
    // pairwise, which is O(n |E_k|) instead of a dense multiply.
    let mut p = DMatrix::<f64>::identity(n, n);
    for k in 0..coloring.n_rounds() {
        for &(u, v) in coloring.round(k) {
            for i in 0..n {
                let h = 0.5 * (p[(i, u)] + p[(i, v)]);
                p[(i, u)] = h;
                p[(i, v)] = h;
            }
        }
    }
    TransitionMatrix::new(p)
}

/// Advances the weights by `steps` single-round factors, starting from the
/// round selected by the field's own clock (round index t mod K).
pub fn evolve_weights(coloring: &EdgeColoring, w: &WeightField, steps: u64) -> WeightField {
    let mut values = w.values.clone();
    let k = coloring.n_rounds() as u64;
    for i in 0..steps {
        let round = ((w.t + i) % k) as usize;
        apply_round(coloring, round, &mut values);
    }
    WeightField {
        values,
        t: w.t + steps,
    }
}

/// One in-place round factor: every matched pair averages, loops idle.
/// Conserves each pair sum to within a single rounding of a + b.
pub(crate) fn apply_round(coloring: &EdgeColoring, round: usize, values: &mut [f64]) {
    for &(u, v) in coloring.round(round) {
        let h = 0.5 * (values[u] + values[v]);
        values[u] = h;
        values[v] = h;
    }
}

/// Total transmissivity into the subsystem: the weight it holds.
pub fn eta(w: &WeightField, l: &Subsystem) -> f64 {
    kahan_sum(l.members().iter().map(|&v| w.values[v]))
}

/// Predicted transmissivity change across one round: half the weight
/// imbalance over the round's cut-crossing edges. Exact (to rounding) for
/// the round about to be applied.
pub fn boundary_flow_step(w: &WeightField, l: &Subsystem, round_edges: &[(usize, usize)]) -> f64 {
    let mut delta = 0.0;
    for &(u, v) in round_edges {
        match (l.contains(u), l.contains(v)) {
            (true, false) => delta += 0.5 * (w.values[v] - w.values[u]),
            (false, true) => delta += 0.5 * (w.values[u] - w.values[v]),
            _ => {}
        }
    }
    delta
}
