//! Continuum companions to the lattice dynamics: the weight-diffusion
//! equation, its boundary-flux identity, and a coupled diffusion-growth
//! saturation model for entropy profiles.
//!
//! All solvers use explicit Euler in time and second-order central
//! differences in space. The parameter regimes of interest are mild, and the
//! transparent scheme makes every conservation claim directly checkable.

use std::ops::Range;

use crate::error::{Error, Result};

/// Fractional tolerance on the explicit-scheme stability bound; exact
/// equality with the limit is still stable.
const STABILITY_SLACK: f64 = 1e-12;

/// A scalar field on a uniform 1-D grid with an attached time step.
///
/// Values are cell averages; the mass convention is sum(values) * dx.
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    values: Vec<f64>,
    dx: f64,
    dt: f64,
    t: f64,
}

impl Field1D {
    pub fn new(values: Vec<f64>, dx: f64, dt: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "field needs at least one cell".into(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "field values must be finite".into(),
            });
        }
        for (name, v) in [("dx", dx), ("dt", dt)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("grid parameter must be positive and finite, got {v}"),
                });
            }
        }
        Ok(Self { values, dx, dt, t: 0.0 })
    }

    /// Unit-mass delta: 1/dx on one cell, zero elsewhere.
    pub fn delta(n: usize, cell: usize, dx: f64, dt: f64) -> Result<Self> {
        if cell >= n {
            return Err(Error::InvalidParameter {
                name: "cell",
                reason: format!("index {cell} out of range for {n} cells"),
            });
        }
        let mut values = vec![0.0; n];
        values[cell] = 1.0 / dx;
        Self::new(values, dx, dt)
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

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// sum(values) * dx.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx
    }

    /// Explicit Euler is stable for diffusivity * dt / dx^2 <= 1/2.
    fn check_stability(&self, diffusivity: f64) -> Result<()> {
        let number = diffusivity * self.dt / (self.dx * self.dx);
        if number > 0.5 * (1.0 + STABILITY_SLACK) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!(
                    "diffusion number {number:.3} exceeds the explicit stability limit 0.5; \
                     need dt <= {:.3e}",
                    0.5 * self.dx * self.dx / diffusivity
                ),
            });
        }
        Ok(())
    }
}

/// Second difference with reflecting (zero-flux) ends, in units of dx^2.
fn laplacian(values: &[f64], out: &mut [f64]) {
    let n = values.len();
    if n == 1 {
        out[0] = 0.0;
        return;
    }
    out[0] = values[1] - values[0];
    out[n - 1] = values[n - 2] - values[n - 1];
    for i in 1..n - 1 {
        out[i] = values[i + 1] - 2.0 * values[i] + values[i - 1];
    }
}

/// Evolves d_t w = (1/2D) Laplacian(w) for `steps` Euler steps, where D is
/// the lattice dimension the field models.
///
/// Reflecting boundaries make the stencil conservative, so the mass
/// sum(w) dx is exact to rounding over any number of steps.
pub fn diffuse_weights(field: &Field1D, steps: u64, d_dim: usize) -> Result<Field1D> {
    if d_dim < 1 {
        return Err(Error::InvalidParameter {
            name: "d_dim",
            reason: "diffusion needs at least one dimension".into(),
        });
    }
    let nu = 0.5 / d_dim as f64;
    field.check_stability(nu)?;
    let alpha = nu * field.dt / (field.dx * field.dx);
    let mut out = field.clone();
    let mut lap = vec![0.0; out.values.len()];
    for _ in 0..steps {
        laplacian(&out.values, &mut lap);
        for (v, l) in out.values.iter_mut().zip(&lap) {
            *v += alpha * l;
        }
    }
    out.t += steps as f64 * field.dt;
    Ok(out)
}

/// Compares the mass-rate of `interval` against the boundary flux that
/// should drive it: d/dt of eta = sum over the interval of w dx versus
/// (1/2D) times the discrete normal gradient through the interval's faces.
///
/// Returns (numeric rate, flux value). The numeric rate comes from one
/// explicit step, so the two agree to rounding by construction; their shared
/// value approaches the analytic boundary gradient at second order in dx.
pub fn boundary_flux_check(
    field: &Field1D,
    interval: Range<usize>,
    d_dim: usize,
) -> Result<(f64, f64)> {
    let n = field.values.len();
    if interval.start >= interval.end || interval.end > n {
        return Err(Error::InvalidSubsystem {
            reason: format!(
                "interval {}..{} is not a nonempty range within {n} cells",
                interval.start, interval.end
            ),
        });
    }
    if d_dim < 1 {
        return Err(Error::InvalidParameter {
            name: "d_dim",
            reason: "diffusion needs at least one dimension".into(),
        });
    }
    let nu = 0.5 / d_dim as f64;
    field.check_stability(nu)?;

    let eta = |values: &[f64]| -> f64 {
        values[interval.clone()].iter().sum::<f64>() * field.dx
    };
    let stepped = diffuse_weights(field, 1, d_dim)?;
    let numeric = (eta(&stepped.values) - eta(&field.values)) / field.dt;

    // Inward flux through each face the interval exposes; domain ends are
    // reflecting and contribute nothing.
    let w = &field.values;
    let mut flux = 0.0;
    if interval.end < n {
        flux += nu * (w[interval.end] - w[interval.end - 1]) / field.dx;
    }
    if interval.start > 0 {
        flux += nu * (w[interval.start - 1] - w[interval.start]) / field.dx;
    }
    Ok((numeric, flux))
}

/// Couplings of the saturation model: d_t S_T = A G (c - S_T) alongside
/// d_t G = D d^2_x G + f G^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicParams {
    /// A, the rate at which the carrier G drags S_T toward its target.
    pub coupling: f64,
    /// D, the carrier's diffusivity.
    pub diffusivity: f64,
    /// f, the carrier's quadratic self-interaction; negative values damp.
    pub growth: f64,
}

/// Configured saturation model on the cut grid: a target profile c, a
/// carrier field G with reflecting ends, and the tracked profile S_T.
#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicModel {
    params: EpidemicParams,
    c: Vec<f64>,
    s_init: Vec<f64>,
    g_init: Vec<f64>,
    dx: f64,
    dt: f64,
}

/// Profiles recorded by [`EpidemicModel::solve`], one pair per sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicSolution {
    times: Vec<f64>,
    s_t: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
}

impl EpidemicSolution {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn s_profile(&self, i: usize) -> &[f64] {
        &self.s_t[i]
    }

    pub fn g_profile(&self, i: usize) -> &[f64] {
        &self.g[i]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

impl EpidemicModel {
    /// Model with S_T starting at zero and G as a unit-mass delta at
    /// `source`; override either with the `with_initial_*` builders.
    pub fn new(
        params: EpidemicParams,
        c: Vec<f64>,
        source: usize,
        dx: f64,
        dt: f64,
    ) -> Result<Self> {
        if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: "target profile must be nonempty and finite".into(),
            });
        }
        for (name, v) in [
            ("coupling", params.coupling),
            ("diffusivity", params.diffusivity),
            ("growth", params.growth),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("parameter must be finite, got {v}"),
                });
            }
        }
        if params.diffusivity < 0.0 {
            return Err(Error::InvalidParameter {
                name: "diffusivity",
                reason: format!("diffusivity must be nonnegative, got {}", params.diffusivity),
            });
        }
        let g_init = Field1D::delta(c.len(), source, dx, dt)?;
        let probe = Field1D::new(c.clone(), dx, dt)?;
        probe.check_stability(params.diffusivity)?;
        Ok(Self {
            params,
            s_init: vec![0.0; c.len()],
            g_init: g_init.values,
            c,
            dx,
            dt,
        })
    }

    pub fn with_initial_s(mut self, s: Vec<f64>) -> Result<Self> {
        self.check_profile("s_init", &s)?;
        self.s_init = s;
        Ok(self)
    }

    pub fn with_initial_g(mut self, g: Vec<f64>) -> Result<Self> {
        self.check_profile("g_init", &g)?;
        self.g_init = g;
        Ok(self)
    }

    fn check_profile(&self, name: &'static str, p: &[f64]) -> Result<()> {
        if p.len() != self.c.len() {
            return Err(Error::DimensionMismatch {
                context: "EpidemicModel initial profile",
                expected: self.c.len(),
                actual: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: "initial profile must be finite".into(),
            });
        }
        Ok(())
    }

    pub fn target(&self) -> &[f64] {
        &self.c
    }

    /// Marches to each sample time in turn and records (S_T, G) there.
    /// Times must be finite, nonnegative, and strictly increasing; they are
    /// rounded to whole Euler steps of length dt.
    pub fn solve(&self, sample_times: &[f64]) -> Result<EpidemicSolution> {
        if sample_times.is_empty() {
            return Err(Error::InvalidParameter {
                name: "sample_times",
                reason: "need at least one sample time".into(),
            });
        }
        let mut prev = -1.0;
        for &t in sample_times {
            if !t.is_finite() || t < 0.0 || t <= prev {
                return Err(Error::InvalidParameter {
                    name: "sample_times",
                    reason: format!("times must be nonnegative and strictly increasing, got {t}"),
                });
            }
            prev = t;
        }
        let (a, d, f) = (self.params.coupling, self.params.diffusivity, self.params.growth);
        let alpha = d * self.dt / (self.dx * self.dx);
        let mut g = self.g_init.clone();
        let mut s = self.s_init.clone();
        let mut lap = vec![0.0; g.len()];
        let mut out = EpidemicSolution {
            times: Vec::with_capacity(sample_times.len()),
            s_t: Vec::with_capacity(sample_times.len()),
            g: Vec::with_capacity(sample_times.len()),
        };
        let mut step = 0u64;
        for &target in sample_times {
            let until = (target / self.dt).round() as u64;
            while step < until {
                laplacian(&g, &mut lap);
                // S_T sees the carrier before its own update, so the
                // steady state S_T = c is exact rather than first-order.
                for i in 0..g.len() {
                    s[i] += self.dt * a * g[i] * (self.c[i] - s[i]);
                    g[i] += alpha * lap[i] + self.dt * f * g[i] * g[i];
                }
                step += 1;
                let worst = g.iter().chain(s.iter()).fold(0.0f64, |m, &v| m.max(v.abs()));
                if !worst.is_finite() || worst > 1e12 {
                    return Err(Error::Diverged {
                        t: step as f64 * self.dt,
                        reason: format!(
                            "field magnitude reached {worst:.3e}; quadratic growth f = {f} \
                             is unstable for this initial carrier"
                        ),
                    });
                }
            }
            out.times.push(target);
            out.s_t.push(s.clone());
            out.g.push(g.clone());
        }
        Ok(out)
    }
}

/// One-call form of the common case: delta carrier at `source`, S_T from
/// zero, marched to each sample time.
pub fn epidemiology_solve(
    params: EpidemicParams,
    c: Vec<f64>,
    source: usize,
    dx: f64,
    dt: f64,
    sample_times: &[f64],
) -> Result<EpidemicSolution> {
    EpidemicModel::new(params, c, source, dx, dt)?.solve(sample_times)
}
