//! Multi-squeezer layouts and the additive superposition theory.
//!
//! With several squeezers present, the ensemble-averaged entropy profile is
//! well approximated by the sum of independent single-squeezer profiles, each
//! evolved from its own birth step. This module holds the layout type, the
//! blue-noise space-time placement that keeps squeezers apart, the superposed
//! theory curves, and the deviation metric that quantifies how far an engine
//! profile strays from additivity.

use std::f64::consts::{LN_2, TAU};

use rand::Rng;

use crate::engine::SqueezeEvent;
use crate::error::{Error, Result};
use crate::gaussian::EntropyKind;
use crate::graph::{EdgeColoring, Subsystem};
use crate::walk::{entropy_from_eta, eta, evolve_weights, WeightField};

/// Euclidean distance in the joint (x, t) plane of a 1-D chain, with one time
/// step worth `time_scale` lattice spacings.
pub fn spacetime_distance(a: &SqueezeEvent, b: &SqueezeEvent, time_scale: f64) -> f64 {
    let dx = a.vertex() as f64 - b.vertex() as f64;
    let dt = (a.t() as f64 - b.t() as f64) * time_scale;
    dx.hypot(dt)
}

/// A set of squeezer insertions over the space-time window of a 1-D chain,
/// together with the summary statistics the superposition theory depends on.
#[derive(Debug, Clone)]
pub struct SqueezerLayout {
    events: Vec<SqueezeEvent>,
    n_modes: usize,
    min_distance: f64,
    time_scale: f64,
}

impl SqueezerLayout {
    /// Wraps an explicit event list. `min_distance` is the spacing the list
    /// claims and is verified pairwise; pass 0 for hand-built layouts with no
    /// spacing guarantee. Stacked events (same vertex and step) are rejected
    /// either way.
    pub fn new(
        events: Vec<SqueezeEvent>,
        n_modes: usize,
        min_distance: f64,
        time_scale: f64,
    ) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidParameter {
                name: "events",
                reason: "a layout needs at least one squeezer".into(),
            });
        }
        if !(min_distance >= 0.0) || !min_distance.is_finite() {
            return Err(Error::InvalidParameter {
                name: "min_distance",
                reason: format!("must be finite and nonnegative, got {min_distance}"),
            });
        }
        if !(time_scale > 0.0) || !time_scale.is_finite() {
            return Err(Error::InvalidParameter {
                name: "time_scale",
                reason: format!("must be finite and positive, got {time_scale}"),
            });
        }
        let mut events = events;
        events.sort_by_key(|e| (e.t(), e.vertex()));
        for e in &events {
            if e.vertex() >= n_modes {
                return Err(Error::InvalidParameter {
                    name: "events",
                    reason: format!("vertex {} out of range for {n_modes} modes", e.vertex()),
                });
            }
        }
        for (i, a) in events.iter().enumerate() {
            for b in &events[i + 1..] {
                if a.vertex() == b.vertex() && a.t() == b.t() {
                    return Err(Error::InvalidParameter {
                        name: "events",
                        reason: format!("stacked squeezers at vertex {} step {}", a.vertex(), a.t()),
                    });
                }
                let dist = spacetime_distance(a, b, time_scale);
                if min_distance > 0.0 && dist < min_distance - 1e-9 {
                    return Err(Error::InvalidParameter {
                        name: "min_distance",
                        reason: format!(
                            "events at ({}, {}) and ({}, {}) sit {dist:.3} apart, below {min_distance}",
                            a.vertex(),
                            a.t(),
                            b.vertex(),
                            b.t()
                        ),
                    });
                }
            }
        }
        Ok(Self {
            events,
            n_modes,
            min_distance,
            time_scale,
        })
    }

    pub fn events(&self) -> &[SqueezeEvent] {
        &self.events
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn count(&self) -> usize {
        self.events.len()
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub fn time_scale(&self) -> f64 {
        self.time_scale
    }

    /// Squeezer density: events per mode.
    pub fn density(&self) -> f64 {
        self.events.len() as f64 / self.n_modes as f64
    }

    /// Mean squeezing strength over the layout.
    pub fn mean_strength(&self) -> f64 {
        self.events.iter().map(SqueezeEvent::r).sum::<f64>() / self.events.len() as f64
    }
}

/// Knobs for blue-noise placement: the minimum spacing, the uniform range
/// strengths are drawn from, and the space-time anisotropy.
#[derive(Debug, Clone)]
pub struct PoissonSampling {
    pub min_distance: f64,
    pub strength_range: (f64, f64),
    pub time_scale: f64,
}

impl PoissonSampling {
    pub fn new(min_distance: f64) -> Self {
        Self {
            min_distance,
            strength_range: (1.0, 3.0),
            time_scale: 1.0,
        }
    }
}

/// Bridson dart throwing over the window x in [0, M), t in [0, t_max]:
/// candidates are drawn from the annulus [d, 2d) around active points and
/// snapped to the integer lattice before the distance test, so the spacing
/// guarantee holds for the events exactly as emitted. A window too small to
/// hold a second event yields a single random one.
pub fn poisson_disk_spacetime<R: Rng + ?Sized>(
    n_modes: usize,
    t_max: u64,
    sampling: &PoissonSampling,
    rng: &mut R,
) -> Result<SqueezerLayout> {
    if n_modes == 0 {
        return Err(Error::InvalidParameter {
            name: "n_modes",
            reason: "the spatial window is empty".into(),
        });
    }
    let d = sampling.min_distance;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter {
            name: "min_distance",
            reason: format!("must be finite and positive, got {d}"),
        });
    }
    let (lo, hi) = sampling.strength_range;
    if !(0.0 < lo && lo <= hi) || !hi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "strength_range",
            reason: format!("need 0 < lo <= hi, got ({lo}, {hi})"),
        });
    }
    let a = sampling.time_scale;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "time_scale",
            reason: format!("must be finite and positive, got {a}"),
        });
    }

    // Background grid over scaled coordinates (x, a t); the cell side d/sqrt(2)
    // holds at most one accepted point, and a radius-d disk fits inside the
    // two-cell neighborhood scanned below.
    let cell = d / std::f64::consts::SQRT_2;
    let nx = ((n_modes - 1) as f64 / cell) as usize + 1;
    let ny = (t_max as f64 * a / cell) as usize + 1;
    let mut grid: Vec<Option<u32>> = vec![None; nx * ny];
    let cell_of = |x: usize, t: u64| -> usize {
        let cx = (x as f64 / cell) as usize;
        let cy = (t as f64 * a / cell) as usize;
        cy * nx + cx
    };

    let mut points: Vec<(usize, u64)> = Vec::new();
    let mut strengths: Vec<f64> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let accept = |points: &mut Vec<(usize, u64)>,
                      strengths: &mut Vec<f64>,
                      active: &mut Vec<usize>,
                      grid: &mut Vec<Option<u32>>,
                      x: usize,
                      t: u64,
                      r: f64| {
        grid[cell_of(x, t)] = Some(points.len() as u32);
        active.push(points.len());
        points.push((x, t));
        strengths.push(r);
    };
    let scaled = |p: (usize, u64)| (p.0 as f64, p.1 as f64 * a);

    let x0 = rng.gen_range(0..n_modes);
    let t0 = rng.gen_range(0..=t_max);
    let r0 = rng.gen_range(lo..=hi);
    accept(
        &mut points,
        &mut strengths,
        &mut active,
        &mut grid,
        x0,
        t0,
        r0,
    );

    const ATTEMPTS: usize = 30;
    while !active.is_empty() {
        let slot = rng.gen_range(0..active.len());
        let (px, pt) = scaled(points[active[slot]]);
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let radius = d * (1.0 + rng.gen::<f64>());
            let angle = rng.gen_range(0.0..TAU);
            let cx = px + radius * angle.cos();
            let ct = pt + radius * angle.sin();
            let x = cx.round();
            let t = (ct / a).round();
            if x < 0.0 || x >= n_modes as f64 || t < 0.0 || t > t_max as f64 {
                continue;
            }
            let (x, t) = (x as usize, t as u64);
            let (sx, st) = scaled((x, t));
            let (gx, gy) = ((sx / cell) as usize, (st / cell) as usize);
            let mut clear = true;
            'scan: for dy in gy.saturating_sub(2)..=(gy + 2).min(ny - 1) {
                for dx in gx.saturating_sub(2)..=(gx + 2).min(nx - 1) {
                    if let Some(idx) = grid[dy * nx + dx] {
                        let (qx, qt) = scaled(points[idx as usize]);
                        if (sx - qx).hypot(st - qt) < d {
                            clear = false;
                            break 'scan;
                        }
                    }
                }
            }
            if clear {
                let r = rng.gen_range(lo..=hi);
                accept(
                    &mut points,
                    &mut strengths,
                    &mut active,
                    &mut grid,
                    x,
                    t,
                    r,
                );
                placed = true;
                break;
            }
        }
        if !placed {
            active.swap_remove(slot);
        }
    }

    let events = points
        .into_iter()
        .zip(strengths)
        .map(|((x, t), r)| SqueezeEvent::new(x, t, r))
        .collect::<Result<Vec<_>>>()?;
    SqueezerLayout::new(events, n_modes, d, a)
}

/// Pointwise sum of per-squeezer theory curves over a shared grid.
pub fn superpose(curves: &[Vec<f64>]) -> Result<Vec<f64>> {
    let [first, rest @ ..] = curves else {
        return Err(Error::InvalidParameter {
            name: "curves",
            reason: "need at least one curve".into(),
        });
    };
    let mut sum = first.clone();
    for curve in rest {
        if curve.len() != sum.len() {
            return Err(Error::DimensionMismatch {
                context: "superpose",
                expected: sum.len(),
                actual: curve.len(),
            });
        }
        for (s, v) in sum.iter_mut().zip(curve) {
            *s += v;
        }
    }
    Ok(sum)
}

/// The superposition prediction at time `t`, one entry per subsystem: every
/// squeezer runs its own averaged walk from a delta at its vertex, with the
/// round clock started on its birth step, and the single-squeezer entropies
/// add. Squeezers born after `t` contribute nothing.
pub fn superposed_profile(
    coloring: &EdgeColoring,
    layout: &SqueezerLayout,
    subsystems: &[Subsystem],
    t: u64,
    kind: EntropyKind,
) -> Result<Vec<f64>> {
    let n = layout.n_modes();
    for round in coloring.rounds() {
        for &(u, v) in round {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph {
                    reason: format!("round edge ({u}, {v}) out of range for {n} modes"),
                });
            }
        }
    }
    for sub in subsystems {
        if sub.n_total() != n {
            return Err(Error::InvalidSubsystem {
                reason: format!(
                    "subsystem is over {} modes but the layout has {n}",
                    sub.n_total()
                ),
            });
        }
    }
    let mut curves = Vec::with_capacity(layout.count());
    for event in layout.events() {
        if event.t() > t {
            curves.push(vec![0.0; subsystems.len()]);
            continue;
        }
        let mut values = vec![0.0; n];
        values[event.vertex()] = 1.0;
        let born = WeightField::new(values, event.t())?;
        let field = evolve_weights(coloring, &born, t - event.t());
        curves.push(
            subsystems
                .iter()
                .map(|sub| entropy_from_eta(eta(&field, sub), event.r(), kind))
                .collect(),
        );
    }
    superpose(&curves)
}

/// Per-mode 1-norm deviation between an engine profile and the superposition
/// prediction, plus the same rescaled by the equilibrium per-mode norm.
#[derive(Debug, Clone, Copy)]
pub struct Deviation {
    pub per_mode: f64,
    pub relative: f64,
}

pub fn deviation(engine: &[f64], theory: &[f64], equilibrium_per_mode: f64) -> Result<Deviation> {
    if engine.len() != theory.len() || engine.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "deviation",
            expected: engine.len(),
            actual: theory.len(),
        });
    }
    if !(equilibrium_per_mode > 0.0) || !equilibrium_per_mode.is_finite() {
        return Err(Error::InvalidParameter {
            name: "equilibrium_per_mode",
            reason: format!("must be finite and positive, got {equilibrium_per_mode}"),
        });
    }
    let per_mode = engine
        .iter()
        .zip(theory)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / engine.len() as f64;
    Ok(Deviation {
        per_mode,
        relative: per_mode / equilibrium_per_mode,
    })
}

/// Equilibrium curves for a layout pushed to a single first-step layer: the
/// exact per-squeezer sum over the subsystem fractions, and the
/// large-squeezing approximation that depends on the layout only through its
/// density and mean strength. The approximation is derived for von Neumann
/// entropy and is meaningful away from the curve's edges.
#[derive(Debug, Clone)]
pub struct MultiPageCurve {
    fractions: Vec<f64>,
    exact: Vec<f64>,
    approx: Vec<f64>,
}

impl MultiPageCurve {
    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn exact(&self) -> &[f64] {
        &self.exact
    }

    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    /// Per-mode 1-norm of the exact curve; the natural normalization for
    /// relative deviations.
    pub fn per_mode_norm(&self) -> f64 {
        self.exact.iter().map(|s| s.abs()).sum::<f64>() / self.exact.len() as f64
    }
}

pub fn multi_page_curve(
    layout: &SqueezerLayout,
    fractions: &[f64],
    kind: EntropyKind,
) -> Result<MultiPageCurve> {
    for &f in fractions {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidParameter {
                name: "fractions",
                reason: format!("subsystem fractions must lie strictly inside (0, 1), got {f}"),
            });
        }
    }
    let exact: Vec<f64> = fractions
        .iter()
        .map(|&f| {
            layout
                .events()
                .iter()
                .map(|e| entropy_from_eta(f, e.r(), kind))
                .sum()
        })
        .collect();
    let n_q = layout.count() as f64;
    let r_bar = layout.mean_strength();
    let approx: Vec<f64> = fractions
        .iter()
        .map(|&f| n_q * (0.5 * (f * (1.0 - f)).log2() + (r_bar + 1.0) / LN_2 - 1.0))
        .collect();
    Ok(MultiPageCurve {
        fractions: fractions.to_vec(),
        exact,
        approx,
    })
}
