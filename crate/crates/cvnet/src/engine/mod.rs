//! Monte Carlo simulation of the random circuit itself: squeeze events on a
//! gate schedule of colored rounds, pure-state covariance evolution, entropy
//! sampling, per-realization weight tracking, and streaming ensemble
//! statistics over independent seeds.

mod state;

pub use state::PureState;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{haar_two_mode_passive, EntropyKind};
use crate::graph::{EdgeColoring, NetworkGraph, Subsystem};
use crate::walk::{validate_coloring, WeightField};

/// One single-mode squeezer insertion at a space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeEvent {
    vertex: usize,
    t: u64,
    r: f64,
}

impl SqueezeEvent {
    pub fn new(vertex: usize, t: u64, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("squeeze strength must be positive and finite, got {r}"),
            });
        }
        Ok(Self { vertex, t, r })
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Full description of one simulation: circuit layout, squeeze schedule,
/// horizon, seed, and the measurement plan.
///
/// Time accounting: step t (for t in 0..horizon) first applies every event
/// with t* = t, then the passive round t mod K. A sample at time tau records
/// the state after tau completed steps, so tau = 0 is the initial vacuum and
/// the clock matches the walk-theory time axis.
#[derive(Debug, Clone)]
pub struct CircuitRun {
    graph: NetworkGraph,
    coloring: EdgeColoring,
    events: Vec<SqueezeEvent>,
    horizon: u64,
    base_seed: u64,
    subsystems: Vec<Subsystem>,
    sample_times: Vec<u64>,
    kind: EntropyKind,
}

impl CircuitRun {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        graph: NetworkGraph,
        coloring: EdgeColoring,
        events: Vec<SqueezeEvent>,
        horizon: u64,
        base_seed: u64,
        subsystems: Vec<Subsystem>,
        sample_times: Vec<u64>,
        kind: EntropyKind,
    ) -> Result<Self> {
        validate_coloring(&graph, &coloring)?;
        if coloring.n_rounds() == 0 {
            return Err(Error::InvalidGraph {
                reason: "circuit needs at least one round of gates".into(),
            });
        }
        let n = graph.n_vertices();
        let mut events = events;
        events.sort_by_key(|e| (e.t, e.vertex));
        for pair in events.windows(2) {
            if pair[0].t == pair[1].t && pair[0].vertex == pair[1].vertex {
                return Err(Error::Schedule {
                    reason: format!(
                        "two squeeze events at vertex {} and time {}",
                        pair[0].vertex, pair[0].t
                    ),
                });
            }
        }
        for e in &events {
            if e.vertex >= n {
                return Err(Error::Schedule {
                    reason: format!("event vertex {} out of range for {n} vertices", e.vertex),
                });
            }
            // Events land at the start of step t*, so they need a step to
            // run in; an event at t* = horizon would silently never fire.
            if e.t >= horizon {
                return Err(Error::Schedule {
                    reason: format!(
                        "event at t = {} does not fit a horizon of {horizon} steps",
                        e.t
                    ),
                });
            }
        }
        for s in &subsystems {
            if s.n_total() != n {
                return Err(Error::InvalidSubsystem {
                    reason: format!(
                        "subsystem sized for {} vertices on a graph of {n}",
                        s.n_total()
                    ),
                });
            }
        }
        let mut sample_times = sample_times;
        sample_times.sort_unstable();
        sample_times.dedup();
        if let Some(&last) = sample_times.last() {
            if last > horizon {
                return Err(Error::Schedule {
                    reason: format!("sample time {last} beyond horizon {horizon}"),
                });
            }
        }
        Ok(Self {
            graph,
            coloring,
            events,
            horizon,
            base_seed,
            subsystems,
            sample_times,
            kind,
        })
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn coloring(&self) -> &EdgeColoring {
        &self.coloring
    }

    pub fn events(&self) -> &[SqueezeEvent] {
        &self.events
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn sample_times(&self) -> &[u64] {
        &self.sample_times
    }

    pub fn kind(&self) -> EntropyKind {
        self.kind
    }

    /// Same run with a different base seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }
}

/// Entropy series of a single realization, one row per measured subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    sample_times: Vec<u64>,
    entropies: Vec<Vec<f64>>,
}

impl RunResult {
    pub fn sample_times(&self) -> &[u64] {
        &self.sample_times
    }

    pub fn n_subsystems(&self) -> usize {
        self.entropies.len()
    }

    /// Entropy at each sample time for one subsystem, in bits.
    pub fn entropies(&self, subsystem: usize) -> &[f64] {
        &self.entropies[subsystem]
    }
}

fn at_step(t: u64, e: Error) -> Error {
    Error::Numerical {
        context: "circuit evolution",
        reason: format!("time step {t}: {e}"),
    }
}

/// Applies one round of independent Haar-random two-mode gates, one per edge
/// of the round's matching; looped vertices idle.
pub fn step<R: Rng + ?Sized>(
    state: &mut PureState,
    coloring: &EdgeColoring,
    round: usize,
    rng: &mut R,
) -> Result<()> {
    if round >= coloring.n_rounds() {
        return Err(Error::InvalidParameter {
            name: "round",
            reason: format!("index {round} out of {} rounds", coloring.n_rounds()),
        });
    }
    for &(u, v) in coloring.round(round) {
        let (_, gate) = haar_two_mode_passive(rng);
        state.apply_pair(u, v, &gate)?;
    }
    Ok(())
}

/// Runs the circuit once, visiting the state after every step (and once at
/// tau = 0 for the initial vacuum).
fn evolve<F>(run: &CircuitRun, seed: u64, mut visit: F) -> Result<()>
where
    F: FnMut(u64, &PureState) -> Result<()>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = PureState::vacuum(run.graph.n_vertices());
    let k = run.coloring.n_rounds() as u64;
    visit(0, &state)?;
    let mut next_event = 0;
    for t in 0..run.horizon {
        while next_event < run.events.len() && run.events[next_event].t == t {
            let e = &run.events[next_event];
            state.squeeze(e.vertex, e.r).map_err(|err| at_step(t, err))?;
            next_event += 1;
        }
        step(&mut state, &run.coloring, (t % k) as usize, &mut rng)
            .map_err(|err| at_step(t, err))?;
        visit(t + 1, &state)?;
    }
    Ok(())
}

/// Simulates one realization with the run's own base seed.
pub fn run(config: &CircuitRun) -> Result<RunResult> {
    run_with_seed(config, config.base_seed)
}

/// Simulates one realization with an explicit seed, recording the entropy of
/// every planned subsystem at every sample time.
pub fn run_with_seed(config: &CircuitRun, seed: u64) -> Result<RunResult> {
    let mut entropies = vec![Vec::with_capacity(config.sample_times.len()); config.subsystems.len()];
    let mut next_sample = 0usize;
    evolve(config, seed, |tau, state| {
        if next_sample < config.sample_times.len() && config.sample_times[next_sample] == tau {
            for (s, sub) in config.subsystems.iter().enumerate() {
                let value = state
                    .entropy_of(sub.members(), config.kind)
                    .map_err(|err| at_step(tau, err))?;
                entropies[s].push(value);
            }
            next_sample += 1;
        }
        Ok(())
    })?;
    Ok(RunResult {
        sample_times: config.sample_times.clone(),
        entropies,
    })
}

const WEIGHT_SUM_TOL: f64 = 1e-10;

/// Tracks the per-realization weights of a single-squeezer circuit with the
/// run's base seed. See [`track_weights_with_seed`].
pub fn track_weights(config: &CircuitRun) -> Result<Vec<WeightField>> {
    track_weights_with_seed(config, config.base_seed)
}

/// Tracks the per-realization weights of a single-squeezer circuit: the
/// accumulated passive unitary U of the post-squeezer circuit gives
/// w_x = |U_{x, x0}|^2, recorded at each sample time.
///
/// The gate stream is identical to [`run_with_seed`] at the same seed, so
/// the returned weights describe the same realization. Requires exactly one
/// squeeze event, at t* = 0; anything else is rejected because later events
/// would break the single-mode weight picture.
pub fn track_weights_with_seed(config: &CircuitRun, seed: u64) -> Result<Vec<WeightField>> {
    let [event] = config.events.as_slice() else {
        return Err(Error::Unsupported {
            reason: format!(
                "weight tracking needs exactly one squeeze event, got {}",
                config.events.len()
            ),
        });
    };
    if event.t != 0 {
        return Err(Error::Unsupported {
            reason: format!("weight tracking needs the squeezer at t = 0, got t = {}", event.t),
        });
    }
    let n = config.graph.n_vertices();
    let x0 = event.vertex;
    let mut unitary = nalgebra::DMatrix::<num_complex::Complex64>::identity(n, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = config.coloring.n_rounds() as u64;
    let mut fields = Vec::with_capacity(config.sample_times.len());
    let mut next_sample = 0usize;
    for tau in 0..=config.horizon {
        if tau > 0 {
            let round = ((tau - 1) % k) as usize;
            for &(u, v) in config.coloring.round(round) {
                let (gate, _) = haar_two_mode_passive(&mut rng);
                let g = gate.matrix();
                for col in 0..n {
                    let (a, b) = (unitary[(u, col)], unitary[(v, col)]);
                    unitary[(u, col)] = g[(0, 0)] * a + g[(0, 1)] * b;
                    unitary[(v, col)] = g[(1, 0)] * a + g[(1, 1)] * b;
                }
            }
        }
        let weights: Vec<f64> = (0..n).map(|x| unitary[(x, x0)].norm_sqr()).collect();
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Numerical {
                context: "track_weights",
                reason: format!("weight sum {sum} drifted past 1e-10 at step {tau}"),
            });
        }
        if next_sample < config.sample_times.len() && config.sample_times[next_sample] == tau {
            let normalized = weights.iter().map(|w| w / sum).collect();
            fields.push(WeightField::new(normalized, tau)?);
            next_sample += 1;
        }
    }
    Ok(fields)
}

/// Streaming mean and variance per (subsystem, sample time) over an
/// ensemble of realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    sample_times: Vec<u64>,
    n: usize,
    mean: Vec<Vec<f64>>,
    variance: Vec<Vec<f64>>,
}

impl EnsembleStats {
    /// Merges per-realization results in the given (deterministic) order.
    pub fn from_results(results: &[RunResult]) -> Result<Self> {
        if results.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "results",
                reason: format!("need at least 2 realizations, got {}", results.len()),
            });
        }
        let first = &results[0];
        for r in results {
            if r.sample_times != first.sample_times || r.n_subsystems() != first.n_subsystems() {
                return Err(Error::DimensionMismatch {
                    context: "EnsembleStats::from_results (mismatched plans)",
                    expected: first.sample_times.len(),
                    actual: r.sample_times.len(),
                });
            }
        }
        let n_sub = first.n_subsystems();
        let n_t = first.sample_times.len();
        let mut mean = vec![vec![0.0; n_t]; n_sub];
        let mut m2 = vec![vec![0.0; n_t]; n_sub];
        for (i, r) in results.iter().enumerate() {
            let count = (i + 1) as f64;
            for s in 0..n_sub {
                for ti in 0..n_t {
                    let x = r.entropies[s][ti];
                    let delta = x - mean[s][ti];
                    mean[s][ti] += delta / count;
                    m2[s][ti] += delta * (x - mean[s][ti]);
                }
            }
        }
        let denom = (results.len() - 1) as f64;
        let variance = m2
            .into_iter()
            .map(|row| row.into_iter().map(|v| (v / denom).max(0.0)).collect())
            .collect();
        Ok(Self {
            sample_times: first.sample_times.clone(),
            n: results.len(),
            mean,
            variance,
        })
    }

    pub fn sample_times(&self) -> &[u64] {
        &self.sample_times
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_subsystems(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self, subsystem: usize, time_index: usize) -> f64 {
        self.mean[subsystem][time_index]
    }

    pub fn mean_series(&self, subsystem: usize) -> &[f64] {
        &self.mean[subsystem]
    }

    pub fn variance(&self, subsystem: usize, time_index: usize) -> f64 {
        self.variance[subsystem][time_index]
    }

    pub fn stderr(&self, subsystem: usize, time_index: usize) -> f64 {
        (self.variance[subsystem][time_index] / self.n as f64).sqrt()
    }
}

/// Runs `n` independent realizations with seeds base ^ i and merges their
/// statistics in seed order; realizations execute in parallel.
pub fn ensemble(config: &CircuitRun, n: usize) -> Result<EnsembleStats> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("ensemble needs at least 2 realizations, got {n}"),
        });
    }
    let results: Vec<Result<RunResult>> = (0..n as u64)
        .into_par_iter()
        .map(|i| run_with_seed(config, config.base_seed ^ i))
        .collect();
    let mut ordered = Vec::with_capacity(n);
    for r in results {
        ordered.push(r?);
    }
    EnsembleStats::from_results(&ordered)
}

/// Equilibrium autocorrelation of one subsystem's entropy over a single long
/// realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    dts: Vec<u64>,
    values: Vec<f64>,
    g0: f64,
    n_samples: usize,
}

impl Autocorrelation {
    pub fn dts(&self) -> &[u64] {
        &self.dts
    }

    /// G(dt)/G(0); exactly 1 at dt = 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unnormalized equilibrium variance G(0).
    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }
}

const MIN_AUTOCORR_SAMPLES: usize = 16;

/// Time-averaged autocovariance of S(L, t) with S(L, t + dt) after burn-in,
/// normalized at dt = 0. The burn-in must cover the mixing transient; the
/// series runs from burn_in to the horizon inclusive.
pub fn autocorrelation(
    config: &CircuitRun,
    subsystem: usize,
    dts: &[u64],
    burn_in: u64,
) -> Result<Autocorrelation> {
    if subsystem >= config.subsystems.len() {
        return Err(Error::InvalidParameter {
            name: "subsystem",
            reason: format!(
                "index {subsystem} out of {} planned subsystems",
                config.subsystems.len()
            ),
        });
    }
    let mut dts = dts.to_vec();
    dts.sort_unstable();
    dts.dedup();
    let Some(&max_dt) = dts.last() else {
        return Err(Error::InvalidParameter {
            name: "dts",
            reason: "need at least one lag".into(),
        });
    };
    if burn_in > config.horizon {
        return Err(Error::Schedule {
            reason: format!("burn-in {burn_in} beyond horizon {}", config.horizon),
        });
    }
    let len = (config.horizon - burn_in + 1) as usize;
    if len <= max_dt as usize + MIN_AUTOCORR_SAMPLES {
        return Err(Error::Numerical {
            context: "autocorrelation",
            reason: format!(
                "only {len} equilibrium samples for max lag {max_dt}; need {} more",
                max_dt as usize + MIN_AUTOCORR_SAMPLES + 1 - len
            ),
        });
    }
    let members = config.subsystems[subsystem].members();
    let mut series = Vec::with_capacity(len);
    evolve(config, config.base_seed, |tau, state| {
        if tau >= burn_in {
            series.push(
                state
                    .entropy_of(members, config.kind)
                    .map_err(|err| at_step(tau, err))?,
            );
        }
        Ok(())
    })?;
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let cov = |dt: usize| -> f64 {
        let m = series.len() - dt;
        (0..m)
            .map(|i| (series[i] - mean) * (series[i + dt] - mean))
            .sum::<f64>()
            / m as f64
    };
    let g0 = cov(0);
    if g0 <= 0.0 {
        return Err(Error::Numerical {
            context: "autocorrelation",
            reason: "entropy series has zero variance at equilibrium".into(),
        });
    }
    let values = dts
        .iter()
        .map(|&dt| if dt == 0 { 1.0 } else { cov(dt as usize) / g0 })
        .collect();
    Ok(Autocorrelation {
        dts,
        values,
        g0,
        n_samples: series.len(),
    })
}

/// Empirical means from Monte Carlo sampling of the single-gate weight
/// update on an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateAverage {
    pub mean_x: f64,
    pub mean_x_prime: f64,
    pub stderr_x: f64,
    pub stderr_x_prime: f64,
}

/// Samples the exact one-gate weight map with transmissivity tau uniform in
/// [0, 1) and interference phase uniform in [0, 2 pi): the pair
///
/// w_x'  = tau w_x + (1 - tau) w_x' + 2 sqrt(tau (1 - tau) w_x w_x') cos(phase)
/// w_x'' = (1 - tau) w_x + tau w_x' - (the same cross term)
///
/// whose ensemble means both converge to (w_x + w_x')/2.
pub fn gate_average_check<R: Rng + ?Sized>(
    w_x: f64,
    w_x_prime: f64,
    samples: u64,
    rng: &mut R,
) -> Result<GateAverage> {
    if !(w_x >= 0.0) || !(w_x_prime >= 0.0) || !w_x.is_finite() || !w_x_prime.is_finite() {
        return Err(Error::InvalidParameter {
            name: "weights",
            reason: format!("weights must be finite and nonnegative, got ({w_x}, {w_x_prime})"),
        });
    }
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("need at least 2 samples, got {samples}"),
        });
    }
    let cross_amp = 2.0 * (w_x * w_x_prime).sqrt();
    let mut mean = [0.0f64; 2];
    let mut m2 = [0.0f64; 2];
    for i in 0..samples {
        let tau: f64 = rng.gen();
        let phase = rng.gen_range(0.0..TAU);
        let cross = cross_amp * (tau * (1.0 - tau)).sqrt() * phase.cos();
        let pair = [
            tau * w_x + (1.0 - tau) * w_x_prime + cross,
            (1.0 - tau) * w_x + tau * w_x_prime - cross,
        ];
        let count = (i + 1) as f64;
        for (j, &x) in pair.iter().enumerate() {
            let delta = x - mean[j];
            mean[j] += delta / count;
            m2[j] += delta * (x - mean[j]);
        }
    }
    let denom = (samples - 1) as f64 * samples as f64;
    Ok(GateAverage {
        mean_x: mean[0],
        mean_x_prime: mean[1],
        stderr_x: (m2[0] / denom).sqrt(),
        stderr_x_prime: (m2[1] / denom).sqrt(),
    })
}
