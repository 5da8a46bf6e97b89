use crate::error::{Error, Result};

const GRID_MATCH_TOL: f64 = 1e-12;
/// Resolution of the common grid used when profiles must be interpolated.
const COMMON_GRID_POINTS: usize = 201;

/// An entropy profile over the rescaled coordinate x_tilde = x/M at one
/// instant, together with its equilibrium reference on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledProfile {
    m: usize,
    x_tilde: Vec<f64>,
    s: Vec<f64>,
    s_inf: Vec<f64>,
}

impl RescaledProfile {
    pub fn new(m: usize, x_tilde: Vec<f64>, s: Vec<f64>, s_inf: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: "profile needs a positive system size".into(),
            });
        }
        if x_tilde.len() < 2 || s.len() != x_tilde.len() || s_inf.len() != x_tilde.len() {
            return Err(Error::DimensionMismatch {
                context: "RescaledProfile::new (grid and value lengths)",
                expected: x_tilde.len().max(2),
                actual: s.len().min(s_inf.len()),
            });
        }
        if x_tilde.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::InvalidParameter {
                name: "x_tilde",
                reason: "grid must be strictly increasing and finite".into(),
            });
        }
        if s.iter().chain(&s_inf).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: "profile values must be finite".into(),
            });
        }
        if s_inf.iter().map(|v| v.abs()).sum::<f64>() == 0.0 {
            return Err(Error::InvalidParameter {
                name: "s_inf",
                reason: "equilibrium reference has zero 1-norm".into(),
            });
        }
        Ok(Self { m, x_tilde, s, s_inf })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x_tilde(&self) -> &[f64] {
        &self.x_tilde
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn s_inf(&self) -> &[f64] {
        &self.s_inf
    }

    /// Relative 1-norm distance to the equilibrium reference on this
    /// profile's own grid.
    pub fn deviation(&self) -> f64 {
        relative_one_norm(&self.s, &self.s_inf)
    }
}

fn relative_one_norm(s: &[f64], s_inf: &[f64]) -> f64 {
    let num: f64 = s.iter().zip(s_inf).map(|(a, b)| (a - b).abs()).sum();
    let den: f64 = s_inf.iter().map(|v| v.abs()).sum();
    num / den
}

/// Linear interpolation of (xs, ys) at `x`, clamped to the endpoints.
fn lerp_at(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let hi = xs.partition_point(|&g| g < x).max(1);
    let (x0, x1) = (xs[hi - 1], xs[hi]);
    let w = (x - x0) / (x1 - x0);
    ys[hi - 1] * (1.0 - w) + ys[hi] * w
}

/// Relative 1-norm deviation of each profile from its equilibrium reference.
///
/// Profiles sharing the same grid are measured directly. Otherwise the
/// profiles are linearly interpolated onto a uniform grid spanning the
/// common overlap of all x ranges, but only when `interpolate` is set;
/// without the flag mismatched grids are an error. A profile that already
/// sits at equilibrium reports exactly zero.
pub fn continuum_deviation(profiles: &[RescaledProfile], interpolate: bool) -> Result<Vec<f64>> {
    if profiles.is_empty() {
        return Err(Error::InvalidParameter {
            name: "profiles",
            reason: "need at least one profile".into(),
        });
    }
    let first = &profiles[0];
    let same_grid = profiles.iter().all(|p| {
        p.x_tilde.len() == first.x_tilde.len()
            && p.x_tilde
                .iter()
                .zip(&first.x_tilde)
                .all(|(a, b)| (a - b).abs() <= GRID_MATCH_TOL)
    });
    if same_grid {
        return Ok(profiles.iter().map(RescaledProfile::deviation).collect());
    }
    if !interpolate {
        return Err(Error::InvalidParameter {
            name: "interpolate",
            reason: "profiles lie on different rescaled grids; enable interpolation".into(),
        });
    }
    let lo = profiles
        .iter()
        .map(|p| p.x_tilde[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = profiles
        .iter()
        .map(|p| *p.x_tilde.last().expect("validated nonempty"))
        .fold(f64::INFINITY, f64::min);
    if !(hi > lo) {
        return Err(Error::InvalidParameter {
            name: "profiles",
            reason: format!("rescaled grids have empty overlap [{lo}, {hi}]"),
        });
    }
    let step = (hi - lo) / (COMMON_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..COMMON_GRID_POINTS)
        .map(|i| lo + step * i as f64)
        .collect();
    Ok(profiles
        .iter()
        .map(|p| {
            let s: Vec<f64> = grid.iter().map(|&x| lerp_at(&p.x_tilde, &p.s, x)).collect();
            let s_inf: Vec<f64> = grid
                .iter()
                .map(|&x| lerp_at(&p.x_tilde, &p.s_inf, x))
                .collect();
            relative_one_norm(&s, &s_inf)
        })
        .collect())
}

/// Entropy-versus-time record for one probed vertex, used for light-cone
/// extraction. Times must be strictly increasing; the equilibrium value is
/// the closed-form reference, not a late-time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    dx_tilde: f64,
    times: Vec<u64>,
    values: Vec<f64>,
    equilibrium: f64,
}

impl EntropySeries {
    pub fn new(dx_tilde: f64, times: Vec<u64>, values: Vec<f64>, equilibrium: f64) -> Result<Self> {
        if !(dx_tilde >= 0.0) || !dx_tilde.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dx_tilde",
                reason: format!("rescaled distance must be finite and nonnegative, got {dx_tilde}"),
            });
        }
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "EntropySeries::new (times vs values)",
                expected: times.len().max(1),
                actual: values.len(),
            });
        }
        if times.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "time stamps must increase strictly".into(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) || !(equilibrium > 0.0) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "entropies must be finite and the equilibrium positive".into(),
            });
        }
        Ok(Self { dx_tilde, times, values, equilibrium })
    }

    pub fn dx_tilde(&self) -> f64 {
        self.dx_tilde
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn equilibrium(&self) -> f64 {
        self.equilibrium
    }

    /// First recorded time whose entropy reaches `frac` of equilibrium.
    fn first_crossing(&self, frac: f64) -> Option<u64> {
        let target = frac * self.equilibrium;
        self.times
            .iter()
            .zip(&self.values)
            .find(|(_, &s)| s >= target)
            .map(|(&t, _)| t)
    }
}

/// Per-vertex light-cone arrival times at the two thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct LightConeTimes {
    dx_tilde: Vec<f64>,
    t1: Vec<u64>,
    t1_plus_t2: Vec<u64>,
    eps1: f64,
    eps2: f64,
}

impl LightConeTimes {
    pub fn dx_tilde(&self) -> &[f64] {
        &self.dx_tilde
    }

    /// Arrival times at the early threshold eps1.
    pub fn t1(&self) -> &[u64] {
        &self.t1
    }

    /// Arrival times at the saturation threshold eps2.
    pub fn t1_plus_t2(&self) -> &[u64] {
        &self.t1_plus_t2
    }

    pub fn thresholds(&self) -> (f64, f64) {
        (self.eps1, self.eps2)
    }

    pub fn len(&self) -> usize {
        self.dx_tilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dx_tilde.is_empty()
    }
}

/// Least-squares power-law exponents of the arrival times versus rescaled
/// distance, fitted as ln T against ln dx_tilde. Entries at zero distance or
/// zero time carry no log-log information and are excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeFit {
    pub slope_t1: f64,
    pub intercept_t1: f64,
    pub slope_total: f64,
    pub intercept_total: f64,
}

fn log_log_fit(dx: &[f64], t: &[u64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = dx
        .iter()
        .zip(t)
        .filter(|(&x, &tt)| x > 0.0 && tt > 0)
        .map(|(&x, &tt)| (x.ln(), (tt as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Numerical {
            context: "light_cone",
            reason: format!(
                "power-law fit needs at least two usable vertices, got {}",
                pts.len()
            ),
        });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 {
        return Err(Error::Numerical {
            context: "light_cone",
            reason: "all probed vertices sit at the same rescaled distance".into(),
        });
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    Ok((slope, intercept))
}

/// Extracts light-cone arrival times and their power-law exponents from
/// entropy time series.
///
/// For each series, T1 is the first time the entropy reaches `eps1` of its
/// equilibrium value and T1 + T2 the first time it reaches `eps2`; the
/// conventional thresholds are 1% and 70%. A series that never reaches the
/// saturation threshold is an error naming every such vertex.
pub fn light_cone(
    series: &[EntropySeries],
    eps1: f64,
    eps2: f64,
) -> Result<(LightConeTimes, ConeFit)> {
    if !(0.0 < eps1 && eps1 < eps2 && eps2 < 1.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("need 0 < eps1 < eps2 < 1, got ({eps1}, {eps2})"),
        });
    }
    if series.is_empty() {
        return Err(Error::InvalidParameter {
            name: "series",
            reason: "need at least one entropy series".into(),
        });
    }
    let mut times = LightConeTimes {
        dx_tilde: Vec::with_capacity(series.len()),
        t1: Vec::with_capacity(series.len()),
        t1_plus_t2: Vec::with_capacity(series.len()),
        eps1,
        eps2,
    };
    let mut unreached = Vec::new();
    for s in series {
        match (s.first_crossing(eps1), s.first_crossing(eps2)) {
            (Some(a), Some(b)) => {
                times.dx_tilde.push(s.dx_tilde);
                times.t1.push(a);
                times.t1_plus_t2.push(b);
            }
            _ => unreached.push(s.dx_tilde),
        }
    }
    if !unreached.is_empty() {
        return Err(Error::Numerical {
            context: "light_cone",
            reason: format!(
                "entropy never reached {eps2} of equilibrium at rescaled distances {unreached:?}"
            ),
        });
    }
    let (slope_t1, intercept_t1) = log_log_fit(&times.dx_tilde, &times.t1)?;
    let (slope_total, intercept_total) = log_log_fit(&times.dx_tilde, &times.t1_plus_t2)?;
    Ok((
        times,
        ConeFit {
            slope_t1,
            intercept_t1,
            slope_total,
            intercept_total,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn profile(x: &[f64], s: &[f64], s_inf: &[f64]) -> RescaledProfile {
        RescaledProfile::new(100, x.to_vec(), s.to_vec(), s_inf.to_vec()).unwrap()
    }

    #[test]
    fn equilibrium_profile_has_zero_deviation() {
        let p = profile(&[0.0, 0.5, 1.0], &[1.0, 2.0, 1.5], &[1.0, 2.0, 1.5]);
        assert_eq!(p.deviation(), 0.0);
        assert_eq!(continuum_deviation(&[p], false).unwrap(), vec![0.0]);
    }

    #[test]
    fn direct_deviation_matches_hand_value() {
        let p = profile(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]);
        assert_abs_diff_eq!(p.deviation(), (1.0 + 0.0 + 1.0) / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn mismatched_grids_require_the_flag() {
        let xa: Vec<f64> = (0..6).map(|i| i as f64 / 5.0).collect();
        let xb: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
        let a = profile(
            &xa,
            &xa.iter().map(|&x| x).collect::<Vec<_>>(),
            &vec![1.0; 6],
        );
        let b = profile(
            &xb,
            &xb.iter().map(|&x| x).collect::<Vec<_>>(),
            &vec![1.0; 5],
        );
        let err = continuum_deviation(&[a.clone(), b.clone()], false);
        assert!(matches!(err, Err(Error::InvalidParameter { name: "interpolate", .. })));
        // Linear data interpolates exactly; the common grid is symmetric on
        // [0, 1], so the mean of |x - 1| is exactly 1/2 for both profiles.
        let devs = continuum_deviation(&[a, b], true).unwrap();
        for d in devs {
            assert_abs_diff_eq!(d, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolation_respects_overlap_range() {
        let a = profile(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]);
        let b = profile(&[2.0, 3.0], &[1.0, 1.0], &[1.0, 1.0]);
        assert!(continuum_deviation(&[a, b], true).is_err());
    }

    fn ramp_series(dx: f64, cap: u64, eq: f64, scale: f64) -> EntropySeries {
        // Entropy climbs linearly and saturates at t = scale * dx^2.
        let t_sat = scale * dx * dx;
        let times: Vec<u64> = (0..=cap).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|&t| eq * (t as f64 / t_sat).min(1.0))
            .collect();
        EntropySeries::new(dx, times, values, eq).unwrap()
    }

    #[test]
    fn quadratic_arrival_times_fit_slope_two() {
        // Saturation time exactly 10000 dx^2 makes both thresholds land on
        // integer times free of rounding: T1 in {1, 4, 16}, T1+T2 in
        // {70, 280, 1120}.
        let series: Vec<EntropySeries> = [0.1, 0.2, 0.4]
            .iter()
            .map(|&dx| ramp_series(dx, 1200, 3.0, 10_000.0))
            .collect();
        let (times, fit) = light_cone(&series, 0.01, 0.70).unwrap();
        assert_eq!(times.t1(), &[1, 4, 16]);
        assert_eq!(times.t1_plus_t2(), &[70, 280, 1120]);
        assert_abs_diff_eq!(fit.slope_t1, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.slope_total, 2.0, epsilon = 1e-9);
        assert_eq!(times.thresholds(), (0.01, 0.70));
    }

    #[test]
    fn vertex_at_the_source_arrives_at_zero() {
        let mut series = vec![ramp_series(0.0, 10, 2.0, 1.0)];
        // dx = 0 saturates instantly: the value at t = 0 is already eq.
        assert_eq!(series[0].values()[0], 2.0);
        series.push(ramp_series(0.1, 1200, 2.0, 10_000.0));
        series.push(ramp_series(0.2, 1200, 2.0, 10_000.0));
        let (times, _) = light_cone(&series, 0.01, 0.70).unwrap();
        assert_eq!(times.t1()[0], 0);
        assert_eq!(times.t1_plus_t2()[0], 0);
    }

    #[test]
    fn unreached_threshold_is_reported() {
        let dx = 0.3;
        let times: Vec<u64> = (0..50).collect();
        let values = vec![0.1; 50];
        let s = EntropySeries::new(dx, times, values, 1.0).unwrap();
        let err = light_cone(&[s], 0.01, 0.70).unwrap_err();
        match err {
            Error::Numerical { reason, .. } => assert!(reason.contains("0.3")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn threshold_order_is_validated() {
        let s = ramp_series(0.1, 100, 1.0, 100.0);
        assert!(light_cone(&[s.clone()], 0.7, 0.01).is_err());
        assert!(light_cone(&[s], 0.0, 0.5).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(EntropySeries::new(0.1, vec![0, 0], vec![0.0, 0.1], 1.0).is_err());
        assert!(EntropySeries::new(0.1, vec![0, 1], vec![0.0], 1.0).is_err());
        assert!(EntropySeries::new(-0.1, vec![0], vec![0.0], 1.0).is_err());
        assert!(EntropySeries::new(0.1, vec![0], vec![0.0], 0.0).is_err());
        assert!(RescaledProfile::new(0, vec![0.0, 1.0], vec![0.0; 2], vec![1.0; 2]).is_err());
        assert!(RescaledProfile::new(5, vec![1.0, 0.0], vec![0.0; 2], vec![1.0; 2]).is_err());
        assert!(RescaledProfile::new(5, vec![0.0, 1.0], vec![0.0; 2], vec![0.0; 2]).is_err());
    }
}
