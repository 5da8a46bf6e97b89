//! Cross-checks for the walk theory: a Monte Carlo amplitude oracle for the
//! averaged transition factors, size collapse of rescaled entropy profiles,
//! and the quadratic light cone of the continuum curves.

use approx::assert_abs_diff_eq;
use cvnet::gaussian::{haar_two_mode_passive, EntropyKind};
use cvnet::graph::{cartesian_lattice, greedy_edge_coloring, NetworkGraph, Subsystem};
use cvnet::walk::{
    boundary_flow_step, continuum_deviation, entropy_from_eta, eta, evolve_weights,
    gaussian_eta, light_cone, page_curve, transition_matrix, EntropySeries, RescaledProfile,
    WeightField,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The averaged walk equals the Haar expectation of honest amplitude
/// propagation, interference terms included. One squeezed amplitude starts
/// at the center of a five-vertex path; each round applies fresh Haar gates
/// to the matched pairs and the weight is the squared modulus.
#[test]
fn monte_carlo_amplitudes_match_averaged_walk() {
    let (g, c) = cartesian_lattice(1, 5).unwrap();
    let n = g.n_vertices();
    let start = g.vertex_at(&[0]).unwrap();
    let steps = 6u64;
    let predicted = evolve_weights(&c, &WeightField::delta(n, start).unwrap(), steps);

    let samples = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_3c01);
    let mut mean = vec![0.0f64; n];
    let mut m2 = vec![0.0f64; n];
    for s in 0..samples {
        let mut amp = vec![Complex64::new(0.0, 0.0); n];
        amp[start] = Complex64::new(1.0, 0.0);
        for step in 0..steps {
            let round = (step % c.n_rounds() as u64) as usize;
            for &(u, v) in c.round(round) {
                let (unitary, _) = haar_two_mode_passive(&mut rng);
                let m = unitary.matrix();
                let (a, b) = (amp[u], amp[v]);
                amp[u] = m[(0, 0)] * a + m[(0, 1)] * b;
                amp[v] = m[(1, 0)] * a + m[(1, 1)] * b;
            }
        }
        for (i, &a) in amp.iter().enumerate() {
            let w = a.norm_sqr();
            let delta = w - mean[i];
            mean[i] += delta / (s + 1) as f64;
            m2[i] += delta * (w - mean[i]);
        }
    }
    for i in 0..n {
        let se = (m2[i] / (samples - 1) as f64 / samples as f64).sqrt();
        let diff = (mean[i] - predicted.values()[i]).abs();
        assert!(
            diff <= 3.0 * se + 1e-12,
            "vertex {i}: monte carlo {} vs walk {}, 3se {}",
            mean[i],
            predicted.values()[i],
            3.0 * se
        );
    }
}

/// Entropy profile of the exact walk at time t on a 1-D lattice with the
/// squeezer at the center, on the rescaled grid x_tilde = x/M, with the
/// equilibrium reference taken from the Page formula.
fn exact_profile(m: usize, t: u64, r: f64) -> (RescaledProfile, WeightField) {
    let (g, c) = cartesian_lattice(1, m).unwrap();
    let start = g.vertex_at(&[0]).unwrap();
    let w = evolve_weights(&c, &WeightField::delta(g.n_vertices(), start).unwrap(), t);
    (profile_from_weights(m, &w, r), w)
}

fn profile_from_weights(m: usize, w: &WeightField, r: f64) -> RescaledProfile {
    let half = (m as i64 - 1) / 2;
    let mut x_tilde = Vec::with_capacity(m);
    let mut s = Vec::with_capacity(m);
    let mut s_inf = Vec::with_capacity(m);
    let mut prefix = 0.0;
    for (i, &wv) in w.values().iter().enumerate() {
        prefix += wv;
        let x = i as i64 - half;
        x_tilde.push(x as f64 / m as f64);
        s.push(entropy_from_eta(prefix.min(1.0), r, EntropyKind::VonNeumann));
        s_inf.push(page_curve(i + 1, m, r, EntropyKind::VonNeumann));
    }
    RescaledProfile::new(m, x_tilde, s, s_inf).unwrap()
}

#[test]
fn rescaled_profiles_collapse_across_sizes() {
    let r = 8.0;
    let sizes = [201usize, 301, 401];
    for t_tilde in [0.05, 0.1, 0.2] {
        let profiles: Vec<RescaledProfile> = sizes
            .iter()
            .map(|&m| {
                let t = (t_tilde * (m * m) as f64).round() as u64;
                exact_profile(m, t, r).0
            })
            .collect();
        let devs = continuum_deviation(&profiles, true).unwrap();
        for i in 0..devs.len() {
            for j in i + 1..devs.len() {
                assert!(
                    (devs[i] - devs[j]).abs() < 0.02,
                    "t_tilde {t_tilde}: deviations {devs:?} do not collapse"
                );
            }
        }
    }
}

#[test]
fn deviation_decreases_in_time_after_smoothing() {
    let m = 101usize;
    let r = 4.0;
    let (g, c) = cartesian_lattice(1, m).unwrap();
    let start = g.vertex_at(&[0]).unwrap();
    let mut w = WeightField::delta(g.n_vertices(), start).unwrap();
    let mut deviations = Vec::new();
    for k in 1..=25u64 {
        let target = (0.02 * k as f64 * (m * m) as f64).round() as u64;
        w = evolve_weights(&c, &w, target - w.t());
        deviations.push(profile_from_weights(m, &w, r).deviation());
    }
    let smoothed: Vec<f64> = deviations
        .windows(5)
        .map(|win| win.iter().sum::<f64>() / 5.0)
        .collect();
    for pair in smoothed.windows(2) {
        assert!(
            pair[1] <= pair[0] + 1e-9,
            "smoothed deviation rose: {:?}",
            smoothed
        );
    }
    assert!(*smoothed.last().unwrap() < 0.01);
}

/// Continuum theory curves give arrival times growing as the square of the
/// rescaled distance from the squeezer.
#[test]
fn theory_light_cone_is_quadratic() {
    let m = 801usize;
    let r = 6.0;
    let half = (m as i64 - 1) / 2;
    let series: Vec<EntropySeries> = [80i64, 120, 160, 200, 240]
        .iter()
        .map(|&x| {
            let l_size = (x + half + 1) as usize;
            let equilibrium = page_curve(l_size, m, r, EntropyKind::VonNeumann);
            let times: Vec<u64> = (1..=40_000).collect();
            let values: Vec<f64> = times
                .iter()
                .map(|&t| {
                    let eta_cut = gaussian_eta(1, t, &[x]).unwrap();
                    entropy_from_eta(eta_cut, r, EntropyKind::VonNeumann)
                })
                .collect();
            EntropySeries::new(x as f64 / m as f64, times, values, equilibrium).unwrap()
        })
        .collect();
    let (times, fit) = light_cone(&series, 0.01, 0.70).unwrap();
    assert!(times.t1().windows(2).all(|p| p[1] > p[0]));
    assert!(
        (1.8..2.2).contains(&fit.slope_t1),
        "early slope {}",
        fit.slope_t1
    );
    assert!(
        (1.8..2.2).contains(&fit.slope_total),
        "saturation slope {}",
        fit.slope_total
    );
}

fn entropy_kind_strategy() -> impl Strategy<Value = EntropyKind> {
    prop_oneof![
        Just(EntropyKind::VonNeumann),
        (0.2f64..4.0)
            .prop_filter("alpha away from 1", |a| (a - 1.0).abs() > 0.05)
            .prop_map(|a| EntropyKind::renyi(a).unwrap()),
    ]
}

proptest! {
    #[test]
    fn entropy_is_symmetric_under_complementation(
        eta_val in 0.0f64..=1.0,
        r in 0.0f64..12.0,
        kind in entropy_kind_strategy(),
    ) {
        let a = entropy_from_eta(eta_val, r, kind);
        let b = entropy_from_eta(1.0 - eta_val, r, kind);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn transition_matrices_fix_uniform_exactly(d in 1usize..=2, m_idx in 0usize..3) {
        let m = [3, 5, 7][m_idx];
        let (g, c) = cartesian_lattice(d, m).unwrap();
        let e = transition_matrix(&g, &c).unwrap();
        let n = g.n_vertices();
        let uniform = nalgebra::RowDVector::from_element(n, 1.0 / n as f64);
        let evolved = &uniform * e.matrix();
        for j in 0..n {
            prop_assert!((evolved[j] - uniform[j]).abs() < 1e-15);
        }
        let lambda = e.lambda_star().unwrap();
        prop_assert!(lambda <= 1.0 + 1e-9);
    }

    #[test]
    fn boundary_flow_predicts_eta_changes(
        edge_mask in prop::collection::vec(any::<bool>(), 15),
        raw in prop::collection::vec(0.01f64..1.0, 6),
        members in prop::collection::btree_set(0usize..6, 1..6),
    ) {
        let n = 6;
        let all_pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let edges: Vec<(usize, usize)> = all_pairs
            .iter()
            .zip(&edge_mask)
            .filter(|(_, &keep)| keep)
            .map(|(&e, _)| e)
            .collect();
        prop_assume!(!edges.is_empty());
        let g = NetworkGraph::from_edges(n, &edges).unwrap();
        let c = greedy_edge_coloring(&g);
        let sum: f64 = raw.iter().sum();
        let values: Vec<f64> = raw.iter().map(|v| v / sum).collect();
        let mut w = WeightField::new(values, 0).unwrap();
        let l = Subsystem::new(members.iter().copied(), n).unwrap();
        for _ in 0..c.n_rounds() {
            let round = (w.t() % c.n_rounds() as u64) as usize;
            let predicted = boundary_flow_step(&w, &l, c.round(round));
            let before = eta(&w, &l);
            w = evolve_weights(&c, &w, 1);
            prop_assert!(((eta(&w, &l) - before) - predicted).abs() < 1e-14);
        }
    }
}

/// The closed-form transition matrix entries for the three-vertex path,
/// exercised through the public interface end to end.
#[test]
fn three_vertex_full_cycle_row() {
    let (g, c) = cartesian_lattice(1, 3).unwrap();
    let e = transition_matrix(&g, &c).unwrap();
    let w = evolve_weights(&c, &WeightField::delta(3, 1).unwrap(), 2);
    for j in 0..3 {
        assert_abs_diff_eq!(w.values()[j], e.matrix()[(1, j)], epsilon = 1e-15);
    }
}
