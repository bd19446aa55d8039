//! The eleven acceptance criteria, one test each. Every test prints a
//! `criterion NN: PASS|FAIL` line with the measured quantities before
//! asserting.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{c, dense_chain, escape_oracle, poisson_rectangle, taylor_propagate};
use emitter_chain::dispersion::{discrete_ft, two_band_dispersion, DEFAULT_TOLERANCE};
use emitter_chain::edge_analysis::{
    deformation_sweep, edge_candidate, find_edge_state, fit_tail, localization_length,
};
use emitter_chain::greens::{ChainGeometry, DipoleOrientation, MAGIC_ANGLE};
use emitter_chain::hamiltonians::{build_two_band, AlternationStrength};
use emitter_chain::spectral::{
    edge_pair, eigendecompose, fit_power_law, h_edge_ep_scaling, log_log_fit, minimal_decay_rate,
    momentum_census, scan_eps,
};
use emitter_chain::topology::{long_range_q_samples, short_range_q_samples, winding_number};
use emitter_chain::walks::{escape_distribution, make_w_state, propagate, reflection_difference, walk_hamiltonian};
use num_complex::Complex64;

/// Long enough for ‖ψ(t_max)‖² < 10⁻⁸ for every N = 200 walk, including the
/// h = 0 chain whose darkest states decay at ~10⁻⁵ γ₀.
const WALK_T_MAX: f64 = 1e6;

fn report(id: u32, pass: bool, details: String) {
    println!("criterion {id:02}: {} {details}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {details}");
}

fn magic() -> DipoleOrientation {
    DipoleOrientation::magic()
}

fn geometry(n: usize) -> ChainGeometry {
    ChainGeometry::half_wavelength(n).unwrap()
}

#[test]
fn criterion_01_rectangle_dispersion() {
    let d = FRAC_PI_2;
    let mut worst: f64 = 0.0;
    let mut worst_level: f64 = 0.0;
    for j in 0..20 {
        let inside = -0.95 + 1.9 * j as f64 / 19.0;
        let outside = (1.05 + 0.9 * j as f64 / 19.0) * if j % 2 == 0 { 1.0 } else { -1.0 };
        for (k, level) in [(inside, 0.5), (outside, -0.5)] {
            let im = discrete_ft(k, d, magic(), DEFAULT_TOLERANCE).unwrap().value.im;
            worst = worst.max((im - poisson_rectangle(k, d)).abs());
            worst_level = worst_level.max((im - level).abs());
        }
    }
    let mut worst_pi: f64 = 0.0;
    for j in 0..40 {
        let k = -2.9 + 5.8 * j as f64 / 39.0;
        if (k.abs() - 1.0).abs() < 1e-3 {
            continue;
        }
        let im = discrete_ft(k, PI, magic(), DEFAULT_TOLERANCE).unwrap().value.im;
        worst_pi = worst_pi.max(im.abs());
    }
    report(
        1,
        worst < 1e-6 && worst_level < 1e-6 && worst_pi < 1e-6,
        format!("max |Im G̃_d − Poisson| = {worst:.2e}, max |Im G̃_d ∓ ½| = {worst_level:.2e}, max |Im G̃ at dk₀=π| = {worst_pi:.2e}"),
    );
}

#[test]
fn criterion_02_ep_transition() {
    let census = momentum_census(100, AlternationStrength::fixed(0.5).unwrap(), FRAC_PI_2, magic(), None).unwrap();
    let g = geometry(100);
    let grid: Vec<f64> = (1..=200).map(|i| 0.005 * i as f64).collect();
    let report_ = scan_eps(|h| build_two_band(g, magic(), AlternationStrength::fixed(h)?), &grid).unwrap();
    let near = |target: f64, tol: f64| report_.minima.iter().find(|(h, _)| (h - target).abs() <= tol).copied();
    let edge = near(0.05, 0.01);
    let bulk = near(0.5, 0.02);
    report(
        2,
        census.defective == 49 && census.diagonalizable == 1 && edge.is_some() && bulk.is_some(),
        format!("census {census:?}; minimum near 0.05: {edge:?}; minimum near 0.5: {bulk:?}"),
    );
}

#[test]
fn criterion_03_square_root_coalescence() {
    let d = FRAC_PI_2;
    let k = 0.3 / d;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..9 {
        let delta = 10f64.powf(-4.0 + 2.0 * i as f64 / 8.0);
        for h in [0.5 - delta, 0.5 + delta] {
            let s = two_band_dispersion(k, h, d, magic()).unwrap();
            x.push(delta);
            y.push((s.omega_plus - s.omega_minus).norm());
        }
    }
    let fit = fit_power_law(&x, &y).unwrap();
    report(
        3,
        (fit.exponent - 0.5).abs() <= 0.05,
        format!("exponent {:.4} ± {:.1e} (r² = {:.6})", fit.exponent, fit.exponent_stderr, fit.r_squared),
    );
}

#[test]
fn criterion_04_subradiance_scaling() {
    let rate = |n: usize, h: f64| minimal_decay_rate(geometry(n), magic(), AlternationStrength::fixed(h).unwrap()).unwrap();
    let pure: Vec<usize> = vec![100, 150, 200, 300, 400];
    let pure_rates: Vec<f64> = pure.iter().map(|&n| rate(n, 0.0)).collect();
    let pure_fit = fit_power_law(&pure.iter().map(|&n| n as f64).collect::<Vec<_>>(), &pure_rates).unwrap();

    let alt: Vec<usize> = vec![60, 100, 200, 400];
    let alt_rates: Vec<f64> = alt.iter().map(|&n| rate(n, 20.0 / n as f64)).collect();
    let alt_fit = fit_power_law(&alt.iter().map(|&n| n as f64).collect::<Vec<_>>(), &alt_rates).unwrap();

    let small: Vec<(usize, f64)> = (2..20).map(|m| 2 * m).map(|n| (n, rate(n, 20.0 / n as f64))).collect();
    let small_ok = small.iter().all(|&(_, r)| (0.1..=10.0).contains(&r));
    report(
        4,
        (pure_fit.exponent + 3.0).abs() <= 0.3 && (alt_fit.exponent + 2.0).abs() <= 0.3 && small_ok,
        format!(
            "h=0 exponent {:.3}; h=20/N exponent {:.3}; N<40 rates in [{:.3}, {:.3}]",
            pure_fit.exponent,
            alt_fit.exponent,
            small.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
            small.iter().map(|p| p.1).fold(0.0, f64::max)
        ),
    );
}

#[test]
fn criterion_05_edge_ep_scaling() {
    let s = h_edge_ep_scaling(&[50, 100, 200, 400]).unwrap();
    let h100 = s.h_values[1];
    report(
        5,
        (s.fit.exponent + 0.65).abs() <= 0.1 && (h100 - 0.05).abs() <= 0.01,
        format!("h^E_EP = {:?}, exponent {:.3}, h^E_EP(100) = {h100:.4}", s.h_values, s.fit.exponent),
    );
}

fn edge_length(n: usize, alpha: f64) -> f64 {
    let m = walk_hamiltonian(geometry(n), magic(), AlternationStrength::scaled(n, alpha)).unwrap();
    let s = eigendecompose(m.as_ref()).unwrap();
    let (a, b) = edge_pair(&s).unwrap();
    localization_length(&edge_candidate(&s, &[a, b]).unwrap())
}

#[test]
fn criterion_06_edge_state() {
    let n = 500;
    let m = walk_hamiltonian(geometry(n), magic(), AlternationStrength::scaled(n, 0.25)).unwrap();
    let s = eigendecompose(m.as_ref()).unwrap();
    let edge = find_edge_state(&s, geometry(n)).unwrap();
    let (weight, r2, decay) = match &edge {
        Some(p) => (
            p.boundary_weight,
            fit_tail(p, None).map(|f| f.r_squared).unwrap_or(0.0),
            -2.0 * p.eigenvalue.im,
        ),
        None => (0.0, 0.0, f64::NAN),
    };

    let sizes = [200.0, 350.0, 500.0];
    let extensive: Vec<f64> = sizes.iter().map(|&n| edge_length(n as usize, 0.9)).collect();
    let extensive_fit = log_log_fit(&sizes, &extensive, 3).unwrap();
    let saturated: Vec<f64> = sizes.iter().map(|&n| edge_length(n as usize, 0.25)).collect();
    let mean = saturated.iter().sum::<f64>() / 3.0;
    let spread = (saturated.iter().copied().fold(0.0, f64::max) - saturated.iter().copied().fold(f64::INFINITY, f64::min)) / mean;

    report(
        6,
        weight > 0.5 && r2 >= 0.95 && (decay - 1.0).abs() <= 0.2 && extensive_fit.exponent >= 0.9 && spread < 0.2,
        format!(
            "boundary weight {weight:.4}, tail r² {r2:.4}, decay {decay:.4}; N^-0.9 lengths {extensive:.3?} (exponent {:.3}); N^-0.25 lengths {saturated:.3?} (spread {:.1}%)",
            extensive_fit.exponent,
            100.0 * spread
        ),
    );
}

#[test]
fn criterion_07_deformation_delocalizes() {
    let n = 500;
    let sweep = deformation_sweep(geometry(n), AlternationStrength::scaled(n, 0.25), magic(), &[0.0, 0.25, 0.5, 0.75]).unwrap();
    let pr = &sweep.participation_ratios;
    report(
        7,
        pr.windows(2).all(|w| w[1] > w[0]),
        format!("participation ratios {pr:.2?}"),
    );
}

fn walk_h(n: usize, alpha: Option<f64>) -> AlternationStrength {
    match alpha {
        Some(a) => AlternationStrength::scaled(n, a),
        None => AlternationStrength::fixed(0.0).unwrap(),
    }
}

#[test]
fn criterion_08_escape_normalisation() {
    let n = 200;
    let w = make_w_state(n).unwrap();
    let mut sums = Vec::new();
    for alpha in [None, Some(0.75), Some(0.5), Some(0.25)] {
        let m = walk_hamiltonian(geometry(n), magic(), walk_h(n, alpha)).unwrap();
        sums.push(escape_distribution(m.as_ref(), &w, 0.0, WALK_T_MAX, 0.01).unwrap().total());
    }
    report(
        8,
        sums.iter().all(|s| (s - 1.0).abs() <= 1e-6),
        format!("Σ_x F(x, 0) = {sums:.10?}"),
    );
}

#[test]
fn criterion_09_walk_phenomenology() {
    let n = 200;
    let w = make_w_state(n).unwrap();
    let escape = |alpha| {
        let m = walk_hamiltonian(geometry(n), magic(), walk_h(n, alpha)).unwrap();
        escape_distribution(m.as_ref(), &w, 5.0, WALK_T_MAX, 0.01).unwrap().values
    };
    let order = |f: &[f64]| {
        let mut idx: Vec<usize> = (0..f.len()).collect();
        idx.sort_by(|&a, &b| f[b].total_cmp(&f[a]));
        idx
    };
    let outer = n / 20;
    let pure = escape(None);
    let top = order(&pure);
    let both_ends = {
        let (a, b) = (top[0].min(top[1]), top[0].max(top[1]));
        a < outer && b >= n - outer
    };
    let alternating = escape(Some(0.25));
    let peak = order(&alternating)[0];
    let bulk = peak >= n / 10 && peak < n - n / 10;
    let ratio = reflection_difference(&alternating) / reflection_difference(&pure);
    report(
        9,
        both_ends && bulk && ratio > 10.0,
        format!(
            "h=0 top sites {:?}; h=N^-0.25 argmax site {peak} (inner 80%: {bulk}); reflection ratio {ratio:.3e}",
            &top[..2]
        ),
    );
}

#[test]
fn criterion_10_winding() {
    let q: Vec<Complex64> = short_range_q_samples(1.0, 0.3, 1.0, 1025).unwrap().into_iter().map(|p| p.1).collect();
    let short = winding_number(&q);
    let long_q: Vec<Complex64> = long_range_q_samples(AlternationStrength::fixed(0.3).unwrap(), FRAC_PI_2, 1025)
        .unwrap()
        .into_iter()
        .map(|p| p.1)
        .collect();
    let long = winding_number(&long_q);
    report(
        10,
        short.defined && (short.value - 1.0).abs() < 1e-4 && short.quantization_residual < 1e-4 && !long.defined,
        format!(
            "short-range value {:.12} (residual {:.1e}, defined {}); long-range defined {} with breaks at samples {:?}",
            short.value, short.quantization_residual, short.defined, long.defined, long.discontinuities
        ),
    );
}

#[test]
fn criterion_11_small_chain_oracles() {
    let mut worst = [0.0f64; 4];
    for n in [2usize, 4, 6] {
        for &(theta, d, h) in &[(MAGIC_ANGLE, FRAC_PI_2, 0.0), (MAGIC_ANGLE, FRAC_PI_2, 0.3), (0.6, 1.1, 0.8)] {
            let g = ChainGeometry::new(n, d).unwrap();
            let o = DipoleOrientation::new(theta).unwrap();
            let a = AlternationStrength::fixed(h).unwrap();
            let dense = dense_chain(n, d, theta, h, true);
            let m = walk_hamiltonian(g, o, a).unwrap();
            let bare = build_two_band(g, o, a).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let onsite = if i == j { c(0.0, -0.5) } else { c(0.0, 0.0) };
                    worst[0] = worst[0].max((bare[(i, j)] + onsite - dense[i][j]).norm());
                }
            }
            let s = eigendecompose(m.as_ref()).unwrap();
            for r in common::poly_roots(&common::charpoly(&dense)) {
                let nearest = s.eigenvalues.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
                worst[1] = worst[1].max(nearest);
            }
            let psi = make_w_state(n).unwrap();
            for t in [0.5, 3.0] {
                let got = propagate(m.as_ref(), &psi, t).unwrap();
                let want = taylor_propagate(&dense, &psi.amplitudes, t);
                for (x, y) in got.amplitudes.iter().zip(&want) {
                    worst[2] = worst[2].max((x - y).norm());
                }
            }
            let f = escape_distribution(m.as_ref(), &psi, 0.0, 1e5, 0.01).unwrap();
            for (x, y) in f.values.iter().zip(escape_oracle(&dense, &psi.amplitudes)) {
                worst[3] = worst[3].max((x - y).abs());
            }
        }
    }
    report(
        11,
        worst.iter().all(|&e| e <= 1e-8),
        format!(
            "max deviations: Hamiltonian {:.1e}, spectrum {:.1e}, propagator {:.1e}, F(x,0) {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    );
}
