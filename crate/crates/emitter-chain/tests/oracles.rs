mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{c, dense_chain, escape_oracle, hop, poisson_rectangle, tensor_hop, taylor_propagate};
use emitter_chain::dispersion::{discrete_ft, odd_site_sum, DEFAULT_TOLERANCE};
use emitter_chain::greens::{hopping_scalar, projected_green, ChainGeometry, DipoleOrientation, MAGIC_ANGLE};
use emitter_chain::hamiltonians::{build_bloch, build_bloch_traceless, build_two_band, AlternationStrength};
use emitter_chain::lattice::unit_polylog;
use emitter_chain::spectral::eigendecompose;
use emitter_chain::walks::{escape_distribution, propagate, walk_hamiltonian, WalkState};
use num_complex::Complex64;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

#[test]
fn polylog_on_unit_circle_matches_bernoulli_polynomials() {
    for phi in [0.1, 0.7, 1.5, PI - 0.2, 3.5, 5.9] {
        let li1 = unit_polylog(phi, 1, 1e-12).unwrap().value;
        assert!((li1.re + (2.0 * (phi / 2.0).sin()).abs().ln()).abs() < 1e-10, "Re Li1({phi})");
        assert!((li1.im - (PI - phi) / 2.0).abs() < 1e-10, "Im Li1({phi})");

        let li2 = unit_polylog(phi, 2, 1e-12).unwrap().value;
        assert!((li2.re - (PI * PI / 6.0 - phi * (2.0 * PI - phi) / 4.0)).abs() < 1e-10);

        let li3 = unit_polylog(phi, 3, 1e-12).unwrap().value;
        let im3 = PI * PI * phi / 6.0 - PI * phi * phi / 4.0 + phi.powi(3) / 12.0;
        assert!((li3.im - im3).abs() < 1e-10);

        let li4 = unit_polylog(phi, 4, 1e-12).unwrap().value;
        let re4 = PI.powi(4) / 90.0 - PI * PI * phi * phi / 12.0 + PI * phi.powi(3) / 12.0 - phi.powi(4) / 48.0;
        assert!((li4.re - re4).abs() < 1e-10);
    }
}

#[test]
fn hopping_matches_tensor_contraction() {
    for &theta in &[0.0, 0.3, MAGIC_ANGLE, 1.2, FRAC_PI_2] {
        let o = DipoleOrientation::new(theta).unwrap();
        for &r in &[0.05, 0.4, 1.0, FRAC_PI_2, 3.3, 17.0, 250.0] {
            let expected = tensor_hop([r, 0.0, 0.0], o.direction());
            assert!(close(hopping_scalar(r, o).unwrap(), expected, 1e-12), "θ={theta} r={r}");
            assert!(close(projected_green([r, 0.0, 0.0], o).unwrap(), expected, 1e-12));
            assert!(close(hop(r, theta), expected, 1e-12));
        }
    }
}

/// Σ_{n≠0} G(|n|d) e^{−iknd} summed directly; absolutely convergent for
/// axial dipoles, which have no 1/r far field.
fn direct_sum(k: f64, d: f64, theta: f64, odd_only: bool) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for n in (1..400_000usize).rev() {
        if odd_only && n % 2 == 0 {
            continue;
        }
        let g = hop(n as f64 * d, theta);
        acc += g * 2.0 * (k * d * n as f64).cos();
    }
    acc
}

#[test]
fn lattice_sums_match_direct_summation() {
    let o = DipoleOrientation::new(0.0).unwrap();
    for &d in &[0.7, FRAC_PI_2, 2.4] {
        for &kd in &[0.0, 0.4, 1.3, -1.0] {
            let k = kd / d;
            let full = discrete_ft(k, d, o, 1e-12).unwrap().value;
            assert!(close(full, direct_sum(k, d, 0.0, false), 1e-8), "d={d} kd={kd}");
            let odd = odd_site_sum(k, d, o, 1e-12).unwrap().value;
            assert!(close(odd, direct_sum(k, d, 0.0, true), 1e-8), "odd d={d} kd={kd}");
        }
    }
}

#[test]
fn rectangle_matches_poisson_summation() {
    let o = DipoleOrientation::magic();
    for &d in &[1.0, FRAC_PI_2, 2.5, PI] {
        for j in 0..40 {
            let k = -PI / d + (j as f64 + 0.5) * (2.0 * PI / d) / 40.0;
            if ((k.abs() - 1.0).abs()) < 1e-3 || ((k.abs() - (2.0 * PI / d - 1.0)).abs()) < 1e-3 {
                continue;
            }
            let im = discrete_ft(k, d, o, DEFAULT_TOLERANCE).unwrap().value.im;
            assert!((im - poisson_rectangle(k, d)).abs() < 1e-6, "d={d} k={k}: {im}");
        }
    }
}

#[test]
fn bloch_blocks_match_direct_sums() {
    let o = DipoleOrientation::new(0.0).unwrap();
    let a = AlternationStrength::fixed(0.3).unwrap();
    let d = 1.1;
    for &kd in &[0.0, 0.5, -1.2] {
        let k = kd / d;
        let full = build_bloch(k, a, d, o).unwrap().matrix;
        let even = direct_sum(k, 2.0 * d, 0.0, false);
        let odd = direct_sum(k, d, 0.0, true);
        let phase = Complex64::from_polar(1.0, -kd);
        assert!(close(full[0][0], c(0.3, 0.0) - even, 1e-8));
        assert!(close(full[1][1], c(-0.3, 0.0) - even, 1e-8));
        assert!(close(full[0][1], -phase * odd, 1e-8));
        assert!(close(full[1][0], -phase.conj() * odd, 1e-8));
        let traceless = build_bloch_traceless(k, a, d, o).unwrap().matrix;
        assert!(close(traceless[0][1], full[0][1], 1e-12));
        assert!(close(traceless[0][0], c(0.3, 0.0), 1e-15));
    }
}

#[test]
fn small_chains_match_explicit_construction() {
    for n in [2usize, 4, 6] {
        for &(theta, d, h) in &[(MAGIC_ANGLE, FRAC_PI_2, 0.3), (0.4, 0.8, 0.0), (1.3, 2.2, 1.1)] {
            let g = ChainGeometry::new(n, d).unwrap();
            let o = DipoleOrientation::new(theta).unwrap();
            let m = build_two_band(g, o, AlternationStrength::fixed(h).unwrap()).unwrap();
            let oracle = dense_chain(n, d, theta, h, false);
            for i in 0..n {
                for j in 0..n {
                    assert!(close(m[(i, j)], oracle[i][j], 1e-12), "n={n} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn spectra_match_characteristic_roots() {
    for n in [2usize, 4, 6] {
        for &h in &[0.0, 0.21, 0.9] {
            let dense = dense_chain(n, FRAC_PI_2, MAGIC_ANGLE, h, true);
            let g = ChainGeometry::half_wavelength(n).unwrap();
            let m = walk_hamiltonian(g, DipoleOrientation::magic(), AlternationStrength::fixed(h).unwrap()).unwrap();
            let s = eigendecompose(m.as_ref()).unwrap();
            let roots = common::poly_roots(&common::charpoly(&dense));
            for r in roots {
                let nearest = s.eigenvalues.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-8, "n={n} h={h} root {r}");
            }
        }
    }
}

#[test]
fn propagator_matches_taylor_series() {
    for n in [2usize, 4, 6] {
        let dense = dense_chain(n, FRAC_PI_2, MAGIC_ANGLE, 0.35, true);
        let g = ChainGeometry::half_wavelength(n).unwrap();
        let m = walk_hamiltonian(g, DipoleOrientation::magic(), AlternationStrength::fixed(0.35).unwrap()).unwrap();
        let psi0: Vec<Complex64> = (0..n).map(|i| c(1.0 / (i + 1) as f64, 0.2 * i as f64)).collect();
        let norm = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi0: Vec<Complex64> = psi0.iter().map(|z| z / norm).collect();
        for t in [0.3, 2.0, 7.5] {
            let got = propagate(m.as_ref(), &WalkState::new(psi0.clone(), 0.0), t).unwrap();
            let want = taylor_propagate(&dense, &psi0, t);
            for (a, b) in got.amplitudes.iter().zip(&want) {
                assert!((a - b).norm() < 1e-10, "n={n} t={t}");
            }
        }
    }
}

#[test]
fn escape_matches_eigen_expansion() {
    for n in [2usize, 4, 6] {
        for &h in &[0.0, 0.3, 0.8] {
            let dense = dense_chain(n, FRAC_PI_2, MAGIC_ANGLE, h, true);
            let g = ChainGeometry::half_wavelength(n).unwrap();
            let m = walk_hamiltonian(g, DipoleOrientation::magic(), AlternationStrength::fixed(h).unwrap()).unwrap();
            let psi = emitter_chain::walks::make_w_state(n).unwrap();
            let f = escape_distribution(m.as_ref(), &psi, 0.0, 1e5, 0.01).unwrap();
            let oracle = escape_oracle(&dense, &psi.amplitudes);
            for (x, (a, b)) in f.values.iter().zip(&oracle).enumerate() {
                assert!((a - b).abs() < 1e-8, "n={n} h={h} x={x}: {a} vs {b}");
            }
        }
    }
}
