//! Real-space and Bloch Hamiltonians of the emitter chain.
//!
//! Sites are numbered from 1 in the physics and from 0 in storage; site 1
//! (index 0) carries +h. Every real-space builder returns a complex-symmetric
//! matrix, since the hopping only depends on |i − j|.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::dispersion::{discrete_ft, g_of_k, odd_site_sum, BLOCH_TOLERANCE};
use crate::error::{Error, Result};
use crate::greens::{hopping_scalar, ChainGeometry, DipoleOrientation};
use crate::linalg::{
    mat2_add, mat2_eigenvalues, mat2_scale, ComplexMatrix, Mat2, SIGMA_X, SIGMA_Y, SIGMA_Z,
};

/// Detuning amplitude h between the two species, optionally generated as
/// h = N^{−α}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternationStrength {
    pub h: f64,
    pub alpha: Option<f64>,
}

impl AlternationStrength {
    pub fn fixed(h: f64) -> Result<Self> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::InvalidInput(format!("alternation h must be ≥ 0, got {h}")));
        }
        Ok(Self { h, alpha: None })
    }

    pub fn scaled(n_sites: usize, alpha: f64) -> Self {
        Self {
            h: (n_sites as f64).powf(-alpha),
            alpha: Some(alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSample {
    pub k: f64,
    pub matrix: Mat2,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
}

impl BlochSample {
    fn from_matrix(k: f64, matrix: Mat2) -> Self {
        let (omega_plus, omega_minus) = mat2_eigenvalues(&matrix);
        Self {
            k,
            matrix,
            omega_plus,
            omega_minus,
        }
    }
}

/// −G(m d) for m = 0..n; index 0 is unused.
fn hopping_table(n: usize, spacing: f64, orientation: DipoleOrientation) -> Result<Vec<Complex64>> {
    let mut hops = vec![Complex64::new(0.0, 0.0); n];
    for (m, hop) in hops.iter_mut().enumerate().skip(1) {
        *hop = -hopping_scalar(m as f64 * spacing, orientation)?;
    }
    Ok(hops)
}

fn require_even(geometry: &ChainGeometry) -> Result<()> {
    if geometry.n_sites % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "two-band chain needs an even number of sites, got {}",
            geometry.n_sites
        )));
    }
    Ok(())
}

fn require_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("λ = {lambda} outside [0, 1]")));
    }
    Ok(())
}

fn alternating_sign(index: usize) -> f64 {
    if index % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Open chain with hopping −G(|i−j|d) and no on-site term.
pub fn build_rddi(geometry: ChainGeometry, orientation: DipoleOrientation) -> Result<ComplexMatrix> {
    let n = geometry.n_sites;
    let hops = hopping_table(n, geometry.spacing, orientation)?;
    Ok(Mat::from_fn(n, n, |i, j| hops[i.abs_diff(j)]))
}

/// RDDI chain plus the alternating detuning +h, −h, +h, … from site 1.
pub fn build_two_band(
    geometry: ChainGeometry,
    orientation: DipoleOrientation,
    alternation: AlternationStrength,
) -> Result<ComplexMatrix> {
    require_even(&geometry)?;
    let mut m = build_rddi(geometry, orientation)?;
    for i in 0..geometry.n_sites {
        m[(i, i)] += alternation.h * alternating_sign(i);
    }
    Ok(m)
}

/// Adds the uniform single-emitter decay −iγ₀/2 to the diagonal, so that
/// −2 Im ω is the total decay rate of a state.
pub fn add_onsite_decay(matrix: &mut ComplexMatrix) {
    for i in 0..matrix.nrows() {
        matrix[(i, i)] += Complex64::new(0.0, -0.5);
    }
}

fn check_half_zone(k: f64, spacing: f64) -> Result<()> {
    if (k * spacing).abs() > 0.5 * PI * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "kd = {} outside the two-band zone [−π/2, π/2]",
            k * spacing
        )));
    }
    Ok(())
}

/// Two-band Bloch matrix
/// [[h − G̃_2d, −e^{−ikd}(G̃_d − G̃_2d)], [−e^{ikd}(G̃_d − G̃_2d), −h − G̃_2d]].
///
/// At d·k₀ = π/2 the σ₀ part −G̃_2d diverges on the light line, which is
/// reported as `Error::NotConverged`; `build_bloch_traceless` stays finite.
pub fn build_bloch(
    k: f64,
    alternation: AlternationStrength,
    spacing: f64,
    orientation: DipoleOrientation,
) -> Result<BlochSample> {
    check_half_zone(k, spacing)?;
    let g_d = discrete_ft(k, spacing, orientation, BLOCH_TOLERANCE)?.value;
    let g_2d = discrete_ft(k, 2.0 * spacing, orientation, BLOCH_TOLERANCE)?.value;
    let off = g_d - g_2d;
    let phase = Complex64::from_polar(1.0, -k * spacing);
    let h = alternation.h;
    let matrix = [
        [h - g_2d, -phase * off],
        [-phase.conj() * off, -h - g_2d],
    ];
    Ok(BlochSample::from_matrix(k, matrix))
}

/// The Bloch matrix with its σ₀ part removed, h σ_z plus the odd-site
/// off-diagonal. Finite everywhere in the half zone.
pub fn build_bloch_traceless(
    k: f64,
    alternation: AlternationStrength,
    spacing: f64,
    orientation: DipoleOrientation,
) -> Result<BlochSample> {
    check_half_zone(k, spacing)?;
    let off = odd_site_sum(k, spacing, orientation, BLOCH_TOLERANCE)?.value;
    let phase = Complex64::from_polar(1.0, -k * spacing);
    let h = Complex64::new(alternation.h, 0.0);
    let matrix = [[h, -phase * off], [-phase.conj() * off, -h]];
    Ok(BlochSample::from_matrix(k, matrix))
}

/// h σ_z − i g(k) cos(kd) σ_x − i g(k) sin(kd) σ_y with the piecewise g(k).
pub fn ssh_like_bloch(k: f64, alternation: AlternationStrength, spacing: f64) -> Result<Mat2> {
    check_half_zone(k, spacing)?;
    let g = g_of_k(k, spacing);
    Ok(ssh_form(k * spacing, g, alternation.h))
}

fn ssh_form(kd: f64, g: f64, h: f64) -> Mat2 {
    let minus_ig = Complex64::new(0.0, -g);
    let z = mat2_scale(&SIGMA_Z, Complex64::new(h, 0.0));
    let x = mat2_scale(&SIGMA_X, minus_ig * kd.cos());
    let y = mat2_scale(&SIGMA_Y, minus_ig * kd.sin());
    mat2_add(&mat2_add(&z, &x), &y)
}

/// Trivial endpoint of the deformation: −iσ_x, an intracell coupling that
/// keeps the imaginary line gap open along the whole path.
pub fn trivial_endpoint() -> Mat2 {
    mat2_scale(&SIGMA_X, Complex64::new(0.0, -1.0))
}

/// H(λ) = (1−λ) H̃'(k) + λ H'' with H̃' the σ₀-free SSH-like symbol and
/// H'' = −iσ_x.
pub fn build_deformed_bloch(
    k: f64,
    lambda: f64,
    alternation: AlternationStrength,
    spacing: f64,
) -> Result<Mat2> {
    require_lambda(lambda)?;
    let start = ssh_like_bloch(k, alternation, spacing)?;
    Ok(mat2_add(
        &mat2_scale(&start, Complex64::new(1.0 - lambda, 0.0)),
        &mat2_scale(&trivial_endpoint(), Complex64::new(lambda, 0.0)),
    ))
}

/// Real-space operator of the deformation family on an open chain of unit
/// cells (2j−1, 2j).
///
/// The σ₀-free chain keeps only odd-distance hoppings plus the alternating
/// detuning; the trivial endpoint couples the two sites of each cell by −i.
/// Both endpoints are exact real-space images of their Bloch symbols, so the
/// family is their convex combination.
pub fn build_deformed_real_space(
    geometry: ChainGeometry,
    lambda: f64,
    alternation: AlternationStrength,
    orientation: DipoleOrientation,
) -> Result<ComplexMatrix> {
    require_even(&geometry)?;
    require_lambda(lambda)?;
    let n = geometry.n_sites;
    let hops = hopping_table(n, geometry.spacing, orientation)?;
    let w = 1.0 - lambda;
    let h = alternation.h;
    let cell = Complex64::new(0.0, -lambda);
    Ok(Mat::from_fn(n, n, |i, j| {
        let m = i.abs_diff(j);
        if m == 0 {
            Complex64::new(w * h * alternating_sign(i), 0.0)
        } else if m % 2 == 1 {
            let mut v = hops[m] * w;
            if m == 1 && i.min(j) % 2 == 0 {
                v += cell;
            }
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Short-range SSH analogue h σ_z − i g cos(kd) σ_x − i g sin(kd) σ_y over the
/// full zone kd ∈ [−π, π].
pub fn build_short_range_ssh(k: f64, g: f64, h: f64, spacing: f64) -> Result<Mat2> {
    if (k * spacing).abs() > PI * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("kd = {} outside [−π, π]", k * spacing)));
    }
    Ok(ssh_form(k * spacing, g, h))
}
