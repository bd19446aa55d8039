//! Hermitization of SSH-form Bloch symbols, the flat-band operator Q(k) and
//! its winding number ∮ dk/(2πi) q⁻¹∂_k q.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonians::{build_short_range_ssh, ssh_like_bloch, AlternationStrength};
use crate::linalg::{mat2_add, mat2_adjoint, mat2_max_abs, mat2_mul, mat2_scale, Mat2, SIGMA_Z};

/// Largest tolerated chiral residual of a hermitized symbol.
pub const CHIRAL_TOLERANCE: f64 = 1e-10;

/// A defined winding must lie this close to an integer.
pub const QUANTIZATION_TOLERANCE: f64 = 1e-4;

/// Samples with |q| below this break the loop.
const MIN_MODULUS: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// i·H for an SSH-form symbol, after checking σ_z (iH) σ_z = −(iH)†.
pub fn hermitize(bloch: &Mat2) -> Result<Mat2> {
    let ih = mat2_scale(bloch, I);
    let conj = mat2_mul(&mat2_mul(&SIGMA_Z, &ih), &SIGMA_Z);
    let residual = mat2_max_abs(&mat2_add(&conj, &mat2_adjoint(&ih)));
    if !(residual <= CHIRAL_TOLERANCE) {
        return Err(Error::NotChiral(residual));
    }
    Ok(ih)
}

/// Upper-right entry of sign(iH) for an SSH-form symbol. Since
/// (iH)² = (g² − h²)𝟙 the sign function is iH/√(g² − h²).
fn q_from_symbol(bloch: &Mat2) -> Result<Complex64> {
    let ih = hermitize(bloch)?;
    let h = bloch[0][0].re;
    let g_sq = ih[0][1].norm_sqr();
    let gap = (mat2_mul(&ih, &ih)[0][0]).re;
    if !(gap > 0.0) {
        return Err(Error::LineGapClosed { g_sq, h_sq: h * h });
    }
    Ok(ih[0][1] / gap.sqrt())
}

/// q(k) of the short-range SSH analogue; equals g e^{−ikd}/√(g² − h²).
pub fn q_operator(g: f64, h: f64, k: f64, spacing: f64) -> Result<Complex64> {
    if !(g * g > h * h) {
        return Err(Error::LineGapClosed { g_sq: g * g, h_sq: h * h });
    }
    q_from_symbol(&build_short_range_ssh(k, g, h, spacing)?)
}

/// Hermitian, chiral flat-band operator [[0, q], [q*, 0]].
pub fn flat_band_operator(g: f64, h: f64, k: f64, spacing: f64) -> Result<Mat2> {
    let q = q_operator(g, h, k, spacing)?;
    let zero = Complex64::new(0.0, 0.0);
    Ok([[zero, q], [q.conj(), zero]])
}

/// q(k) of the long-range SSH-like symbol with the piecewise g(k), on
/// `samples` uniform points of [−π/(2d), π/(2d)] including both ends. Where
/// the line gap closes, at g(k) = 0, the sample is 0.
pub fn long_range_q_samples(
    alternation: AlternationStrength,
    spacing: f64,
    samples: usize,
) -> Result<Vec<(f64, Complex64)>> {
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two k samples".into()));
    }
    let edge = FRAC_PI_2 / spacing;
    (0..samples)
        .map(|j| {
            let k = -edge + 2.0 * edge * j as f64 / (samples - 1) as f64;
            let k = k.clamp(-edge, edge);
            match q_from_symbol(&ssh_like_bloch(k, alternation, spacing)?) {
                Ok(q) => Ok((k, q)),
                Err(Error::LineGapClosed { .. }) => Ok((k, Complex64::new(0.0, 0.0))),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// q(k) of the short-range model on `samples` uniform points of the full
/// zone [−π/d, π/d] including both ends.
pub fn short_range_q_samples(g: f64, h: f64, spacing: f64, samples: usize) -> Result<Vec<(f64, Complex64)>> {
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two k samples".into()));
    }
    let edge = PI / spacing;
    (0..samples)
        .map(|j| {
            let k = (-edge + 2.0 * edge * j as f64 / (samples - 1) as f64).clamp(-edge, edge);
            Ok((k, q_operator(g, h, k, spacing)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindingResult {
    pub value: f64,
    /// Distance of `value` to the nearest integer.
    pub quantization_residual: f64,
    pub defined: bool,
    /// Indices i where the step from sample i to the next (cyclically) jumps
    /// by π/4 or more in phase or touches |q| < 10⁻⁶.
    pub discontinuities: Vec<usize>,
}

/// (1/2π) Σ Δarg q over consecutive samples of a closed loop in increasing
/// k. A repeated end point closes the loop; otherwise the last sample is
/// joined back to the first.
pub fn winding_number(q_samples: &[Complex64]) -> WindingResult {
    let n = q_samples.len();
    if n < 2 {
        return WindingResult {
            value: 0.0,
            quantization_residual: 0.0,
            defined: false,
            discontinuities: Vec::new(),
        };
    }
    let scale = q_samples.iter().map(|q| q.norm()).fold(0.0, f64::max);
    let closed = (q_samples[n - 1] - q_samples[0]).norm() <= 1e-12 * scale.max(1.0);
    let steps = if closed { n - 1 } else { n };

    let mut total = 0.0;
    let mut discontinuities = Vec::new();
    for i in 0..steps {
        let a = q_samples[i];
        let b = q_samples[(i + 1) % n];
        let step = (b * a.conj()).arg();
        if a.norm() < MIN_MODULUS || b.norm() < MIN_MODULUS || step.abs() >= FRAC_PI_4 {
            discontinuities.push(i);
        }
        total += step;
    }
    let value = total / (2.0 * PI);
    let quantization_residual = (value - value.round()).abs();
    WindingResult {
        value,
        quantization_residual,
        defined: discontinuities.is_empty() && quantization_residual < QUANTIZATION_TOLERANCE,
        discontinuities,
    }
}
