//! Lattice Fourier transforms of the hopping, G̃_D(k) = Σ_{n≠0} e^{−ikDn} G(Dn),
//! and the two-band dispersion of the alternating chain.
//!
//! Quasi-momenta are in units of k₀, so the light line sits at |k| = 1 and the
//! two-band zone edge at kd = ±π/2; both coincide for d·k₀ = π/2.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::DipoleOrientation;
use crate::lattice::{unit_polylog, unit_polylog_odd, LatticeSum};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Tolerance used when lattice sums feed Bloch matrices. Defectiveness at
/// h = 0.5 is resolved only if g(k) is accurate far beyond the default.
pub const BLOCH_TOLERANCE: f64 = 1e-12;

/// Real parts of G̃_d and G̃_2d closer than this count as equal.
const REAL_PART_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierSum {
    pub k: f64,
    pub value: Complex64,
    /// Largest number of explicitly summed terms among the polylog pieces.
    pub truncation: usize,
    pub achieved_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBandDispersion {
    pub k: f64,
    pub h: f64,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
}

/// Accumulates c·Li_p pieces, keeping partial values when a piece fails.
struct SumBuilder {
    value: Complex64,
    achieved: f64,
    truncation: usize,
    failed: bool,
}

impl SumBuilder {
    fn new() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            achieved: 0.0,
            truncation: 0,
            failed: false,
        }
    }

    fn add(&mut self, coefficient: Complex64, piece: Result<LatticeSum>) -> Result<()> {
        let scale = coefficient.norm();
        match piece {
            Ok(s) => {
                self.value += coefficient * s.value;
                self.achieved += scale * s.achieved_tolerance;
                self.truncation = self.truncation.max(s.terms);
            }
            Err(Error::NotConverged {
                partial,
                achieved,
                truncation,
            }) => {
                self.value += coefficient * partial;
                self.achieved += scale * achieved;
                self.truncation = self.truncation.max(truncation);
                self.failed = true;
            }
            Err(e) => return Err(e),
        }
        Ok(())
    }

    fn finish(self, k: f64) -> Result<FourierSum> {
        if self.failed {
            return Err(Error::NotConverged {
                partial: self.value,
                achieved: self.achieved,
                truncation: self.truncation,
            });
        }
        Ok(FourierSum {
            k,
            value: self.value,
            truncation: self.truncation,
            achieved_tolerance: self.achieved,
        })
    }
}

/// Σ over both chain directions of e^{iDn(1∓k)} G(Dn)-type polylog pieces;
/// `odd_only` restricts n to odd values.
fn hopping_sum(
    k: f64,
    spacing: f64,
    orientation: DipoleOrientation,
    tolerance: f64,
    odd_only: bool,
) -> Result<FourierSum> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tolerance}")));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidInput(format!("spacing must be positive, got {spacing}")));
    }
    if !k.is_finite() {
        return Err(Error::InvalidInput("quasi-momentum must be finite".into()));
    }
    let a = orientation.far_coefficient();
    let b = orientation.near_coefficient();
    let d = spacing;
    // G(r) = (3/4) e^{ir} [a/r + i b/r² − b/r³]
    let coefficients = [
        (1, Complex64::new(0.75 * a / d, 0.0)),
        (2, Complex64::new(0.0, 0.75 * b / (d * d))),
        (3, Complex64::new(-0.75 * b / (d * d * d), 0.0)),
    ];
    let mut per_direction = Vec::with_capacity(2);
    // n > 0 picks up e^{iDn(1−k)}, n < 0 picks up e^{iD|n|(1+k)}.
    for phase in [d * (1.0 - k), d * (1.0 + k)] {
        let mut builder = SumBuilder::new();
        for &(p, c) in &coefficients {
            if c.norm() == 0.0 {
                continue;
            }
            let tol = tolerance / (8.0 * c.norm());
            let piece = if odd_only {
                unit_polylog_odd(phase, p, tol)
            } else {
                unit_polylog(phase, p, tol)
            };
            builder.add(c, piece)?;
        }
        per_direction.push(builder);
    }
    let plus = per_direction.pop().unwrap();
    let minus = per_direction.pop().unwrap();
    // Combine directions symmetrically so that k → −k is bit-exact.
    let combined = SumBuilder {
        value: minus.value + plus.value,
        achieved: minus.achieved + plus.achieved,
        truncation: minus.truncation.max(plus.truncation),
        failed: minus.failed || plus.failed,
    };
    combined.finish(k)
}

/// Discrete Fourier transform of the hopping on a lattice of spacing
/// `spacing`, converged to `tolerance`.
///
/// At a light-line momentum the far-field real part diverges
/// logarithmically; the result is then `Error::NotConverged` whose partial
/// value has the real part summed to the truncation cap and the imaginary
/// part equal to the half-sum of its one-sided limits.
pub fn discrete_ft(
    k: f64,
    spacing: f64,
    orientation: DipoleOrientation,
    tolerance: f64,
) -> Result<FourierSum> {
    hopping_sum(k, spacing, orientation, tolerance, false)
}

/// Σ over odd n of e^{−ikdn} G(dn), which equals G̃_d(k) − G̃_2d(k) but stays
/// finite at the zone edge kd = ±π/2, where the terms cancel pairwise.
pub fn odd_site_sum(
    k: f64,
    spacing: f64,
    orientation: DipoleOrientation,
    tolerance: f64,
) -> Result<FourierSum> {
    if (k * spacing).cos().abs() < 1e-14 {
        // e^{−ikdn} + e^{ikdn} = 2cos(nπ/2) = 0 for every odd n.
        return Ok(FourierSum {
            k,
            value: Complex64::new(0.0, 0.0),
            truncation: 0,
            achieved_tolerance: 0.0,
        });
    }
    hopping_sum(k, spacing, orientation, tolerance, true)
}

fn check_half_zone(k: f64, spacing: f64) -> Result<()> {
    if (k * spacing).abs() > FRAC_PI_2 * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "kd = {} outside the two-band zone [−π/2, π/2]",
            k * spacing
        )));
    }
    Ok(())
}

/// ω±(k) = −G̃_2d(k) ± √((G̃_d(k) − G̃_2d(k))² + h²), principal square root.
pub fn two_band_dispersion(
    k: f64,
    h: f64,
    spacing: f64,
    orientation: DipoleOrientation,
) -> Result<TwoBandDispersion> {
    check_half_zone(k, spacing)?;
    let g_d = discrete_ft(k, spacing, orientation, BLOCH_TOLERANCE)?;
    let g_2d = discrete_ft(k, 2.0 * spacing, orientation, BLOCH_TOLERANCE)?;
    let diff = g_d.value - g_2d.value;
    let root = (diff * diff + h * h).sqrt();
    Ok(TwoBandDispersion {
        k,
        h,
        omega_plus: -g_2d.value + root,
        omega_minus: -g_2d.value - root,
    })
}

/// Both branches at fixed k along an ascending h grid, relabelled so that
/// each branch is continuous in h rather than following the principal root.
pub fn track_branches(
    k: f64,
    h_grid: &[f64],
    spacing: f64,
    orientation: DipoleOrientation,
) -> Result<Vec<TwoBandDispersion>> {
    let mut out: Vec<TwoBandDispersion> = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let mut cur = two_band_dispersion(k, h, spacing, orientation)?;
        if let Some(prev) = out.last() {
            let keep = (cur.omega_plus - prev.omega_plus).norm() + (cur.omega_minus - prev.omega_minus).norm();
            let swap = (cur.omega_minus - prev.omega_plus).norm() + (cur.omega_plus - prev.omega_minus).norm();
            if swap < keep {
                std::mem::swap(&mut cur.omega_plus, &mut cur.omega_minus);
            }
        }
        out.push(cur);
    }
    Ok(out)
}

/// h_EP(k) = |G̃_d(k) − G̃_2d(k)|, the alternation at which the Bloch matrix
/// at k becomes defective. Zero at the zone edge.
pub fn ep_condition(k: f64, spacing: f64, orientation: DipoleOrientation) -> Result<f64> {
    check_half_zone(k, spacing)?;
    let diff = odd_site_sum(k, spacing, orientation, BLOCH_TOLERANCE)?.value;
    if diff.re.abs() > REAL_PART_TOLERANCE {
        return Err(Error::NotImaginary { real_part: diff.re });
    }
    Ok(diff.im.abs())
}

/// Piecewise g(k): +1/2 inside |k| < π/(2d), 0 on it, −1/2 outside.
pub fn g_of_k(k: f64, spacing: f64) -> f64 {
    let x = (k * spacing).abs();
    if (x - FRAC_PI_2).abs() <= 1e-12 * FRAC_PI_2 {
        0.0
    } else if x < FRAC_PI_2 {
        0.5
    } else {
        -0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const D: f64 = FRAC_PI_2;

    #[test]
    fn rectangle_inside_and_outside() {
        let o = DipoleOrientation::magic();
        for k in [0.0, 0.3, -0.7, 0.95] {
            let s = discrete_ft(k, D, o, 1e-10).unwrap();
            assert!((s.value.im - 0.5).abs() < 1e-9, "k = {k}: {}", s.value);
        }
        for k in [1.2, -1.5, 1.9] {
            let s = discrete_ft(k, D, o, 1e-10).unwrap();
            assert!((s.value.im + 0.5).abs() < 1e-9, "k = {k}: {}", s.value);
        }
    }

    #[test]
    fn light_line_diverges_with_zero_imaginary_partial() {
        match discrete_ft(1.0, D, DipoleOrientation::magic(), 1e-8) {
            Err(Error::NotConverged { partial, .. }) => assert!(partial.im.abs() < 1e-12),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn evenness_is_exact() {
        let o = DipoleOrientation::new(0.4).unwrap();
        for k in [0.1, 0.77, 1.3] {
            let a = discrete_ft(k, 1.1, o, 1e-10).unwrap();
            let b = discrete_ft(-k, 1.1, o, 1e-10).unwrap();
            assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn piecewise_g() {
        assert_eq!(g_of_k(0.0, D), 0.5);
        assert_eq!(g_of_k(1.0, D), 0.0);
        assert_eq!(g_of_k(-1.0, D), 0.0);
        assert_eq!(g_of_k(0.75 * PI / D, D), -0.5);
    }

    #[test]
    fn ep_condition_values() {
        let o = DipoleOrientation::magic();
        assert!((ep_condition(0.4, D, o).unwrap() - 0.5).abs() < 1e-10);
        assert_eq!(ep_condition(1.0, D, o).unwrap(), 0.0);
        assert!(ep_condition(1.5, D, o).is_err());
    }

    #[test]
    fn coalescence_at_half() {
        let w = two_band_dispersion(0.3, 0.5, D, DipoleOrientation::magic()).unwrap();
        assert!((w.omega_plus - w.omega_minus).norm() < 1e-5);
        let w = two_band_dispersion(0.3, 0.6, D, DipoleOrientation::magic()).unwrap();
        let split = w.omega_plus - w.omega_minus;
        assert!((split.re - 2.0 * (0.36f64 - 0.25).sqrt()).abs() < 1e-10);
        assert!(split.im.abs() < 1e-10);
    }
}
