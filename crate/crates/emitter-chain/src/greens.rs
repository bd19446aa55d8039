//! Free-space dyadic Green's tensor and the scalar hopping amplitude between
//! two identical, parallel dipoles.
//!
//! Units: the single-emitter decay rate γ₀ = 1, ħ = 1, and lengths are in
//! units of 1/k₀. The scalar amplitude is normalised so that
//! Im G(r → 0⁺) = 1/2 for every dipole tilt.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// arccos(1/√3): the tilt at which every 1/r² and 1/r³ term vanishes.
pub const MAGIC_ANGLE: f64 = 0.955_316_618_124_509_3;

/// μ₀ω₀²|P|²k₀ expressed in units of γ₀.
const COUPLING: f64 = 3.0 * PI;

pub type Tensor3 = [[Complex64; 3]; 3];

/// Linear dipole tilted by `theta` from the chain axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleOrientation {
    theta: f64,
}

impl DipoleOrientation {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=PI / 2.0).contains(&theta) {
            return Err(Error::Domain(format!("dipole tilt {theta} outside [0, π/2]")));
        }
        Ok(Self { theta })
    }

    pub fn magic() -> Self {
        Self { theta: MAGIC_ANGLE }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Unit dipole vector with the chain along x̂.
    pub fn direction(&self) -> [f64; 3] {
        [self.theta.cos(), self.theta.sin(), 0.0]
    }

    /// Coefficient 1 − cos²θ of the far-field 1/r term.
    pub fn far_coefficient(&self) -> f64 {
        1.0 - self.theta.cos().powi(2)
    }

    /// Coefficient 1 − 3cos²θ of the 1/r² and 1/r³ terms.
    pub fn near_coefficient(&self) -> f64 {
        1.0 - 3.0 * self.theta.cos().powi(2)
    }
}

impl Default for DipoleOrientation {
    fn default() -> Self {
        Self::magic()
    }
}

/// Open chain of equally spaced emitters; `spacing` is d·k₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainGeometry {
    pub n_sites: usize,
    pub spacing: f64,
}

impl ChainGeometry {
    pub fn new(n_sites: usize, spacing: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidInput(format!("chain needs at least 2 sites, got {n_sites}")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidInput(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self { n_sites, spacing })
    }

    /// The sub-wavelength chain with d·k₀ = π/2 used throughout.
    pub fn half_wavelength(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, PI / 2.0)
    }
}

/// sin(x)/x.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// j₁(x)/x = (sin x − x cos x)/x³, by its Taylor series where the closed form
/// cancels catastrophically.
fn j1_over_x(x: f64) -> f64 {
    if x.abs() < 1.0 {
        let x2 = x * x;
        // Σ_{k≥1} (−1)^{k+1} 2k x^{2k−2} / (2k+1)!
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for k in 1..12 {
            let k = k as f64;
            term *= -x2 * (k + 1.0) / (k * (2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
        }
        sum
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// Free-space Green's tensor 𝐆(r, ω₀) for separation `r` in units of 1/k₀,
/// with the 1/(4πk₀²r³) prefactor and e^{ik₀r} phase included.
pub fn green_tensor(separation: [f64; 3]) -> Result<Tensor3> {
    let r = separation.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(
            "Green's tensor diverges at zero separation (on-site term)".into(),
        ));
    }
    let (s, c) = r.sin_cos();
    let r3 = r * r * r;
    let norm = 1.0 / (4.0 * PI);

    // 𝐆 = A 𝟙 + B r̂r̂ with A ∝ (r² + ir − 1), B ∝ (−r² − 3ir + 3).
    let a = Complex64::new(
        norm * (c * (r * r - 1.0) - r * s) / r3,
        norm * (sinc(r) - j1_over_x(r)),
    );
    let b = Complex64::new(
        norm * (c * (3.0 - r * r) + 3.0 * r * s) / r3,
        norm * (3.0 * j1_over_x(r) - sinc(r)),
    );

    let unit = separation.map(|x| x / r);
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = b * (unit[i] * unit[j]);
            if i == j {
                *entry += a;
            }
        }
    }
    Ok(g)
}

/// Scalar hopping amplitude G(r) between two dipoles at distance `r` along
/// the chain. The Hamiltonian matrix element is −G(r).
///
/// G(r) = (3/4) e^{ir}/r³ [(1−cos²θ) r² + i(1−3cos²θ) r − (1−3cos²θ)]
pub fn hopping_scalar(r: f64, orientation: DipoleOrientation) -> Result<Complex64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!("hopping distance must be positive, got {r}")));
    }
    let a = orientation.far_coefficient();
    let b = orientation.near_coefficient();
    let (s, c) = r.sin_cos();
    let re = 0.75 * (a * c / r - b * (s / (r * r) + c / (r * r * r)));
    let im = 0.75 * (a * sinc(r) - b * j1_over_x(r));
    Ok(Complex64::new(re, im))
}

/// Projection P̂·𝐆·P̂ scaled to γ₀ units; equals `hopping_scalar` for a
/// separation along the chain.
pub fn projected_green(separation: [f64; 3], orientation: DipoleOrientation) -> Result<Complex64> {
    let g = green_tensor(separation)?;
    let p = orientation.direction();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            acc += g[i][j] * (p[i] * p[j]);
        }
    }
    Ok(acc * COUPLING)
}
