//! Non-unitary continuous-time quantum walks e^{−iHt}|ψ₀⟩ and the spatially
//! resolved escape quasi-probability
//! F(x, t) = −∫_t^∞ dt′ ⟨ψ(t′)|{|x⟩⟨x|, Im H}|ψ(t′)⟩.

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::{ChainGeometry, DipoleOrientation};
use crate::hamiltonians::{add_onsite_decay, build_two_band, AlternationStrength};
use crate::linalg::{expm, hermitian_part, imaginary_part, mat_vec, ComplexMatrix};

/// ‖ψ(t_max)‖² must fall below this for the escape integral to be trusted.
pub const RESIDUAL_THRESHOLD: f64 = 1e-8;

/// Quadrature steps in the base window of the escape integral (even).
const BASE_STEPS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub amplitudes: Vec<Complex64>,
    /// Time in units of 1/γ₀.
    pub time: f64,
}

impl WalkState {
    pub fn new(amplitudes: Vec<Complex64>, time: f64) -> Self {
        Self { amplitudes, time }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn densities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// The W state: amplitude 1/√N on every site.
pub fn make_w_state(n_sites: usize) -> Result<WalkState> {
    if n_sites == 0 {
        return Err(Error::InvalidInput("W state needs at least one site".into()));
    }
    let a = Complex64::new(1.0 / (n_sites as f64).sqrt(), 0.0);
    Ok(WalkState::new(vec![a; n_sites], 0.0))
}

/// Two-band chain with the on-site −iγ₀/2 decay, the walk generator.
pub fn walk_hamiltonian(
    geometry: ChainGeometry,
    orientation: DipoleOrientation,
    alternation: AlternationStrength,
) -> Result<ComplexMatrix> {
    let mut m = build_two_band(geometry, orientation, alternation)?;
    add_onsite_decay(&mut m);
    Ok(m)
}

fn check_dims(hamiltonian: MatRef<'_, Complex64>, state: &WalkState) -> Result<()> {
    let n = hamiltonian.nrows();
    if hamiltonian.ncols() != n || state.amplitudes.len() != n {
        return Err(Error::InvalidInput(format!(
            "state of length {} does not match a {}×{} Hamiltonian",
            state.amplitudes.len(),
            n,
            hamiltonian.ncols()
        )));
    }
    Ok(())
}

fn evolution(hamiltonian: MatRef<'_, Complex64>, t: f64) -> ComplexMatrix {
    let minus_it = Complex64::new(0.0, -t);
    let scaled = Mat::from_fn(hamiltonian.nrows(), hamiltonian.ncols(), |i, j| hamiltonian[(i, j)] * minus_it);
    expm(scaled.as_ref())
}

/// ψ(t₀ + t) = e^{−iHt} ψ(t₀) by scaling and squaring.
pub fn propagate(hamiltonian: MatRef<'_, Complex64>, initial: &WalkState, t: f64) -> Result<WalkState> {
    check_dims(hamiltonian, initial)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("propagation time must be finite and ≥ 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let u = evolution(hamiltonian, t);
    Ok(WalkState::new(mat_vec(u.as_ref(), &initial.amplitudes), initial.time + t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeDistribution {
    /// F(x, start_time); entries may be negative.
    pub values: Vec<f64>,
    pub start_time: f64,
    /// |Simpson − trapezoid| summed over sites plus the residual norm beyond
    /// the integration window.
    pub quadrature_error: f64,
    /// ‖ψ(t_max)‖².
    pub residual_norm: f64,
}

impl EscapeDistribution {
    /// Σ_x F(x), the norm surviving at `start_time`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn add_outer(acc: &mut ComplexMatrix, v: &[Complex64], w: f64) {
    let n = v.len();
    for j in 0..n {
        let c = v[j].conj() * w;
        for i in 0..n {
            acc[(i, j)] += v[i] * c;
        }
    }
}

/// −2 Re (Im H · X)_xx for a Gramian X = ∫ψψ† dt.
fn escape_from_gramian(im_h: &ComplexMatrix, x: &ComplexMatrix) -> Vec<f64> {
    let n = x.nrows();
    (0..n)
        .map(|i| -2.0 * (0..n).map(|k| im_h[(i, k)] * x[(k, i)]).sum::<Complex64>().re)
        .collect()
}

/// F(x, start_time) by composite Simpson on a uniform grid of step `dt`.
///
/// The Gramian X = ∫ψ(t)ψ(t)† dt is accumulated over a base window of 256
/// steps; because ψ(t + W) = E ψ(t) with E = e^{−iHW}, the window is then
/// doubled exactly by X ← X + E X E†, E ← E², until it covers t_max.
pub fn escape_distribution(
    hamiltonian: MatRef<'_, Complex64>,
    initial: &WalkState,
    start_time: f64,
    t_max: f64,
    dt: f64,
) -> Result<EscapeDistribution> {
    check_dims(hamiltonian, initial)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if !(start_time >= 0.0 && t_max > start_time && t_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 ≤ start_time < t_max, got {start_time} and {t_max}"
        )));
    }
    let n = hamiltonian.nrows();
    let start = propagate(hamiltonian, initial, start_time)?;
    let residual_norm = propagate(hamiltonian, &start, t_max - start_time)?.norm_sqr();
    if !(residual_norm < RESIDUAL_THRESHOLD) {
        return Err(Error::ResidualNorm {
            residual: residual_norm,
            t_max,
        });
    }

    let step = evolution(hamiltonian, dt);
    let mut simpson = Mat::<Complex64>::zeros(n, n);
    let mut trapezoid = Mat::<Complex64>::zeros(n, n);
    let mut psi = start.amplitudes.clone();
    for i in 0..=BASE_STEPS {
        let (ws, wt) = if i == 0 || i == BASE_STEPS {
            (1.0, 0.5)
        } else if i % 2 == 1 {
            (4.0, 1.0)
        } else {
            (2.0, 1.0)
        };
        add_outer(&mut simpson, &psi, ws * dt / 3.0);
        add_outer(&mut trapezoid, &psi, wt * dt);
        if i < BASE_STEPS {
            psi = mat_vec(step.as_ref(), &psi);
        }
    }

    let mut window = BASE_STEPS as f64 * dt;
    let mut jump = evolution(hamiltonian, window);
    while window < t_max - start_time {
        let jump_adj = jump.adjoint().to_owned();
        simpson = &simpson + &jump * &simpson * &jump_adj;
        trapezoid = &trapezoid + &jump * &trapezoid * &jump_adj;
        jump = &jump * &jump;
        window *= 2.0;
    }

    let im_h = imaginary_part(hamiltonian);
    let values = escape_from_gramian(&im_h, &simpson);
    let coarse = escape_from_gramian(&im_h, &trapezoid);
    let quadrature_error =
        values.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).sum::<f64>() + residual_norm;
    Ok(EscapeDistribution {
        values,
        start_time,
        quadrature_error,
        residual_norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentDecomposition {
    /// −i⟨ψ|[|x⟩⟨x|, Re H]|ψ⟩.
    pub coherent: Vec<f64>,
    /// ⟨ψ|{|x⟩⟨x|, Im H}|ψ⟩; positive entries are net incoherent inflow.
    pub incoherent: Vec<f64>,
    /// d|⟨x|ψ⟩|²/dt.
    pub density_rate: Vec<f64>,
}

/// Splits d|ψ_x|²/dt into the commutator (coherent) and anticommutator
/// (incoherent) contributions, with Re H and Im H the Hermitian and
/// anti-Hermitian/i parts.
pub fn current_decomposition(hamiltonian: MatRef<'_, Complex64>, state: &WalkState) -> Result<CurrentDecomposition> {
    check_dims(hamiltonian, state)?;
    if state.norm_sqr() == 0.0 {
        return Err(Error::InvalidInput("current decomposition needs a non-zero state".into()));
    }
    let psi = &state.amplitudes;
    let re_psi = mat_vec(hermitian_part(hamiltonian).as_ref(), psi);
    let im_psi = mat_vec(imaginary_part(hamiltonian).as_ref(), psi);
    let coherent: Vec<f64> = psi.iter().zip(&re_psi).map(|(p, r)| 2.0 * (p.conj() * r).im).collect();
    let incoherent: Vec<f64> = psi.iter().zip(&im_psi).map(|(p, r)| 2.0 * (p.conj() * r).re).collect();
    let density_rate = coherent.iter().zip(&incoherent).map(|(a, b)| a + b).collect();
    Ok(CurrentDecomposition {
        coherent,
        incoherent,
        density_rate,
    })
}

/// |⟨x|ψ(t)⟩|² for each t in an ascending grid of times measured from
/// `initial.time`; one row per time.
pub fn density_map(hamiltonian: MatRef<'_, Complex64>, initial: &WalkState, t_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_dims(hamiltonian, initial)?;
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("time grid must be ascending and non-negative".into()));
    }
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut state = initial.clone();
    let mut elapsed = 0.0;
    let mut cached: Option<(f64, ComplexMatrix)> = None;
    for &t in t_grid {
        let delta = t - elapsed;
        if delta > 0.0 {
            let reuse = matches!(&cached, Some((d, _)) if (d - delta).abs() <= 1e-12 * delta);
            if !reuse {
                cached = Some((delta, evolution(hamiltonian, delta)));
            }
            let u = &cached.as_ref().unwrap().1;
            state = WalkState::new(mat_vec(u.as_ref(), &state.amplitudes), initial.time + t);
            elapsed = t;
        }
        rows.push(state.densities());
    }
    Ok(rows)
}

/// ‖v − Pv‖₂ with P the mirror x → N−1−x.
pub fn reflection_difference(values: &[f64]) -> f64 {
    values
        .iter()
        .zip(values.iter().rev())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}
