//! The dissipation-induced edge state: identification among the light-line
//! descendants, algebraic tail fits, participation ratio, localization length
//! and the delocalization sweep along the trivial deformation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::{ChainGeometry, DipoleOrientation};
use crate::hamiltonians::{build_deformed_real_space, AlternationStrength};
use crate::linalg::inner;
use crate::spectral::{edge_pair, eigendecompose, PowerLawFit, Spectrum};

/// Boundary weight above which a state counts as localized.
pub const LOCALIZATION_THRESHOLD: f64 = 0.5;

/// Fraction of the chain at each end that makes up the boundary region.
pub const BOUNDARY_FRACTION: f64 = 0.1;

/// Candidates whose boundary weights differ by less than this are ambiguous.
pub const TIE_TOLERANCE: f64 = 1e-3;

/// Tail fits with r² below this are not algebraic.
pub const MIN_TAIL_R_SQUARED: f64 = 0.9;

/// Largest λ increment used when continuing the edge state.
const TRACKING_STEP: f64 = 0.05;

/// Overlap below which continuation between neighbouring λ is lost.
const MIN_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainEnd {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStateProfile {
    /// Index of the state in its `Spectrum`.
    pub state_index: usize,
    /// |ψ(x)| with ‖ψ‖ = 1.
    pub amplitudes: Vec<f64>,
    pub eigenvalue: Complex64,
    /// Probability in the boundary region at `end`.
    pub boundary_weight: f64,
    pub end: ChainEnd,
    /// Tail fit on the default window, when the tail is algebraic there.
    pub tail_fit: Option<PowerLawFit>,
}

fn boundary_sites(n: usize) -> usize {
    ((n as f64 * BOUNDARY_FRACTION).round() as usize).max(1)
}

impl EdgeStateProfile {
    pub fn from_vector(state_index: usize, vector: &[Complex64], eigenvalue: Complex64) -> Self {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amplitudes: Vec<f64> = vector.iter().map(|z| z.norm() / norm).collect();
        let n = amplitudes.len();
        let b = boundary_sites(n);
        let left: f64 = amplitudes[..b].iter().map(|a| a * a).sum();
        let right: f64 = amplitudes[n - b..].iter().map(|a| a * a).sum();
        let (boundary_weight, end) = if left >= right {
            (left, ChainEnd::Left)
        } else {
            (right, ChainEnd::Right)
        };
        let mut profile = Self {
            state_index,
            amplitudes,
            eigenvalue,
            boundary_weight,
            end,
            tail_fit: None,
        };
        profile.tail_fit = fit_tail(&profile, None).ok();
        profile
    }

    pub fn n_sites(&self) -> usize {
        self.amplitudes.len()
    }

    /// |ψ| ordered by distance from the localized end, distance 1 first.
    pub fn from_localized_end(&self) -> Vec<f64> {
        match self.end {
            ChainEnd::Left => self.amplitudes.clone(),
            ChainEnd::Right => self.amplitudes.iter().rev().copied().collect(),
        }
    }

    pub fn is_localized(&self) -> bool {
        self.boundary_weight > LOCALIZATION_THRESHOLD
    }
}

/// Profile with the largest boundary weight among `candidates`; ties go to
/// the left end, then to the lower index.
pub fn edge_candidate(spectrum: &Spectrum, candidates: &[usize]) -> Result<EdgeStateProfile> {
    let mut profiles = profiles_of(spectrum, candidates)?;
    let best = preferred(&profiles);
    Ok(profiles.swap_remove(best))
}

fn profiles_of(spectrum: &Spectrum, candidates: &[usize]) -> Result<Vec<EdgeStateProfile>> {
    if candidates.is_empty() || candidates.iter().any(|&i| i >= spectrum.len()) {
        return Err(Error::InvalidInput("edge candidates must be valid state indices".into()));
    }
    Ok(candidates
        .iter()
        .map(|&i| EdgeStateProfile::from_vector(i, &spectrum.right_vector(i), spectrum.eigenvalues[i]))
        .collect())
}

/// Largest boundary weight; among weights within `TIE_TOLERANCE` of it the
/// left end wins, then the lower state index.
fn preferred(profiles: &[EdgeStateProfile]) -> usize {
    let top = profiles.iter().map(|p| p.boundary_weight).fold(f64::NEG_INFINITY, f64::max);
    (0..profiles.len())
        .filter(|&i| top - profiles[i].boundary_weight < TIE_TOLERANCE)
        .min_by_key(|&i| (profiles[i].end == ChainEnd::Right, profiles[i].state_index))
        .unwrap()
}

/// Localized state among `candidates`, or `None` when none exceeds the
/// localization threshold. Two localized candidates at the same end with
/// weights within `TIE_TOLERANCE` are ambiguous; at opposite ends the left
/// one is reported.
pub fn find_edge_state_among(spectrum: &Spectrum, candidates: &[usize]) -> Result<Option<EdgeStateProfile>> {
    let mut profiles = profiles_of(spectrum, candidates)?;
    let chosen = preferred(&profiles);
    let best = &profiles[chosen];
    if !best.is_localized() {
        return Ok(None);
    }
    for (i, second) in profiles.iter().enumerate() {
        if i != chosen
            && second.end == best.end
            && (best.boundary_weight - second.boundary_weight).abs() < TIE_TOLERANCE
        {
            return Err(Error::AmbiguousEdge {
                first: best.state_index,
                second: second.state_index,
                weight_first: best.boundary_weight,
                weight_second: second.boundary_weight,
            });
        }
    }
    Ok(Some(profiles.swap_remove(chosen)))
}

/// Edge state among the two light-line descendants (the lowest-Re state
/// and its partner) of an open chain.
pub fn find_edge_state(spectrum: &Spectrum, geometry: ChainGeometry) -> Result<Option<EdgeStateProfile>> {
    if spectrum.len() != geometry.n_sites {
        return Err(Error::InvalidInput(format!(
            "spectrum has {} states for a {}-site chain",
            spectrum.len(),
            geometry.n_sites
        )));
    }
    let (a, b) = edge_pair(spectrum).ok_or(Error::EdgeNotFound(geometry.n_sites))?;
    find_edge_state_among(spectrum, &[a, b])
}

/// Default tail window in distance from the localized end: [0.1N, 0.9N].
pub fn default_tail_window(n_sites: usize) -> (usize, usize) {
    (
        ((0.1 * n_sites as f64).round() as usize).max(1),
        (0.9 * n_sites as f64).round() as usize,
    )
}

/// Log-log fit of |ψ| against distance s (1-based) from the localized end
/// over s ∈ [window.0, window.1]. The two sublattices share the exponent but
/// get separate prefactors; the reported prefactor is their geometric mean.
pub fn fit_tail(profile: &EdgeStateProfile, window: Option<(usize, usize)>) -> Result<PowerLawFit> {
    let n = profile.n_sites();
    let (lo, hi) = window.unwrap_or_else(|| default_tail_window(n));
    if lo < 1 || hi > n || hi < lo + 3 {
        return Err(Error::InvalidInput(format!("tail window [{lo}, {hi}] invalid for {n} sites")));
    }
    let amps = profile.from_localized_end();
    let mut groups: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for s in lo..=hi {
        let a = amps[s - 1];
        if a > 0.0 {
            groups[s % 2].push(((s as f64).ln(), a.ln()));
        }
    }
    let count = groups[0].len() + groups[1].len();
    if count < 4 {
        return Err(Error::InvalidInput("tail window holds fewer than 4 non-zero sites".into()));
    }
    let (mut sxx, mut sxy) = (0.0, 0.0);
    let mut means = Vec::new();
    for g in groups.iter().filter(|g| !g.is_empty()) {
        let k = g.len() as f64;
        let mx = g.iter().map(|p| p.0).sum::<f64>() / k;
        let my = g.iter().map(|p| p.1).sum::<f64>() / k;
        sxx += g.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        sxy += g.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
        means.push((g, mx, my));
    }
    if sxx == 0.0 {
        return Err(Error::InvalidInput("tail window has no spread in distance".into()));
    }
    let slope = sxy / sxx;
    let grand = groups.iter().flatten().map(|p| p.1).sum::<f64>() / count as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mut log_prefactor = 0.0;
    for (g, mx, my) in &means {
        let intercept = my - slope * mx;
        log_prefactor += intercept;
        for p in g.iter() {
            ss_res += (p.1 - intercept - slope * p.0).powi(2);
            ss_tot += (p.1 - grand).powi(2);
        }
    }
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    let dof = count.saturating_sub(1 + means.len()).max(1) as f64;
    let fit = PowerLawFit {
        exponent: slope,
        prefactor: (log_prefactor / means.len() as f64).exp(),
        r_squared,
        exponent_stderr: (ss_res / dof / sxx).sqrt(),
        window: (lo as f64, hi as f64),
    };
    if r_squared < MIN_TAIL_R_SQUARED {
        return Err(Error::TailNotAlgebraic { r_squared });
    }
    Ok(fit)
}

/// PR = 1/Σ|ψ(x)|⁴.
pub fn participation_ratio(profile: &EdgeStateProfile) -> f64 {
    1.0 / profile.amplitudes.iter().map(|a| a.powi(4)).sum::<f64>()
}

/// Mean distance Σ_s s|ψ_s|² from the localized end, s = 1 at the end site.
pub fn localization_length(profile: &EdgeStateProfile) -> f64 {
    profile
        .from_localized_end()
        .iter()
        .enumerate()
        .map(|(i, a)| (i + 1) as f64 * a * a)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSweep {
    pub lambda_grid: Vec<f64>,
    pub profiles: Vec<EdgeStateProfile>,
    pub participation_ratios: Vec<f64>,
}

/// Follows the edge state of the σ₀-free chain along the deformation toward
/// the trivial intracell endpoint. The state at λ = 0 is the most
/// boundary-localized eigenstate; it is continued by maximal eigenvector
/// overlap in λ steps of at most 0.05.
pub fn deformation_sweep(
    geometry: ChainGeometry,
    alternation: AlternationStrength,
    orientation: DipoleOrientation,
    lambda_grid: &[f64],
) -> Result<DeformationSweep> {
    if lambda_grid.iter().any(|l| !(0.0..=1.0).contains(l)) || lambda_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("λ grid must be ascending within [0, 1]".into()));
    }
    let start = eigendecompose(build_deformed_real_space(geometry, 0.0, alternation, orientation)?.as_ref())?;
    let all: Vec<usize> = (0..start.len()).collect();
    let seed = edge_candidate(&start, &all)?;
    let mut tracked = start.right_vector(seed.state_index);
    let mut lambda = 0.0;

    let mut profiles = Vec::with_capacity(lambda_grid.len());
    for &target in lambda_grid {
        let mut current = if target == 0.0 { Some((start.clone(), seed.state_index)) } else { None };
        while current.is_none() {
            let steps = ((target - lambda) / TRACKING_STEP).ceil().max(1.0);
            let next = (lambda + (target - lambda) / steps).min(target);
            let s = eigendecompose(build_deformed_real_space(geometry, next, alternation, orientation)?.as_ref())?;
            let (best, overlap) = (0..s.len())
                .map(|j| (j, inner(&tracked, &s.right_vector(j)).norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if overlap < MIN_OVERLAP {
                return Err(Error::TrackingLost { lambda: next, overlap });
            }
            tracked = s.right_vector(best);
            lambda = next;
            if next >= target {
                current = Some((s, best));
            }
        }
        let (s, idx) = current.unwrap();
        profiles.push(EdgeStateProfile::from_vector(idx, &s.right_vector(idx), s.eigenvalues[idx]));
    }
    let participation_ratios = profiles.iter().map(participation_ratio).collect();
    Ok(DeformationSweep {
        lambda_grid: lambda_grid.to_vec(),
        profiles,
        participation_ratios,
    })
}
