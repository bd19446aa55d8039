//! Non-Hermitian eigenanalysis: eigendecomposition with left and right
//! vectors, the eigenvector-angle EP metric, Jordan-structure census,
//! imaginary line gaps and log-log scaling fits.

use std::f64::consts::{FRAC_PI_2, PI};

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greens::{ChainGeometry, DipoleOrientation};
use crate::hamiltonians::{
    add_onsite_decay, build_bloch_traceless, build_two_band, AlternationStrength,
};
use crate::linalg::{inner, is_complex_symmetric, mat2_to_matrix, vec_norm, ComplexMatrix};

/// α_m below this flags a candidate exceptional point.
pub const EP_THRESHOLD: f64 = 0.01;

/// Eigenvalue condition numbers above this mark a near-EP state.
pub const NEAR_EP_CONDITION: f64 = 1e6;

/// Default relative clustering tolerance of the Jordan census.
pub const CENSUS_TOLERANCE: f64 = 1e-6;

/// Singular values of a cluster's unit eigenvectors below this count as
/// coalesced directions.
const VECTOR_RANK_TOLERANCE: f64 = 1e-6;

/// Resolution in h of EP refinement. α_m grows like √|h − h_EP| next to an
/// EP, so a 10⁻⁴ bracket would leave α_m near 0.02, above `EP_THRESHOLD`.
const REFINE_WIDTH: f64 = 1e-6;

/// Eigenvalues ordered by (Re, Im) with unit-norm right and left vectors
/// stored as matrix columns. The left vector |L_i⟩ satisfies ⟨L_i|H = λ_i⟨L_i|.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub right: ComplexMatrix,
    pub left: ComplexMatrix,
    /// Eigenvalue condition number 1/|⟨L_i|R_i⟩|.
    pub condition: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn right_vector(&self, i: usize) -> Vec<Complex64> {
        self.right.col(i).iter().copied().collect()
    }

    pub fn left_vector(&self, i: usize) -> Vec<Complex64> {
        self.left.col(i).iter().copied().collect()
    }

    /// True when the eigenvector basis is close to singular at state `i`.
    pub fn near_ep(&self, i: usize) -> bool {
        !(self.condition[i] < NEAR_EP_CONDITION)
    }

    /// max_i ‖H r_i − λ_i r_i‖ / ‖H‖_F.
    pub fn relative_residual(&self, matrix: MatRef<'_, Complex64>) -> f64 {
        let scale = matrix.norm_l2().max(f64::MIN_POSITIVE);
        let hr = matrix * &self.right;
        (0..self.len())
            .map(|i| {
                let lam = self.eigenvalues[i];
                (0..self.right.nrows())
                    .map(|r| (hr[(r, i)] - lam * self.right[(r, i)]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
            / scale
    }
}

fn normalise_columns(m: &mut ComplexMatrix) {
    for j in 0..m.ncols() {
        let norm = m.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..m.nrows() {
                m[(i, j)] /= norm;
            }
        }
    }
}

fn all_finite(m: &ComplexMatrix) -> bool {
    (0..m.ncols()).all(|j| m.col(j).iter().all(|z| z.re.is_finite() && z.im.is_finite()))
}

fn order_by_re_im(values: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    idx
}

fn raw_eigen(matrix: MatRef<'_, Complex64>) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let evd = matrix
        .eigen()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let values: Vec<Complex64> = (0..matrix.nrows()).map(|i| evd.S()[i]).collect();
    Ok((values, evd.U().to_owned()))
}

/// Full eigendecomposition with paired left vectors.
///
/// Left vectors are conj(R) for complex-symmetric input and otherwise the
/// rows of R⁻¹; where R is numerically singular they come from the
/// eigenvectors of Hᵀ matched by eigenvalue.
pub fn eigendecompose(matrix: MatRef<'_, Complex64>) -> Result<Spectrum> {
    let n = matrix.nrows();
    if n == 0 || matrix.ncols() != n {
        return Err(Error::InvalidInput("eigendecompose needs a non-empty square matrix".into()));
    }
    let (values, vectors) = raw_eigen(matrix)?;
    let order = order_by_re_im(&values);
    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let mut right = Mat::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    normalise_columns(&mut right);

    let mut left = if is_complex_symmetric(matrix) {
        Mat::from_fn(n, n, |r, c| right[(r, c)].conj())
    } else {
        let inv = right.partial_piv_lu().solve(Mat::<Complex64>::identity(n, n));
        let candidate = Mat::from_fn(n, n, |r, c| inv[(c, r)].conj());
        if all_finite(&candidate) {
            candidate
        } else {
            let (tvals, tvecs) = raw_eigen(matrix.transpose())?;
            let mut used = vec![false; n];
            let mut m = Mat::<Complex64>::zeros(n, n);
            for c in 0..n {
                let best = (0..n)
                    .filter(|&j| !used[j])
                    .min_by(|&a, &b| {
                        (tvals[a] - eigenvalues[c])
                            .norm()
                            .total_cmp(&(tvals[b] - eigenvalues[c]).norm())
                    })
                    .unwrap();
                used[best] = true;
                for r in 0..n {
                    m[(r, c)] = tvecs[(r, best)].conj();
                }
            }
            m
        }
    };
    normalise_columns(&mut left);

    let condition = (0..n)
        .map(|i| {
            let overlap: Complex64 = (0..n).map(|r| left[(r, i)].conj() * right[(r, i)]).sum();
            1.0 / overlap.norm()
        })
        .collect();
    Ok(Spectrum {
        eigenvalues,
        right,
        left,
        condition,
    })
}

/// Eigenvalues only, ordered by (Re, Im).
pub fn eigenvalues(matrix: MatRef<'_, Complex64>) -> Result<Vec<Complex64>> {
    let values = matrix
        .eigenvalues()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let order = order_by_re_im(&values);
    Ok(order.iter().map(|&i| values[i]).collect())
}

/// Angle between two unit vectors, accurate for nearly parallel pairs.
pub fn vector_angle(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = vec_norm(a);
    let nb = vec_norm(b);
    let ov = inner(a, b) / (na * nb);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    let residual = a
        .iter()
        .zip(b)
        .map(|(x, y)| (y / nb - phase * x / na).norm_sqr())
        .sum::<f64>()
        .sqrt();
    // ‖b − e^{iφ}a‖ = 2 sin(θ/2) for unit vectors with ⟨a|b⟩ = e^{iφ}cos θ.
    2.0 * (0.5 * residual).min(1.0).asin()
}

/// Orthonormalises right vectors within clusters of degenerate eigenvalues
/// whose vectors are linearly independent; coalesced (defective) vectors are
/// left untouched.
fn degenerate_orthonormalised(spectrum: &Spectrum) -> Vec<Vec<Complex64>> {
    let n = spectrum.len();
    let scale = spectrum.eigenvalues.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-8 * scale;
    let mut vectors: Vec<Vec<Complex64>> = (0..n).map(|i| spectrum.right_vector(i)).collect();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let mut cluster = vec![i];
        assigned[i] = true;
        let mut head = 0;
        while head < cluster.len() {
            let c = cluster[head];
            for j in 0..n {
                if !assigned[j] && (spectrum.eigenvalues[j] - spectrum.eigenvalues[c]).norm() < tol {
                    assigned[j] = true;
                    cluster.push(j);
                }
            }
            head += 1;
        }
        if cluster.len() < 2 {
            continue;
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        for &m in &cluster {
            let mut v = vectors[m].clone();
            for b in &basis {
                let p = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
            let norm = vec_norm(&v);
            if norm > 1e-6 {
                let v: Vec<Complex64> = v.iter().map(|x| x / norm).collect();
                vectors[m] = v.clone();
                basis.push(v);
            }
        }
    }
    vectors
}

/// α_m = min_{i≠j} arccos |⟨ψ^R_i|ψ^R_j⟩| over normalised right vectors, after
/// orthonormalising diagonalizable degenerate clusters.
pub fn angle_metric(spectrum: &Spectrum) -> f64 {
    let n = spectrum.len();
    if n < 2 {
        return FRAC_PI_2;
    }
    let vectors = degenerate_orthonormalised(spectrum);
    let v = Mat::from_fn(n, n, |r, c| vectors[c][r]);
    let gram = v.adjoint() * &v;
    let mut best = (0, 1, -1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let o = gram[(i, j)].norm();
            if o > best.2 {
                best = (i, j, o);
            }
        }
    }
    vector_angle(&vectors[best.0], &vectors[best.1])
}

/// Minimises `f` on [a, b] by golden-section search down to `width`.
pub fn golden_section(mut a: f64, mut b: f64, width: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Outcome of an α_m(h) scan.
#[derive(Debug, Clone, PartialEq)]
pub struct EpReport {
    /// Refined locations whose α_m dropped below `EP_THRESHOLD`.
    pub h_values: Vec<f64>,
    /// Every refined local minimum of the sampled curve as (h, α_m).
    pub minima: Vec<(f64, f64)>,
    /// Sampled α_m(h).
    pub angle_curve: Vec<(f64, f64)>,
    /// Defective blocks at the deepest refined minimum; `None` when the
    /// census was ambiguous there.
    pub jordan_block_count: Option<usize>,
}

/// Scans α_m(h) of `builder(h)` over a sorted grid, refines each interior
/// local minimum by golden-section search and flags the EP candidates.
pub fn scan_eps<F>(builder: F, h_grid: &[f64]) -> Result<EpReport>
where
    F: Fn(f64) -> Result<ComplexMatrix> + Sync,
{
    if h_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("h grid must be strictly ascending".into()));
    }
    let alpha = |h: f64| -> Result<f64> {
        let m = builder(h)?;
        Ok(angle_metric(&eigendecompose(m.as_ref())?))
    };
    let curve: Vec<f64> = h_grid.par_iter().map(|&h| alpha(h)).collect::<Result<_>>()?;

    let brackets: Vec<(f64, f64)> = (1..h_grid.len().saturating_sub(1))
        .filter(|&i| curve[i] <= curve[i - 1] && curve[i] < curve[i + 1])
        .map(|i| (h_grid[i - 1], h_grid[i + 1]))
        .collect();
    let minima: Vec<(f64, f64)> = brackets
        .par_iter()
        .map(|&(a, b)| {
            let (h, v) = golden_section(a, b, REFINE_WIDTH, |h| alpha(h).unwrap_or(f64::INFINITY));
            (h, v)
        })
        .collect();
    let h_values = minima
        .iter()
        .filter(|(_, a)| *a < EP_THRESHOLD)
        .map(|(h, _)| *h)
        .collect();
    let jordan_block_count = minima
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .and_then(|&(h, _)| {
            let m = builder(h).ok()?;
            jordan_structure(m.as_ref(), None).ok().map(|c| c.defective)
        });
    Ok(EpReport {
        h_values,
        minima,
        angle_curve: h_grid.iter().copied().zip(curve).collect(),
        jordan_block_count,
    })
}

/// Jordan sectors of a matrix: 1×1 diagonalizable sectors and defective
/// blocks of size ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockCensus {
    pub diagonalizable: usize,
    pub defective: usize,
}

impl std::ops::Add for BlockCensus {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            diagonalizable: self.diagonalizable + o.diagonalizable,
            defective: self.defective + o.defective,
        }
    }
}

fn numerical_rank(m: MatRef<'_, Complex64>, tol: f64) -> Result<usize> {
    let s = m
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(s.iter().filter(|&&x| x > tol).count())
}

fn spectral_norm(m: MatRef<'_, Complex64>) -> Result<f64> {
    let s = m
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(s.iter().copied().fold(0.0, f64::max))
}

/// Clusters eigenvalues within `tolerance`·‖H‖₂ (default
/// `CENSUS_TOLERANCE`) by single linkage. The geometric multiplicity of a
/// cluster is the numerical rank of its unit right eigenvectors; a cluster of
/// m states with geometric multiplicity g holds min(g, m − g) defective blocks
/// and g − min(g, m − g) one-dimensional sectors.
pub fn jordan_structure(matrix: MatRef<'_, Complex64>, tolerance: Option<f64>) -> Result<BlockCensus> {
    let n = matrix.nrows();
    if matrix.ncols() != n || n == 0 {
        return Err(Error::InvalidInput("jordan_structure needs a non-empty square matrix".into()));
    }
    let norm = spectral_norm(matrix)?;
    let tol = tolerance.unwrap_or(CENSUS_TOLERANCE) * norm.max(f64::MIN_POSITIVE);
    let spectrum = eigendecompose(matrix)?;
    let values = &spectrum.eigenvalues;

    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() < tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut label, i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (values[i] - values[j]).norm();
            if roots[i] != roots[j] && gap < 2.0 * tol {
                return Err(Error::AmbiguousClustering { gap, tolerance: tol });
            }
        }
    }

    let mut census = BlockCensus::default();
    let mut seen = vec![false; n];
    for i in 0..n {
        let root = roots[i];
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let members: Vec<usize> = (0..n).filter(|&j| roots[j] == root).collect();
        let m = members.len();
        if m == 1 {
            census.diagonalizable += 1;
            continue;
        }
        let vectors = Mat::from_fn(n, m, |r, c| spectrum.right[(r, members[c])]);
        let geometric = numerical_rank(vectors.as_ref(), VECTOR_RANK_TOLERANCE)?.max(1);
        let defective = geometric.min(m - geometric);
        census.defective += defective;
        census.diagonalizable += geometric - defective;
    }
    Ok(census)
}

/// Jordan census of the σ₀-free Bloch matrices on the N/2 momenta
/// kd = 2πm/N, m = −N/4, …, N/4 − 1, of an N-site chain, counting momenta:
/// each 2×2 block is either defective or diagonalizable. The σ₀ part is a
/// multiple of the identity and cannot change the Jordan structure.
pub fn momentum_census(
    n_sites: usize,
    alternation: AlternationStrength,
    spacing: f64,
    orientation: DipoleOrientation,
    tolerance: Option<f64>,
) -> Result<BlockCensus> {
    if n_sites % 4 != 0 {
        return Err(Error::InvalidInput(format!(
            "momentum census needs N divisible by 4, got {n_sites}"
        )));
    }
    let quarter = (n_sites / 4) as i64;
    let mut census = BlockCensus::default();
    for m in -quarter..quarter {
        let kd = 2.0 * PI * m as f64 / n_sites as f64;
        let sample = build_bloch_traceless(kd / spacing, alternation, spacing, orientation)?;
        let block = mat2_to_matrix(&sample.matrix);
        if jordan_structure(block.as_ref(), tolerance)?.defective > 0 {
            census.defective += 1;
        } else {
            census.diagonalizable += 1;
        }
    }
    Ok(census)
}

/// Horizontal line Im ω = `line` separating the spectrum into two equal
/// halves, with at most two states lying on the line itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGap {
    pub gapped: bool,
    pub line: f64,
    /// Distance from the line to the nearest state not on it.
    pub margin: f64,
    /// States lying on the line.
    pub on_line: usize,
}

/// A margin below this fraction of the imaginary spread counts as closed.
const GAP_FRACTION: f64 = 0.05;

pub fn line_gap(values: &[Complex64]) -> LineGap {
    let mut im: Vec<f64> = values.iter().map(|z| z.im).collect();
    im.sort_by(f64::total_cmp);
    let n = im.len();
    if n < 2 {
        return LineGap {
            gapped: false,
            line: im.first().copied().unwrap_or(0.0),
            margin: 0.0,
            on_line: 0,
        };
    }
    let spread = im[n - 1] - im[0];
    let on_tol = 1e-8 * values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut best = LineGap {
        gapped: false,
        line: 0.5 * (im[0] + im[n - 1]),
        margin: 0.0,
        on_line: 0,
    };
    let mut consider = |line: f64, margin: f64, on_line: usize| {
        if margin > best.margin {
            best = LineGap {
                gapped: false,
                line,
                margin,
                on_line,
            };
        }
    };
    if n % 2 == 0 {
        let m = n / 2;
        consider(0.5 * (im[m - 1] + im[m]), 0.5 * (im[m] - im[m - 1]), 0);
        if n >= 4 && im[m] - im[m - 1] <= on_tol {
            let line = 0.5 * (im[m - 1] + im[m]);
            consider(line, (line - im[m - 2]).min(im[m + 1] - line), 2);
        }
    } else {
        let m = n / 2;
        let line = im[m];
        let below = if m >= 1 { line - im[m - 1] } else { f64::INFINITY };
        let above = if m + 1 < n { im[m + 1] - line } else { f64::INFINITY };
        consider(line, below.min(above), 1);
    }
    best.gapped = best.margin > GAP_FRACTION * spread && best.margin > on_tol;
    best
}

/// Log-log least-squares fit value ≈ prefactor · size^exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// Standard error of the exponent.
    pub exponent_stderr: f64,
    /// Smallest and largest abscissa used.
    pub window: (f64, f64),
}

/// Log-log fit with at least `min_points` strictly positive points.
pub fn log_log_fit(sizes: &[f64], values: &[f64], min_points: usize) -> Result<PowerLawFit> {
    if sizes.len() != values.len() {
        return Err(Error::InvalidInput("sizes and values differ in length".into()));
    }
    if sizes.len() < min_points.max(2) {
        return Err(Error::InvalidInput(format!(
            "power-law fit needs at least {} points, got {}",
            min_points.max(2),
            sizes.len()
        )));
    }
    if sizes.iter().chain(values).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput("power-law fit needs positive finite data".into()));
    }
    let x: Vec<f64> = sizes.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("power-law fit needs distinct sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    let dof = x.len().saturating_sub(2).max(1) as f64;
    let exponent_stderr = (ss_res / dof / sxx).sqrt();
    let (lo, hi) = sizes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &s| (l.min(s), h.max(s)));
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        exponent_stderr,
        window: (lo, hi),
    })
}

/// Log-log fit of values ∝ sizes^exponent over at least four points.
pub fn fit_power_law(sizes: &[f64], values: &[f64]) -> Result<PowerLawFit> {
    log_log_fit(sizes, values, 4)
}

/// Smallest total decay rate −2 Im ω of the alternating chain, with the
/// single-emitter decay included.
pub fn minimal_decay_rate(
    geometry: ChainGeometry,
    orientation: DipoleOrientation,
    alternation: AlternationStrength,
) -> Result<f64> {
    let mut m = build_two_band(geometry, orientation, alternation)?;
    add_onsite_decay(&mut m);
    let values = eigenvalues(m.as_ref())?;
    Ok(values.iter().map(|z| -2.0 * z.im).fold(f64::INFINITY, f64::min))
}

/// Index pair of the lowest-Re state and its partner: the state closest to
/// it in either Re or Im. Below the edge EP the pair is complex-conjugate
/// about the central line; above it both sit on that line.
pub fn edge_pair(spectrum: &Spectrum) -> Option<(usize, usize)> {
    if spectrum.len() < 2 {
        return None;
    }
    let lowest = 0;
    let z0 = spectrum.eigenvalues[lowest];
    let partner = (1..spectrum.len()).min_by(|&a, &b| {
        let da = spectrum.eigenvalues[a] - z0;
        let db = spectrum.eigenvalues[b] - z0;
        da.re.abs().min(da.im.abs()).total_cmp(&db.re.abs().min(db.im.abs()))
    })?;
    Some((lowest, partner))
}

/// Angle between the right vectors of the edge pair of H_TB(h).
pub fn edge_pair_angle(
    geometry: ChainGeometry,
    orientation: DipoleOrientation,
    h: f64,
) -> Result<f64> {
    let m = build_two_band(geometry, orientation, AlternationStrength::fixed(h)?)?;
    let s = eigendecompose(m.as_ref())?;
    let (a, b) = edge_pair(&s).ok_or(Error::EdgeNotFound(geometry.n_sites))?;
    Ok(vector_angle(&s.right_vector(a), &s.right_vector(b)))
}

/// h^E_EP(N): where the two light-line states coalesce. Located by a coarse
/// logarithmic scan of the edge-pair angle on [h_min, h_max] and
/// golden-section refinement.
pub fn h_edge_ep(
    geometry: ChainGeometry,
    orientation: DipoleOrientation,
    h_min: f64,
    h_max: f64,
) -> Result<f64> {
    let n = geometry.n_sites;
    let samples = 48;
    let grid: Vec<f64> = (0..samples)
        .map(|i| h_min * (h_max / h_min).powf(i as f64 / (samples - 1) as f64))
        .collect();
    let angles: Vec<f64> = grid
        .par_iter()
        .map(|&h| edge_pair_angle(geometry, orientation, h))
        .collect::<Result<_>>()?;
    let i = (0..samples)
        .min_by(|&a, &b| angles[a].total_cmp(&angles[b]))
        .unwrap();
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(samples - 1)];
    let (h, angle) = golden_section(lo, hi, 1e-6 * hi, |h| {
        edge_pair_angle(geometry, orientation, h).unwrap_or(f64::INFINITY)
    });
    if angle > EP_THRESHOLD {
        return Err(Error::EdgeNotFound(n));
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEpScaling {
    pub sizes: Vec<usize>,
    pub h_values: Vec<f64>,
    pub fit: PowerLawFit,
}

/// h^E_EP(N) over ascending even sizes at d·k₀ = π/2 and the magic angle,
/// with its power-law fit.
pub fn h_edge_ep_scaling(sizes: &[usize]) -> Result<EdgeEpScaling> {
    if sizes.iter().any(|n| n % 2 != 0) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("sizes must be even and ascending".into()));
    }
    let orientation = DipoleOrientation::magic();
    let h_values: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let g = ChainGeometry::half_wavelength(n)?;
            h_edge_ep(g, orientation, 1e-3, 0.3).map_err(|_| Error::EdgeNotFound(n))
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let fit = log_log_fit(&x, &h_values, 3)?;
    Ok(EdgeEpScaling {
        sizes: sizes.to_vec(),
        h_values,
        fit,
    })
}
