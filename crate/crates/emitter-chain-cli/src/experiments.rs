use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use emitter_chain::dispersion::{discrete_ft, two_band_dispersion};
use emitter_chain::edge_analysis::{
    deformation_sweep, edge_candidate, find_edge_state, fit_tail, localization_length, participation_ratio, ChainEnd,
    EdgeStateProfile,
};
use emitter_chain::hamiltonians::build_two_band;
use emitter_chain::spectral::{
    edge_pair, eigendecompose, fit_power_law, h_edge_ep, log_log_fit, minimal_decay_rate, scan_eps, PowerLawFit,
    EP_THRESHOLD,
};
use emitter_chain::topology::{long_range_q_samples, short_range_q_samples, winding_number};
use emitter_chain::walks::{
    density_map, escape_distribution, make_w_state, reflection_difference, walk_hamiltonian, EscapeDistribution,
};
use emitter_chain::Error;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Experiment, ExperimentConfig, ScalingQuantity, WindingModel};
use crate::error::{CliError, Result};
use crate::table::{write_csv, Table};

/// Walks stop extending t_max here.
const T_MAX_CEILING: f64 = 1e8;

/// h^E_EP search bracket.
const EDGE_EP_BRACKET: (f64, f64) = (1e-3, 0.3);

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub config: ExperimentConfig,
    pub library_version: String,
    pub wall_time_seconds: f64,
    pub tables: Vec<String>,
    pub summary: Map<String, Value>,
}

#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub metadata: Metadata,
    pub tables: Vec<(String, Table)>,
}

impl ResultBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Writes `<name>.csv` per table and `metadata.json` into `dir`,
    /// returning the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (name, table) in &self.tables {
            let path = dir.join(format!("{name}.csv"));
            write_csv(table, &path)?;
            written.push(path);
        }
        let path = dir.join("metadata.json");
        let text = serde_json::to_string_pretty(&self.metadata)? + "\n";
        std::fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
        Ok(written)
    }
}

struct Run<'a> {
    config: &'a ExperimentConfig,
    tables: Vec<(String, Table)>,
    summary: Map<String, Value>,
}

impl Run<'_> {
    fn fail(&self, context: impl Into<String>) -> impl FnOnce(Error) -> CliError + '_ {
        let context = context.into();
        move |source| CliError::Experiment {
            experiment: self.config.experiment.to_string(),
            context,
            source,
        }
    }

    fn table(&mut self, name: &str, table: Table) {
        self.tables.push((name.to_string(), table));
    }

    fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }
}

/// Runs one experiment; the tables depend only on the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultBundle> {
    config.validate()?;
    let start = Instant::now();
    let mut run = Run {
        config,
        tables: Vec::new(),
        summary: Map::new(),
    };
    match config.experiment {
        Experiment::Dispersion => dispersion(&mut run)?,
        Experiment::EpScan => ep_scan(&mut run)?,
        Experiment::Scaling => scaling(&mut run)?,
        Experiment::Edge => edge(&mut run)?,
        Experiment::Deform => deform(&mut run)?,
        Experiment::Walk => walk(&mut run)?,
        Experiment::Winding => winding(&mut run)?,
    }
    Ok(ResultBundle {
        metadata: Metadata {
            config: config.clone(),
            library_version: emitter_chain::VERSION.to_string(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            tables: run.tables.iter().map(|(n, _)| n.clone()).collect(),
            summary: run.summary,
        },
        tables: run.tables,
    })
}

/// Cell midpoints of [−edge, edge]; they avoid both the zone edge and k = 0.
fn midpoints(edge: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| -edge + (j as f64 + 0.5) * 2.0 * edge / count as f64)
        .collect()
}

fn dispersion(run: &mut Run) -> Result<()> {
    let c = run.config;
    let o = c.orientation()?;
    let d = c.spacing;
    let points = c.k_points();

    let mut single = Table::new(&["k", "re_omega", "im_omega", "decay_rate"]);
    for k in midpoints(PI / d, points) {
        let g = discrete_ft(k, d, o, c.tolerance).map_err(run.fail(format!("single band at k = {k}")))?;
        let omega = -g.value;
        single.push(vec![k, omega.re, omega.im, 1.0 - 2.0 * omega.im]);
    }

    let h = c.alternation()?.h;
    let mut two = Table::new(&["k", "re_omega_plus", "im_omega_plus", "re_omega_minus", "im_omega_minus"]);
    for k in midpoints(PI / (2.0 * d), points) {
        let s = two_band_dispersion(k, h, d, o).map_err(run.fail(format!("two bands at k = {k}, h = {h}")))?;
        two.push(vec![k, s.omega_plus.re, s.omega_plus.im, s.omega_minus.re, s.omega_minus.im]);
    }
    run.note("h", json!(h));
    run.table("single_band", single);
    run.table("two_band", two);
    Ok(())
}

fn ep_scan(run: &mut Run) -> Result<()> {
    let c = run.config;
    let n = c.chain_length()?;
    let g = c.geometry(n)?;
    let o = c.orientation()?;
    let grid = c.h_grid();
    let report = scan_eps(
        |h| build_two_band(g, o, emitter_chain::hamiltonians::AlternationStrength::fixed(h)?),
        &grid,
    )
    .map_err(run.fail(format!("N = {n}, {} h values", grid.len())))?;

    let mut curve = Table::new(&["h", "alpha"]);
    report.angle_curve.iter().for_each(|&(h, a)| curve.push(vec![h, a]));
    let mut minima = Table::new(&["h", "alpha"]);
    report.minima.iter().for_each(|&(h, a)| minima.push(vec![h, a]));
    let mut eps = Table::new(&["h"]);
    report.h_values.iter().for_each(|&h| eps.push(vec![h]));
    run.note("ep_threshold", json!(EP_THRESHOLD));
    run.note("jordan_block_count", json!(report.jordan_block_count));
    run.table("angle_curve", curve);
    run.table("minima", minima);
    run.table("eps", eps);
    Ok(())
}

fn fit_table(fit: &PowerLawFit) -> Table {
    let mut t = Table::new(&["exponent", "prefactor", "r_squared", "exponent_stderr", "window_min", "window_max"]);
    t.push(vec![fit.exponent, fit.prefactor, fit.r_squared, fit.exponent_stderr, fit.window.0, fit.window.1]);
    t
}

fn scaling(run: &mut Run) -> Result<()> {
    let c = run.config;
    let o = c.orientation()?;
    let sizes = c.sizes();
    let quantity = c.sweep.quantity;
    let points: Vec<(usize, f64, f64)> = sizes
        .par_iter()
        .map(|&n| {
            let g = c.geometry(n)?;
            let a = c.h.resolve(n)?;
            let value = match quantity {
                ScalingQuantity::DecayRate => minimal_decay_rate(g, o, a),
                ScalingQuantity::EdgeEp => h_edge_ep(g, o, EDGE_EP_BRACKET.0, EDGE_EP_BRACKET.1),
            }
            .map_err(run.fail(format!("N = {n}, h = {}", a.h)))?;
            Ok((n, a.h, value))
        })
        .collect::<Result<_>>()?;

    let (name, column) = match quantity {
        ScalingQuantity::DecayRate => ("decay_rates", "min_decay_rate"),
        ScalingQuantity::EdgeEp => ("edge_ep", "h_edge_ep"),
    };
    let mut values = Table::new(&["n_sites", "h", column]);
    points.iter().for_each(|&(n, h, v)| values.push(vec![n as f64, h, v]));

    let from = c.sweep.fit_from.unwrap_or(0);
    let (x, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.0 >= from)
        .map(|&(n, _, v)| (n as f64, v))
        .unzip();
    let fit = match quantity {
        ScalingQuantity::DecayRate => fit_power_law(&x, &y),
        // h^E_EP is costly, so three sizes are accepted.
        ScalingQuantity::EdgeEp => log_log_fit(&x, &y, 3),
    }
    .map_err(run.fail(format!("power-law fit over sizes ≥ {from}")))?;
    run.table(name, values);
    run.table("fit", fit_table(&fit));
    Ok(())
}

fn end_code(end: ChainEnd) -> f64 {
    match end {
        ChainEnd::Left => 0.0,
        ChainEnd::Right => 1.0,
    }
}

fn profile_table(profile: &EdgeStateProfile) -> Table {
    let mut t = Table::new(&["site", "amplitude"]);
    for (i, &a) in profile.amplitudes.iter().enumerate() {
        t.push(vec![(i + 1) as f64, a]);
    }
    t
}

fn edge(run: &mut Run) -> Result<()> {
    let c = run.config;
    let n = c.chain_length()?;
    let g = c.geometry(n)?;
    let a = c.alternation()?;
    let context = format!("N = {n}, h = {}", a.h);
    let m = walk_hamiltonian(g, c.orientation()?, a).map_err(run.fail(context.clone()))?;
    let s = eigendecompose(m.as_ref()).map_err(run.fail(context.clone()))?;
    let profile = match find_edge_state(&s, g).map_err(run.fail(context.clone()))? {
        Some(p) => p,
        None => {
            let (i, j) = edge_pair(&s).ok_or(CliError::invalid("n_sites", "chain too short for an edge pair"))?;
            edge_candidate(&s, &[i, j]).map_err(run.fail(context.clone()))?
        }
    };

    let mut summary = Table::new(&[
        "state_index",
        "re_omega",
        "im_omega",
        "decay_rate",
        "boundary_weight",
        "end",
        "participation_ratio",
        "localization_length",
    ]);
    summary.push(vec![
        profile.state_index as f64,
        profile.eigenvalue.re,
        profile.eigenvalue.im,
        -2.0 * profile.eigenvalue.im,
        profile.boundary_weight,
        end_code(profile.end),
        participation_ratio(&profile),
        localization_length(&profile),
    ]);
    run.note("h", json!(a.h));
    run.note("localized", json!(profile.is_localized()));
    run.note("end", json!(format!("{:?}", profile.end).to_lowercase()));
    let tail = match fit_tail(&profile, None) {
        Ok(fit) => fit_table(&fit),
        Err(e @ Error::TailNotAlgebraic { .. }) => {
            run.note("tail_fit", json!(e.to_string()));
            Table::new(&["exponent", "prefactor", "r_squared", "exponent_stderr", "window_min", "window_max"])
        }
        Err(e) => return Err(run.fail(context)(e)),
    };
    run.table("profile", profile_table(&profile));
    run.table("summary", summary);
    run.table("tail_fit", tail);
    Ok(())
}

fn deform(run: &mut Run) -> Result<()> {
    let c = run.config;
    let n = c.chain_length()?;
    let a = c.alternation()?;
    let sweep = deformation_sweep(c.geometry(n)?, a, c.orientation()?, &c.lambda_grid)
        .map_err(run.fail(format!("N = {n}, h = {}", a.h)))?;

    let mut columns = vec!["site".to_string()];
    columns.extend(sweep.lambda_grid.iter().map(|l| format!("lambda_{l}")));
    let mut profiles = Table::new(&columns);
    for i in 0..n {
        let mut row = vec![(i + 1) as f64];
        row.extend(sweep.profiles.iter().map(|p| p.amplitudes[i]));
        profiles.push(row);
    }
    let mut pr = Table::new(&["lambda", "participation_ratio", "boundary_weight", "state_index"]);
    for ((l, p), ratio) in sweep.lambda_grid.iter().zip(&sweep.profiles).zip(&sweep.participation_ratios) {
        pr.push(vec![*l, *ratio, p.boundary_weight, p.state_index as f64]);
    }
    run.note("h", json!(a.h));
    run.table("profiles", profiles);
    run.table("participation", pr);
    Ok(())
}

fn walk(run: &mut Run) -> Result<()> {
    let c = run.config;
    let n = c.chain_length()?;
    let a = c.alternation()?;
    let context = format!("N = {n}, h = {}", a.h);
    let m = walk_hamiltonian(c.geometry(n)?, c.orientation()?, a).map_err(run.fail(context.clone()))?;
    let w = make_w_state(n).map_err(run.fail(context.clone()))?;

    let mut t_max = c.t_max;
    let escape: EscapeDistribution = loop {
        match escape_distribution(m.as_ref(), &w, c.start_time, t_max, c.dt) {
            Err(Error::ResidualNorm { .. }) if t_max * 10.0 <= T_MAX_CEILING => t_max *= 10.0,
            other => break other.map_err(run.fail(format!("{context}, t_max = {t_max}")))?,
        }
    };
    let mut f = Table::new(&["site", "escape"]);
    for (i, &v) in escape.values.iter().enumerate() {
        f.push(vec![(i + 1) as f64, v]);
    }

    let times = c.density_times();
    let rows = density_map(m.as_ref(), &w, &times).map_err(run.fail(context))?;
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=n).map(|i| format!("site_{i}")));
    let mut density = Table::new(&columns);
    for (t, row) in times.iter().zip(rows) {
        let mut r = vec![*t];
        r.extend(row);
        density.push(r);
    }

    let mut summary = Table::new(&[
        "total",
        "min",
        "max",
        "quadrature_error",
        "residual_norm",
        "t_max_used",
        "reflection_difference",
    ]);
    summary.push(vec![
        escape.total(),
        escape.min(),
        escape.max(),
        escape.quadrature_error,
        escape.residual_norm,
        t_max,
        reflection_difference(&escape.values),
    ]);
    run.note("h", json!(a.h));
    run.note("t_max_used", json!(t_max));
    run.table("escape", f);
    run.table("density", density);
    run.table("summary", summary);
    Ok(())
}

fn winding(run: &mut Run) -> Result<()> {
    let c = run.config;
    let points = c.k_points();
    let a = c.alternation()?;
    let samples: Vec<(f64, Complex64)> = match c.sweep.model {
        WindingModel::ShortRange => {
            let g = c.sweep.g.unwrap_or(1.0);
            short_range_q_samples(g, a.h, c.spacing, points).map_err(run.fail(format!("g = {g}, h = {}", a.h)))?
        }
        WindingModel::LongRange => {
            long_range_q_samples(a, c.spacing, points).map_err(run.fail(format!("h = {}", a.h)))?
        }
    };
    let q: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let result = winding_number(&q);

    let mut q_table = Table::new(&["k", "re_q", "im_q"]);
    samples.iter().for_each(|(k, q)| q_table.push(vec![*k, q.re, q.im]));
    let mut w = Table::new(&["value", "quantization_residual", "defined", "discontinuities"]);
    w.push(vec![
        result.value,
        result.quantization_residual,
        if result.defined { 1.0 } else { 0.0 },
        result.discontinuities.len() as f64,
    ]);
    run.note("defined", json!(result.defined));
    run.note("discontinuities", json!(result.discontinuities));
    run.table("q", q_table);
    run.table("winding", w);
    Ok(())
}
