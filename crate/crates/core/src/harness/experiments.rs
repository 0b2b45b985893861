//! The named pipelines behind the subcommands.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::sim1d::{
    decay_fit, entire_solution_sequence, error_series_against, run_cauchy_1d, threshold_exploration, width_sweep,
    EntireSequenceReport, Heterogeneity1D, InitialDatum, Outcome, RunTrajectory, SweepReport, STALL_TOLERANCE,
};
use crate::sim2d::{
    blocking_exploration, build_domain, build_supersolution, derived_parameters, entire_solution_sequence_2d,
    fit_envelope, run_cauchy_2d, BoundaryCurve, RunTrajectory2D,
};
use crate::spectral::spectral_gap;
use crate::wave::{check_tail_estimates, solve_wave, WaveGrid};

use super::acceptance;
use super::config::{LoadedConfig, ThresholdParameter};
use super::output::{time_label, Cell, OutputSink};
use super::HarnessError;

pub const EXPERIMENTS: [&str; 10] =
    ["wave", "gap", "run1d", "run2d", "supersol", "entire1d", "entire2d", "threshold", "blocking", "accept"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub config_hash: String,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
    pub summary: Value,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl ExperimentRecord {
    /// 4 when this is a failed acceptance run, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.name == "accept" && self.summary.get("pass") != Some(&Value::Bool(true)) {
            super::EXIT_ACCEPTANCE_FAILED
        } else {
            0
        }
    }
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Runs the named pipeline and writes its files into `sink`.
pub fn run_experiment(loaded: &LoadedConfig, name: &str, sink: &mut OutputSink) -> Result<ExperimentRecord, HarnessError> {
    if !EXPERIMENTS.contains(&name) {
        return Err(HarnessError::UnknownExperiment(name.into()));
    }
    let started = now();
    let summary = match name {
        "wave" => wave(loaded, sink),
        "gap" => gap(loaded, sink),
        "run1d" => run1d(loaded, sink),
        "run2d" => run2d(loaded, sink),
        "supersol" => supersol(loaded, sink),
        "entire1d" => entire1d(loaded, sink),
        "entire2d" => entire2d(loaded, sink),
        "threshold" => threshold(loaded, sink),
        "blocking" => blocking(loaded, sink),
        _ => accept(loaded, sink),
    }?;
    Ok(ExperimentRecord {
        name: name.into(),
        config_hash: loaded.hash.clone(),
        started,
        finished: now(),
        summary,
        outputs: sink.written.clone(),
    })
}

fn on_cadence(t: f64, t0: f64, cadence: Option<f64>) -> bool {
    cadence.is_some_and(|c| {
        let k = (t - t0) / c;
        (k - k.round()).abs() < 1e-6
    })
}

fn wave(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let p = &loaded.model.wave;
    let rows: Vec<Vec<Cell>> =
        (0..p.grid.n_points).map(|i| vec![p.grid.xi(i).into(), p.phi[i].into(), p.phi_prime[i].into()]).collect();
    sink.write_csv(&sink.main_name("wave.csv"), &["xi", "phi", "phi_prime"], &rows)?;
    let tails = check_tail_estimates(p).map_err(|e| HarnessError::validation("wave", e))?;
    let summary = json!({
        "c": p.c,
        "lambda": p.lambda,
        "mu": p.mu,
        "residual_inf": p.residual_inf,
        "C1": tails.c1,
        "C2": tails.c2,
    });
    sink.write_json(&sink.main_name("wave.json"), &summary)?;
    Ok(summary)
}

fn gap(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let cfg = &loaded.config;
    let model = &loaded.model;
    let refined;
    let profile = match cfg.spectral.h {
        Some(h) if (h - model.wave.h()).abs() > 1e-12 => {
            let grid = WaveGrid::with_spacing(cfg.wave.xi_min, cfg.wave.xi_max, h)
                .map_err(|e| HarnessError::validation("spectral.h", e))?;
            refined = solve_wave(&model.f, grid, &cfg.wave.options()).map_err(|e| numerical("gap", "wave", e))?;
            &refined
        }
        _ => &model.wave,
    };
    let r = spectral_gap(&model.f, profile).map_err(|e| numerical("gap", "spectral", e))?;
    let summary = json!({
        "rho0": r.rho0,
        "rho1": r.rho1,
        "varpi": r.varpi,
        "h": r.h,
        "xi_min": r.xi_min,
        "xi_max": r.xi_max,
    });
    sink.write_json(&sink.main_name("gap.json"), &summary)?;
    Ok(summary)
}

fn numerical(experiment: &str, path: &str, e: impl ToString) -> HarnessError {
    HarnessError::Numerical { experiment: experiment.into(), path: path.into(), message: e.to_string() }
}

/// Stalled by the end of the run: the front moved less than the stall
/// tolerance over the last quarter, or never formed.
fn stalled(traj: &RunTrajectory) -> bool {
    let Some(last) = traj.snapshots.last() else { return false };
    let t_quarter = last.t - 0.25 * (last.t - traj.t_start);
    let late: Vec<f64> = traj.snapshots.iter().filter(|s| s.t >= t_quarter).filter_map(|s| s.front_pos).collect();
    match (late.first(), late.last()) {
        (Some(a), Some(b)) => (b - a).abs() <= STALL_TOLERANCE,
        _ => true,
    }
}

fn run1d(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let model = &loaded.model;
    let mut cfg = loaded.config.sim1d.clone();
    let cadence = loaded.config.outputs.cadence;
    let heterogeneous = !cfg.heterogeneity.is_zero();
    cfg.store_states = cadence.is_some() || heterogeneous;
    let traj = run_cauchy_1d(model, &cfg).map_err(|e| HarnessError::from_sim("run1d", "sim1d", e))?;

    let rows: Vec<Vec<Cell>> = traj
        .snapshots
        .iter()
        .map(|s| vec![s.t.into(), s.chi.into(), s.sup_err.into(), s.w_l2.into(), s.front_pos.into()])
        .collect();
    sink.write_csv(&sink.main_name("traj.csv"), &["t", "chi", "sup_err", "w_l2", "front_pos"], &rows)?;
    let nodes = cfg.grid.nodes();
    for s in traj.snapshots.iter().filter(|s| on_cadence(s.t, cfg.t_start, cadence) && !s.u.is_empty()) {
        let rows: Vec<Vec<Cell>> = nodes.iter().zip(&s.u).map(|(&x, &u)| vec![x.into(), u.into()]).collect();
        sink.write_csv(&format!("u_t{}.csv", time_label(s.t)), &["x", "u"], &rows)?;
    }

    // the decay law is measured against the homogeneous run on the same grid
    let mut fit = None;
    if heterogeneous && matches!(cfg.initial, InitialDatum::Wave { .. }) && cfg.heterogeneity.m > 0.0 {
        let mut reference = cfg.clone();
        reference.heterogeneity = Heterogeneity1D::none();
        reference.track = false;
        let hom = run_cauchy_1d(model, &reference).map_err(|e| HarnessError::from_sim("run1d", "sim1d", e))?;
        let d = &loaded.config.experiments.decay;
        let m = cfg.heterogeneity.m;
        let window = (d.t_from, d.fraction * m / model.c());
        fit = decay_fit(&error_series_against(&traj, &hom), model.c(), m, window, d.min_r_squared).ok();
    }
    let summary = json!({
        "gamma": fit.map(|f| f.gamma),
        "K": fit.map(|f| f.k),
        "r_squared": fit.map(|f| f.r_squared),
        "N0_est": traj.n0_est,
        "blocked": stalled(&traj),
    });
    sink.write_json("run1d.json", &summary)?;
    Ok(summary)
}

/// Log-linear fit of a residual series against `c t - M`.
fn envelope_rate(traj: &RunTrajectory2D, pick: impl Fn(&crate::sim2d::Snapshot2D) -> Option<f64>) -> Option<f64> {
    let (s, v): (Vec<f64>, Vec<f64>) =
        traj.snapshots.iter().filter_map(|snap| pick(snap).map(|r| (traj.c * (snap.t - traj.t_start) - traj.m, r))).unzip();
    fit_envelope(&s, &v, 1e-13).map(|f| f.slope)
}

fn run2d(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let model = &loaded.model;
    let mut cfg = loaded.config.sim2d.clone();
    let cadence = loaded.config.outputs.cadence;
    cfg.store_fields = cadence.is_some();
    let traj = run_cauchy_2d(model, &cfg).map_err(|e| HarnessError::from_sim2d("run2d", "sim2d", e))?;

    let rows: Vec<Vec<Cell>> = traj
        .snapshots
        .iter()
        .map(|s| {
            vec![
                s.t.into(),
                s.mean_front.into(),
                s.chi_min.into(),
                s.chi_max.into(),
                s.sup_err.into(),
                s.r1_sup.into(),
                s.r2_sup.into(),
            ]
        })
        .collect();
    let header = ["t", "mean_front", "chi_min", "chi_max", "sup_err", "R1_sup", "R2_sup"];
    sink.write_csv(&sink.main_name("traj2d.csv"), &header, &rows)?;
    let g = cfg.grid;
    let (nx, nz) = (g.nx(), g.nz);
    for s in traj.snapshots.iter().filter(|s| on_cadence(s.t, cfg.t_start, cadence) && !s.u.is_empty()) {
        let mut rows = Vec::with_capacity(nx * nz);
        for j in 0..nz {
            let z = j as f64 / (nz - 1) as f64;
            for i in 0..nx {
                rows.push(vec![Cell::from(g.x_min + i as f64 * g.hx), z.into(), s.u[j * nx + i].into()]);
            }
        }
        sink.write_csv(&format!("u2d_t{}.csv", time_label(s.t)), &["x", "z", "u"], &rows)?;
    }
    let last = traj.snapshots.last().expect("at least one snapshot");
    let summary = json!({
        "final_t": last.t,
        "final_mean_front": last.mean_front,
        "max_sup_err": traj.snapshots.iter().filter_map(|s| s.sup_err).reduce(f64::max),
        "R1_rate": envelope_rate(&traj, |s| s.r1_sup),
        "R2_rate": envelope_rate(&traj, |s| s.r2_sup),
        "tracking_lost": traj.tracking_lost.as_ref().map(|(t, j, why)| json!({"t": t, "z_index": j, "reason": why})),
        "steps": traj.steps,
    });
    sink.write_json("run2d.json", &summary)?;
    Ok(summary)
}

fn supersol(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let model = &loaded.model;
    let s = &loaded.config.experiments.supersol;
    let domain = build_domain(&loaded.config.sim2d.domain).map_err(|e| HarnessError::validation("sim2d.domain", e))?;
    let (alpha0, a0) = derived_parameters(model, &domain, s.r);
    let ss = build_supersolution(model, &domain, s.alpha.unwrap_or(alpha0), s.a.unwrap_or(a0), s.r, s.epsilon)
        .map_err(|e| HarnessError::validation("experiments.supersol", e))?;
    let r = crate::sim2d::verify_supersolution(model, &ss, s.t, s.grid)
        .map_err(|e| HarnessError::from_sim2d("supersol", "experiments.supersol.grid", e))?;
    let summary = json!({
        "alpha": r.alpha,
        "a": r.a,
        "r": r.r,
        "min_slack_interior": r.min_slack_interior,
        "min_slack_boundary": r.min_slack_boundary,
        "pass": r.pass,
    });
    sink.write_json(&sink.main_name("supersol.json"), &summary)?;
    Ok(summary)
}

fn write_sequence(sink: &mut OutputSink, name: &str, r: &EntireSequenceReport) -> Result<Value, HarnessError> {
    let rows: Vec<Vec<Cell>> = r.n_list.iter().zip(&r.differences).map(|(&n, &d)| vec![n.into(), d.into()]).collect();
    sink.write_csv(&sink.main_name(&format!("{name}.csv")), &["n", "d_n"], &rows)?;
    let summary = serde_json::to_value(r).expect("report serialises");
    sink.write_json(&format!("{name}.json"), &summary)?;
    Ok(summary)
}

fn entire1d(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let e = &loaded.config.experiments.entire;
    let r = entire_solution_sequence(&loaded.model, &loaded.config.sim1d, &e.n_list, e.window)
        .map_err(|err| HarnessError::from_sim("entire1d", "sim1d", err))?;
    write_sequence(sink, "entire1d", &r)
}

fn entire2d(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let e = &loaded.config.experiments.entire;
    let r = entire_solution_sequence_2d(&loaded.model, &loaded.config.sim2d, &e.n_list, e.window)
        .map_err(|err| HarnessError::from_sim2d("entire2d", "sim2d", err))?;
    write_sequence(sink, "entire2d", &r)
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Propagation => "PROPAGATION",
        Outcome::Blocking => "BLOCKING",
        Outcome::Undetermined => "UNDETERMINED",
    }
}

fn write_sweep(sink: &mut OutputSink, name: &str, r: &SweepReport, extra: Value) -> Result<Value, HarnessError> {
    let rows: Vec<Vec<Cell>> = r
        .results
        .iter()
        .map(|c| {
            vec![c.parameter.into(), outcome_label(c.outcome).into(), c.max_front.into(), c.u_station.into(), c.t_final.into()]
        })
        .collect();
    let header = ["parameter", "outcome", "max_front", "u_station", "t_final"];
    sink.write_csv(&sink.main_name(&format!("{name}.csv")), &header, &rows)?;
    let mut summary = json!({
        "monotone": r.monotone,
        "transition": r.transition,
        "outcomes": r.results.iter().map(|c| outcome_label(c.outcome)).collect::<Vec<_>>(),
    });
    if let (Value::Object(s), Value::Object(e)) = (&mut summary, extra) {
        s.extend(e);
    }
    sink.write_json(&format!("{name}.json"), &summary)?;
    Ok(summary)
}

/// The 1D dead-zone sweep of the threshold block.
pub(crate) fn threshold_sweep(loaded: &LoadedConfig) -> Result<SweepReport, HarnessError> {
    let model = &loaded.model;
    let t = &loaded.config.experiments.threshold;
    let mut template = loaded.config.sim1d.clone();
    template.heterogeneity = Heterogeneity1D::none();
    template.t_end = t.t_end;
    template.snapshot_dt = t.snapshot_dt;
    match t.vary {
        ThresholdParameter::Amplitude => threshold_exploration(model, &template, &t.gap, t.width, &t.values),
        ThresholdParameter::Width => width_sweep(model, &template, &t.gap, t.amplitude, &t.values),
    }
    .map_err(|e| HarnessError::from_sim("threshold", "experiments.threshold", e))
}

fn threshold(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let r = threshold_sweep(loaded)?;
    let varpi = spectral_gap(&loaded.model.f, &loaded.model.wave).map_err(|e| numerical("threshold", "spectral", e))?.varpi;
    write_sweep(sink, "threshold", &r, json!({ "minus_varpi": -varpi }))
}

/// The 2D widening sweep of the blocking block.
pub(crate) fn blocking_sweep(loaded: &LoadedConfig) -> Result<SweepReport, HarnessError> {
    let b = &loaded.config.experiments.blocking;
    let mut template = loaded.config.sim2d.clone();
    template.grid = b.grid;
    template.m = b.m;
    template.dt = b.dt;
    template.t_start = 0.0;
    template.t_end = b.t_end;
    template.snapshot_dt = b.snapshot_dt;
    template.domain.b_minus = BoundaryCurve::constant(0.0);
    template.domain.r_ball = b.r_ball;
    blocking_exploration(&loaded.model, &template, &b.family, &b.values)
        .map_err(|e| HarnessError::from_sim2d("blocking", "experiments.blocking", e))
}

fn blocking(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let r = blocking_sweep(loaded)?;
    write_sweep(sink, "blocking", &r, json!({ "vary": loaded.config.experiments.blocking.family.vary }))
}

fn accept(loaded: &LoadedConfig, sink: &mut OutputSink) -> Result<Value, HarnessError> {
    let report = acceptance::run_all(loaded.config.seed);
    let summary = serde_json::to_value(&report).expect("report serialises");
    sink.write_json(&sink.main_name("accept.json"), &summary)?;
    Ok(summary)
}
