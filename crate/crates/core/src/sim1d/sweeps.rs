//! Families of runs: the entire-solution sequence and blocking sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::FrontModel;

use super::{run_cauchy_1d, Heterogeneity1D, InitialDatum, RunTrajectory, Sim1DConfig, SimError};

/// Runs `job` over `items` on a pool capped by `FRONTLAB_THREADS`.
pub fn par_map<T, R, F>(items: &[T], job: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let threads = std::env::var("FRONTLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0);
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(|| items.par_iter().map(&job).collect()),
        None => items.par_iter().map(&job).collect(),
    }
}

/// Space-time window on which consecutive approximations are compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareWindow {
    pub t0: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireSequenceReport {
    pub n_list: Vec<u32>,
    /// `d[k] = |u_{n[k+1]} - u_{n[k]}|_inf` on the window.
    pub differences: Vec<f64>,
    pub strictly_decreasing: bool,
}

/// Runs from `t = -n` with `u(-n, x) = phi(x + c n)` for each `n` and
/// compares consecutive runs on `[-t0, t0] x [x_lo, x_hi]`.
///
/// `template` supplies grid, step and heterogeneity; its start time,
/// initial datum and end time are overwritten.
pub fn entire_solution_sequence(
    model: &FrontModel,
    template: &Sim1DConfig,
    n_list: &[u32],
    window: CompareWindow,
) -> Result<EntireSequenceReport, SimError> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SimError::BadConfig("n_list must be increasing".into()));
    }
    if n_list.iter().any(|&n| (n as f64) < window.t0) {
        return Err(SimError::BadConfig("every n must be at least t0".into()));
    }
    let c = model.c();
    let runs: Vec<Result<RunTrajectory, SimError>> = par_map(n_list, |&n| {
        let mut cfg = template.clone();
        cfg.t_start = -(n as f64);
        cfg.t_end = window.t0;
        cfg.initial = InitialDatum::Wave { position: -c * n as f64 };
        cfg.store_states = true;
        cfg.track = false;
        run_cauchy_1d(model, &cfg)
    });
    let runs: Vec<RunTrajectory> = runs.into_iter().collect::<Result<_, _>>()?;

    let in_window = |run: &RunTrajectory| -> Vec<(f64, Vec<f64>)> {
        let g = run.grid;
        run.snapshots
            .iter()
            .filter(|s| s.t >= -window.t0 - 1e-9)
            .map(|s| {
                let vals = (0..g.n())
                    .filter(|&i| g.x(i) >= window.x_lo && g.x(i) <= window.x_hi)
                    .map(|i| s.u[i])
                    .collect();
                (s.t, vals)
            })
            .collect()
    };
    let sampled: Vec<_> = runs.iter().map(in_window).collect();
    let mut differences = Vec::new();
    for pair in sampled.windows(2) {
        let mut d = 0.0_f64;
        for ((ta, a), (tb, b)) in pair[0].iter().zip(&pair[1]) {
            debug_assert!((ta - tb).abs() < 1e-6);
            for (x, y) in a.iter().zip(b) {
                d = d.max((x - y).abs());
            }
        }
        differences.push(d);
    }
    let strictly_decreasing = differences.windows(2).all(|w| w[1] < w[0]);
    Ok(EntireSequenceReport {
        n_list: n_list.to_vec(),
        differences,
        strictly_decreasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Propagation,
    Blocking,
    Undetermined,
}

/// Largest front displacement over the last quarter of a blocked run.
pub const STALL_TOLERANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classified {
    pub parameter: f64,
    pub outcome: Outcome,
    pub max_front: f64,
    pub u_station: f64,
    pub t_final: f64,
}

/// Propagation once the front passes `x_right + 10`. Blocking if it never
/// does, the front has stalled over the last quarter of the run, and
/// `u(x_right + 5) < theta` at the end.
pub fn classify_run(model: &FrontModel, traj: &RunTrajectory, x_right: f64, parameter: f64) -> Classified {
    let max_front = traj
        .snapshots
        .iter()
        .filter_map(|s| s.front_pos)
        .fold(f64::NEG_INFINITY, f64::max);
    let last = traj.snapshots.last().expect("at least one snapshot");
    let g = traj.grid;
    let station = ((x_right + 5.0 - g.x_min) / g.h).round() as usize;
    let u_station = last.u.get(station.min(g.n() - 1)).copied().unwrap_or(f64::NAN);
    let t_quarter = last.t - 0.25 * (last.t - traj.t_start);
    let late: Vec<f64> = traj
        .snapshots
        .iter()
        .filter(|s| s.t >= t_quarter)
        .filter_map(|s| s.front_pos)
        .collect();
    let drift = late.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        - late.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let stalled = late.is_empty() || drift <= STALL_TOLERANCE;
    let outcome = if max_front > x_right + 10.0 {
        Outcome::Propagation
    } else if stalled && u_station < model.theta() {
        Outcome::Blocking
    } else {
        Outcome::Undetermined
    };
    Classified { parameter, outcome, max_front, u_station, t_final: last.t }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub results: Vec<Classified>,
    /// Single PROPAGATION -> BLOCKING switch along the sweep order.
    pub monotone: bool,
    /// Midpoint between the last propagating and first blocking parameter.
    pub transition: Option<f64>,
}

pub fn summarize_sweep(results: Vec<Classified>) -> SweepReport {
    let switches = results
        .windows(2)
        .filter(|w| w[0].outcome != w[1].outcome)
        .count();
    let first = results.first().map(|r| r.outcome);
    let last = results.last().map(|r| r.outcome);
    let monotone = results.iter().all(|r| r.outcome != Outcome::Undetermined)
        && switches <= 1
        && (switches == 0 || (first == Some(Outcome::Propagation) && last == Some(Outcome::Blocking)));
    let transition = results
        .windows(2)
        .find(|w| w[0].outcome == Outcome::Propagation && w[1].outcome == Outcome::Blocking)
        .map(|w| 0.5 * (w[0].parameter + w[1].parameter));
    SweepReport { results, monotone, transition }
}

/// Geometry of a 1D dead-zone experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapSetup {
    pub x_left: f64,
    pub smoothing: f64,
    /// Extra room beyond the gap.
    pub margin: f64,
}

impl Default for GapSetup {
    fn default() -> Self {
        Self { x_left: 10.0, smoothing: 0.5, margin: 30.0 }
    }
}

fn gap_run(
    model: &FrontModel,
    template: &Sim1DConfig,
    setup: &GapSetup,
    amplitude: f64,
    width: f64,
    parameter: f64,
) -> Result<Classified, SimError> {
    let x_right = setup.x_left + width;
    let mut cfg = template.clone();
    cfg.grid.x_max = x_right + setup.margin;
    cfg.heterogeneity = Heterogeneity1D::gap(amplitude, setup.x_left, x_right, setup.smoothing);
    cfg.stop_front_beyond = Some(x_right + 10.0);
    cfg.track = false;
    cfg.store_states = true;
    // the buffer check assumes free propagation; here the front may stop
    let x_max_needed = match cfg.initial {
        InitialDatum::Wave { position } => position + model.c() * (cfg.t_end - cfg.t_start) + 10.0,
        _ => cfg.grid.x_max,
    };
    if x_max_needed > cfg.grid.x_max {
        cfg.grid.x_max = x_max_needed.ceil();
    }
    let s = ((cfg.grid.x_max - cfg.grid.x_min) / cfg.grid.h).ceil();
    cfg.grid.x_max = cfg.grid.x_min + s * cfg.grid.h;
    let traj = run_cauchy_1d(model, &cfg)?;
    Ok(classify_run(model, &traj, x_right, parameter))
}

/// Plateau depth sweep: `g = A` on a long region.
pub fn threshold_exploration(
    model: &FrontModel,
    template: &Sim1DConfig,
    setup: &GapSetup,
    width: f64,
    amplitudes: &[f64],
) -> Result<SweepReport, SimError> {
    let results = par_map(amplitudes, |&a| gap_run(model, template, setup, a, width, a));
    Ok(summarize_sweep(results.into_iter().collect::<Result<_, _>>()?))
}

/// Dead-zone width sweep at fixed depth.
pub fn width_sweep(
    model: &FrontModel,
    template: &Sim1DConfig,
    setup: &GapSetup,
    amplitude: f64,
    widths: &[f64],
) -> Result<SweepReport, SimError> {
    let results = par_map(widths, |&w| gap_run(model, template, setup, amplitude, w, w));
    Ok(summarize_sweep(results.into_iter().collect::<Result<_, _>>()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classified(p: f64, o: Outcome) -> Classified {
        Classified { parameter: p, outcome: o, max_front: 0.0, u_station: 0.0, t_final: 0.0 }
    }

    #[test]
    fn sweep_summary() {
        use Outcome::*;
        let r = summarize_sweep(vec![
            classified(1.0, Propagation),
            classified(2.0, Propagation),
            classified(5.0, Blocking),
        ]);
        assert!(r.monotone);
        assert_eq!(r.transition, Some(3.5));
        let r = summarize_sweep(vec![classified(1.0, Blocking), classified(2.0, Propagation)]);
        assert!(!r.monotone);
        let r = summarize_sweep(vec![classified(1.0, Propagation), classified(2.0, Undetermined)]);
        assert!(!r.monotone);
    }

    #[test]
    fn single_run_sequence_has_no_differences() {
        let m = FrontModel::cubic(0.25).unwrap();
        let cfg = Sim1DConfig {
            grid: super::super::Grid1D::new(-40.0, 40.0, 0.1),
            ..Default::default()
        };
        let w = CompareWindow { t0: 2.0, x_lo: -10.0, x_hi: 10.0 };
        let rep = entire_solution_sequence(&m, &cfg, &[5], w).unwrap();
        assert!(rep.differences.is_empty());
        assert!(entire_solution_sequence(&m, &cfg, &[5, 3], w).is_err());
    }
}
