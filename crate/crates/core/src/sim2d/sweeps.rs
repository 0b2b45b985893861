//! Families of 2D runs: the entire-solution sequence and the widening sweep.

use serde::{Deserialize, Serialize};

use crate::model::FrontModel;
use crate::sim1d::{par_map, summarize_sweep, Classified, CompareWindow, EntireSequenceReport, Outcome, STALL_TOLERANCE};

use super::domain::{build_domain, BoundaryCurve};
use super::stepper::{run_cauchy_2d, Initial2D, RunTrajectory2D, Sim2DConfig};
use super::Sim2DError;

/// Runs from `t = -n` with `u(-n) = phi(x + c n)` for each `n` and compares
/// consecutive runs over all nodes with `x` in the window for
/// `t in [-t0, t0]`. `template` supplies domain, grid and step.
pub fn entire_solution_sequence_2d(
    model: &FrontModel,
    template: &Sim2DConfig,
    n_list: &[u32],
    window: CompareWindow,
) -> Result<EntireSequenceReport, Sim2DError> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Sim2DError::BadConfig("n_list must be increasing".into()));
    }
    if n_list.iter().any(|&n| (n as f64) < window.t0) {
        return Err(Sim2DError::BadConfig("every n must be at least t0".into()));
    }
    let c = model.c();
    let runs = par_map(n_list, |&n| {
        let mut cfg = template.clone();
        cfg.t_start = -(n as f64);
        cfg.t_end = window.t0;
        cfg.m = c * n as f64;
        cfg.initial = Initial2D::Wave;
        cfg.store_fields = true;
        cfg.track = false;
        cfg.residuals = false;
        // keep 10 units behind the start
        let needed = -cfg.m - 10.0;
        if cfg.grid.x_min > needed {
            let cells = ((cfg.grid.x_min - needed) / cfg.grid.hx).ceil();
            cfg.grid.x_min -= cells * cfg.grid.hx;
        }
        run_cauchy_2d(model, &cfg)
    });
    let runs: Vec<RunTrajectory2D> = runs.into_iter().collect::<Result<_, _>>()?;

    let in_window = |run: &RunTrajectory2D| -> Vec<Vec<f64>> {
        let nx = run.nx();
        let g = run.grid;
        run.snapshots
            .iter()
            .filter(|s| s.t >= -window.t0 - 1e-9)
            .map(|s| {
                let mut vals = Vec::new();
                for j in 0..g.nz {
                    for i in 0..nx {
                        let x = g.x_min + i as f64 * g.hx;
                        if x >= window.x_lo - 1e-9 && x <= window.x_hi + 1e-9 {
                            vals.push(s.u[j * nx + i]);
                        }
                    }
                }
                vals
            })
            .collect()
    };
    let sampled: Vec<_> = runs.iter().map(in_window).collect();
    let differences: Vec<f64> = sampled
        .windows(2)
        .map(|p| {
            p[0].iter()
                .zip(&p[1])
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max)
        })
        .collect();
    let strictly_decreasing = differences.windows(2).all(|w| w[1] < w[0]);
    Ok(EntireSequenceReport { n_list: n_list.to_vec(), differences, strictly_decreasing })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WideningParameter {
    /// Final width over initial width.
    Ratio,
    /// Logistic rate of the widening; larger is more abrupt.
    Rate,
}

/// Upper wall `1 + (ratio - 1) logistic(rate (x - center))` over the
/// lower wall `y = 0`; one of `ratio`, `rate` is swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WideningFamily {
    pub vary: WideningParameter,
    pub ratio: f64,
    pub rate: f64,
    pub center: f64,
}

impl Default for WideningFamily {
    fn default() -> Self {
        Self { vary: WideningParameter::Ratio, ratio: 10.0, rate: 2.0, center: 0.0 }
    }
}

impl WideningFamily {
    pub fn upper_wall(&self, value: f64) -> BoundaryCurve {
        let (ratio, rate) = match self.vary {
            WideningParameter::Ratio => (value, self.rate),
            WideningParameter::Rate => (self.ratio, value),
        };
        BoundaryCurve::sigmoid(1.0, ratio - 1.0, rate, self.center)
    }

    /// End of the widening: where the wall has done 99% of its rise.
    pub fn x_right(&self, value: f64) -> f64 {
        let rate = match self.vary {
            WideningParameter::Ratio => self.rate,
            WideningParameter::Rate => value,
        };
        self.center + 99f64.ln() / rate
    }
}

/// Propagation once the mean front passes `x_right + 10`; blocking if it
/// stalls short of that with the section-averaged state at `x_right + 5`
/// below `theta`.
pub fn classify_run_2d(model: &FrontModel, traj: &RunTrajectory2D, x_right: f64, parameter: f64) -> Classified {
    let fronts: Vec<(f64, f64)> = traj.snapshots.iter().filter_map(|s| s.mean_front.map(|p| (s.t, p))).collect();
    let max_front = fronts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let last = traj.snapshots.last().expect("at least one snapshot");
    let g = traj.grid;
    let nx = g.nx();
    let station = (((x_right + 5.0 - g.x_min) / g.hx).round() as usize).min(nx - 1);
    let u_station = if last.u.is_empty() {
        f64::NAN
    } else {
        (0..g.nz).map(|j| last.u[j * nx + station]).sum::<f64>() / g.nz as f64
    };
    let t_quarter = last.t - 0.25 * (last.t - traj.t_start);
    let late: Vec<f64> = fronts.iter().filter(|p| p.0 >= t_quarter).map(|p| p.1).collect();
    let drift = late.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - late.iter().fold(f64::INFINITY, |m, &v| m.min(v));
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

/// Runs the template on each member of the family and classifies it.
pub fn blocking_exploration(
    model: &FrontModel,
    template: &Sim2DConfig,
    family: &WideningFamily,
    values: &[f64],
) -> Result<crate::sim1d::SweepReport, Sim2DError> {
    let results = par_map(values, |&v| {
        let mut cfg = template.clone();
        cfg.domain.b_plus = family.upper_wall(v);
        cfg.domain.b_minus = BoundaryCurve::constant(0.0);
        let x_right = family.x_right(v);
        cfg.stop_front_beyond = Some(x_right + 10.0);
        cfg.store_fields = true;
        cfg.track = false;
        cfg.residuals = false;
        // room for free travel, as the validation expects even if the front stops
        if cfg.initial == Initial2D::Wave {
            let needed = -cfg.m + model.c() * (cfg.t_end - cfg.t_start) + 10.0;
            if needed > cfg.grid.x_max {
                let cells = ((needed - cfg.grid.x_max) / cfg.grid.hx).ceil();
                cfg.grid.x_max += cells * cfg.grid.hx;
            }
        }
        // abrupt members need a shorter step than the template's
        if let Ok(domain) = build_domain(&cfg.domain) {
            let limit = cfg.dt_limit(model, &domain);
            if cfg.dt > limit {
                let span = cfg.t_end - cfg.t_start;
                cfg.dt = span / (span / limit).ceil();
            }
        }
        run_cauchy_2d(model, &cfg).map(|t| classify_run_2d(model, &t, x_right, v))
    });
    Ok(summarize_sweep(results.into_iter().collect::<Result<_, _>>()?))
}
