//! Douglas splitting for the mapped problem: the mixed derivative and the
//! reaction are explicit, `u_xx` is implicit along sections and
//! `(z_x^2 + 1/w^2) u_zz + z_xx u_z` implicit across them, with the oblique
//! Neumann closure as the first and last row of each cross-section solve.

use serde::{Deserialize, Serialize};

use crate::model::FrontModel;
use crate::numerics::{level_crossing, sup_norm, TridiagonalLu};
use crate::sim1d::{
    resample_moving_frame, track_front, GridState, Grid1D, Observer, RightBoundary, SimError, Snapshot,
    XOperator, DEFAULT_EPS1,
};

use super::domain::{build_domain, DomainParams, DomainSpec2D};
use super::operator::{assemble_mapped_operator, GridSpec2D, MappedGrid, MappedOperator};
use super::residuals::residual_diagnostics;
use super::Sim2DError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial2D {
    /// `u(t_start, x, y) = phi(x + M)`.
    #[default]
    Wave,
    Constant { value: f64 },
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sim2DConfig {
    pub domain: DomainParams,
    pub grid: GridSpec2D,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub initial: Initial2D,
    pub right_boundary: RightBoundary,
    pub snapshot_dt: f64,
    pub store_fields: bool,
    pub track: bool,
    pub residuals: bool,
    pub eps1: f64,
    /// Stop once the mean level-1/2 crossing passes this station.
    pub stop_front_beyond: Option<f64>,
}

impl Default for Sim2DConfig {
    fn default() -> Self {
        Self {
            domain: DomainParams::default(),
            grid: GridSpec2D::default(),
            dt: 0.05,
            t_start: 0.0,
            t_end: 50.0,
            m: 40.0,
            initial: Initial2D::Wave,
            right_boundary: RightBoundary::Robin,
            snapshot_dt: 1.0,
            store_fields: false,
            track: true,
            residuals: true,
            eps1: DEFAULT_EPS1,
            stop_front_beyond: None,
        }
    }
}

impl Sim2DConfig {
    /// Reaction-limited as in 1D, and kept below `1 / max |z_xx|`: the
    /// explicit mixed term loses stability where the walls bend sharply.
    pub fn dt_limit(&self, model: &FrontModel, domain: &DomainSpec2D) -> f64 {
        (0.5 / model.sup_f_prime).min(self.grid.hx).min(1.0 / max_map_curvature(domain, &self.grid))
    }

    pub fn validate(&self, model: &FrontModel) -> Result<DomainSpec2D, Sim2DError> {
        let domain = build_domain(&self.domain)?;
        self.grid.validate()?;
        let bad = |m: String| Err(Sim2DError::BadConfig(m));
        if !(self.dt > 0.0) || !(self.t_end > self.t_start) {
            return bad(format!("need dt > 0 and t_end > t_start, got dt = {}", self.dt));
        }
        if !(self.snapshot_dt >= self.dt) || !(self.eps1 > 0.0) {
            return bad("need snapshot_dt >= dt and eps1 > 0".into());
        }
        if self.initial == Initial2D::Wave {
            let start = -self.m;
            let end = start + model.c() * (self.t_end - self.t_start);
            if start - self.grid.x_min < 10.0 || self.grid.x_max - end < 10.0 {
                return bad(format!(
                    "front travels over [{start:.2}, {end:.2}], needs 10 units of room inside [{}, {}]",
                    self.grid.x_min, self.grid.x_max
                ));
            }
        }
        let limit = self.dt_limit(model, &domain);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(SimError::CflViolation { dt: self.dt, limit }.into());
        }
        Ok(domain)
    }

    pub fn steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt).round() as usize
    }

    pub fn snapshot_every(&self) -> usize {
        ((self.snapshot_dt / self.dt).round() as usize).max(1)
    }

    /// Matching 1D configuration for the dimensional-reduction check.
    pub fn section_config(&self) -> crate::sim1d::Sim1DConfig {
        crate::sim1d::Sim1DConfig {
            grid: Grid1D::new(self.grid.x_min, self.grid.x_max, self.grid.hx),
            dt: self.dt,
            t_start: self.t_start,
            t_end: self.t_end,
            right_boundary: self.right_boundary,
            initial: match self.initial {
                Initial2D::Wave => crate::sim1d::InitialDatum::Wave { position: -self.m },
                Initial2D::Constant { value } => crate::sim1d::InitialDatum::Constant { value },
            },
            snapshot_dt: self.snapshot_dt,
            store_states: true,
            track: self.track,
            eps1: self.eps1,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot2D {
    pub t: f64,
    #[serde(skip)]
    pub u: Vec<f64>,
    /// Mean over sections of the level-1/2 crossing.
    pub mean_front: Option<f64>,
    pub chi_min: Option<f64>,
    pub chi_max: Option<f64>,
    pub sup_err: Option<f64>,
    pub r1_sup: Option<f64>,
    pub r2_sup: Option<f64>,
    /// One 1D observation per section `z = const`.
    #[serde(skip)]
    pub sections: Vec<Snapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrajectory2D {
    pub grid: GridSpec2D,
    pub c: f64,
    pub t_start: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub wave_start: bool,
    pub snapshots: Vec<Snapshot2D>,
    /// `(t, section, reason)` of the first tracking failure.
    pub tracking_lost: Option<(f64, usize, String)>,
    pub steps: usize,
    pub stopped_early: bool,
}

impl RunTrajectory2D {
    pub fn nx(&self) -> usize {
        self.grid.nx()
    }

    /// `phi(x - origin(t))` is the reference wave.
    pub fn wave_origin(&self, t: f64) -> Option<f64> {
        self.wave_start.then(|| -self.m + self.c * (t - self.t_start))
    }

    pub fn section_grid(&self) -> Grid1D {
        Grid1D::new(self.grid.x_min, self.grid.x_max, self.grid.hx)
    }
}

/// Per-section phase `chi(z)`, range parts and the mean front.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracked2D {
    pub chi: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub mean_front: Option<f64>,
}

/// Applies the 1D tracker to every section of `u` in the frame `origin`.
pub fn track_front_2d(
    model: &FrontModel,
    grid: &GridSpec2D,
    u: &[f64],
    origin: f64,
    chi_prev: f64,
    eps1: f64,
) -> Result<Tracked2D, Sim2DError> {
    let nx = grid.nx();
    let nz = u.len() / nx;
    let mut out = Tracked2D { chi: Vec::with_capacity(nz), v: Vec::with_capacity(nz), mean_front: None };
    let mut fronts = Vec::with_capacity(nz);
    for j in 0..nz {
        let row = &u[j * nx..(j + 1) * nx];
        let state = GridState { x_min: grid.x_min, h: grid.hx, u: row };
        let tilde = resample_moving_frame(model, state, origin);
        let r = track_front(model, &tilde, chi_prev, eps1).map_err(|e| Sim2DError::TrackingLost {
            z_index: j,
            t: f64::NAN,
            reason: e.to_string(),
        })?;
        out.chi.push(r.chi);
        out.v.push(r.v);
        fronts.push(level_crossing(grid.x_min, grid.hx, row, 0.5));
    }
    out.mean_front = mean_front(&fronts);
    Ok(out)
}

fn mean_front(fronts: &[Option<f64>]) -> Option<f64> {
    let all: Option<Vec<f64>> = fronts.iter().copied().collect();
    all.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

/// `max |z_xx|` over the grid columns; `z_xx` is affine in `z`, so the
/// walls carry the extremes.
pub fn max_map_curvature(domain: &DomainSpec2D, grid: &GridSpec2D) -> f64 {
    (0..grid.nx())
        .map(|i| {
            let s = domain.section(grid.x_min + i as f64 * grid.hx);
            s.z_xx(0.0).abs().max(s.z_xx(1.0).abs())
        })
        .fold(0.0, f64::max)
}

/// Cross-section solve for one column, with the Neumann rows folded into
/// a tridiagonal system. The closure is `u_z = beta u_x` with `u_z` one-sided
/// of second order and `u_x` upwinded so the boundary value is a convex
/// combination of interior data and its lagged neighbour along the wall.
struct ColumnSolver {
    lu: TridiagonalLu,
    /// Multiples of the neighbouring interior rows removed from the two
    /// closure rows.
    q_bottom: f64,
    q_top: f64,
    /// `|beta| / hx` and the column of the upwind neighbour on each wall.
    w_bottom: f64,
    w_top: f64,
    up_bottom: usize,
    up_top: usize,
}

fn column_solvers(grid: &MappedGrid, op: &MappedOperator, a: f64) -> Vec<Option<ColumnSolver>> {
    let (nx, nz, hz) = (grid.nx, grid.nz, grid.hz);
    let mut out = Vec::with_capacity(nx);
    out.push(None);
    for i in 1..nx {
        let mut lower = vec![0.0; nz];
        let mut diag = vec![0.0; nz];
        let mut upper = vec![0.0; nz];
        for j in 1..nz - 1 {
            let k = grid.idx(i, j);
            let (d2, d1) = (op.czz[k] / (hz * hz), op.cz[k] / (2.0 * hz));
            lower[j] = -a * (d2 - d1);
            diag[j] = 1.0 + 2.0 * a * d2;
            upper[j] = -a * (d2 + d1);
        }
        let s = 1.0 / (2.0 * hz);
        let (bm, bp) = (grid.beta_minus[i], grid.beta_plus[i]);
        let (w_bottom, w_top) = (bm.abs() / grid.hx, bp.abs() / grid.hx);
        // the interior lies above the bottom wall and below the top one,
        // so the upwind sides are opposite
        let up_bottom = if bm > 0.0 { i - 1 } else { i + 1 };
        let up_top = if bp > 0.0 { i + 1 } else { i - 1 };
        // bottom: (-3 u0 + 4 u1 - u2) s - w (u0 - u_up) = 0, u2 eliminated with row 1
        let q_bottom = -s / upper[1];
        diag[0] = -3.0 * s - w_bottom - q_bottom * lower[1];
        upper[0] = 4.0 * s - q_bottom * diag[1];
        // top: (3 u_N - 4 u_{N-1} + u_{N-2}) s + w (u_N - u_up) = 0
        let t = nz - 1;
        let q_top = s / lower[t - 1];
        lower[t] = -4.0 * s - q_top * diag[t - 1];
        diag[t] = 3.0 * s + w_top - q_top * upper[t - 1];
        out.push(Some(ColumnSolver {
            lu: TridiagonalLu::new(&lower, &diag, &upper),
            q_bottom,
            q_top,
            w_bottom,
            w_top,
            up_bottom,
            up_top,
        }));
    }
    out
}

struct Stepper<'a> {
    grid: &'a MappedGrid,
    op: MappedOperator,
    xop: XOperator,
    x_lu: TridiagonalLu,
    columns: Vec<Option<ColumnSolver>>,
    beta_x: f64,
    dt: f64,
}

impl Stepper<'_> {
    /// Lagged wall value at column `up`; past the right end the far-field
    /// relation `u_x = beta_x u` stands in for the missing node.
    fn wall_neighbour(&self, u: &[f64], up: usize, i: usize, j: usize) -> f64 {
        let g = self.grid;
        if up < g.nx {
            u[g.idx(up, j)]
        } else {
            u[g.idx(i, j)] * (1.0 + g.hx * self.beta_x)
        }
    }

    /// `(A_z u, mixed term)` at an interior-row node.
    fn explicit_parts(&self, u: &[f64], i: usize, j: usize) -> (f64, f64) {
        let g = self.grid;
        let k = g.idx(i, j);
        let (up, mid, down) = (u[g.idx(i, j + 1)], u[k], u[g.idx(i, j - 1)]);
        let u_z = (up - down) / (2.0 * g.hz);
        let az = self.op.czz[k] * ((up - 2.0 * mid + down) / (g.hz * g.hz)) + self.op.cz[k] * u_z;
        let u_xz = if i + 1 < g.nx {
            let (a, b, c, d) = (
                u[g.idx(i + 1, j + 1)],
                u[g.idx(i + 1, j - 1)],
                u[g.idx(i - 1, j + 1)],
                u[g.idx(i - 1, j - 1)],
            );
            (a - b - c + d) / (4.0 * g.hx * g.hz)
        } else {
            self.beta_x * u_z
        };
        (az, self.op.cxz[k] * u_xz)
    }

    fn step(&self, u: &mut [f64], react: &[f64], left: &[f64]) {
        let g = self.grid;
        let (nx, nz) = (g.nx, g.nz);
        let a = 0.5 * self.dt;
        let dt = self.dt;
        let mut az_old = vec![0.0; g.len()];
        let mut next = u.to_vec();
        let mut du = vec![0.0; nx];
        for j in 1..nz - 1 {
            self.xop.apply_strided(u, j * nx, 1, &mut du);
            let row = j * nx;
            next[row] = left[j];
            for i in 1..nx {
                let k = row + i;
                let (az, mixed) = self.explicit_parts(u, i, j);
                az_old[k] = az;
                next[k] = u[k] + a * du[i] + dt * az + dt * mixed + dt * react[k];
            }
            self.x_lu.solve_in_place(&mut next[row..row + nx]);
        }
        let top = nz - 1;
        for i in 1..nx {
            let col = self.columns[i].as_ref().expect("interior column");
            for j in 1..top {
                let k = g.idx(i, j);
                next[k] -= a * az_old[k];
            }
            let g_bottom = -col.w_bottom * self.wall_neighbour(u, col.up_bottom, i, 0);
            let g_top = col.w_top * self.wall_neighbour(u, col.up_top, i, top);
            next[g.idx(i, 0)] = g_bottom - col.q_bottom * next[g.idx(i, 1)];
            next[g.idx(i, top)] = g_top - col.q_top * next[g.idx(i, top - 1)];
            col.lu.solve_strided(&mut next, i, nx);
        }
        for j in [0, top] {
            next[g.idx(0, j)] = left[j];
        }
        u.copy_from_slice(&next);
    }
}

pub fn initial_field(model: &FrontModel, grid: &MappedGrid, config: &Sim2DConfig) -> Vec<f64> {
    match config.initial {
        Initial2D::Wave => grid.sample(|x, _| model.wave.phi_at(x + config.m)),
        Initial2D::Constant { value } => vec![value; grid.len()],
    }
}

/// Integrates the Neumann problem on the mapped strip from
/// `u(t_start) = phi(x + M)`.
pub fn run_cauchy_2d(model: &FrontModel, config: &Sim2DConfig) -> Result<RunTrajectory2D, Sim2DError> {
    let domain = config.validate(model)?;
    let grid = MappedGrid::new(&domain, config.grid)?;
    let (nx, nz) = (grid.nx, grid.nz);
    let dt = config.dt;
    let xop = XOperator::new(nx, grid.hx, config.right_boundary, model.wave.lambda);
    let op = assemble_mapped_operator(&grid);
    let stepper = Stepper {
        grid: &grid,
        columns: column_solvers(&grid, &op, 0.5 * dt),
        op,
        x_lu: xop.implicit(0.5 * dt, None),
        beta_x: xop.beta,
        xop,
        dt,
    };

    let mut u = initial_field(model, &grid, config);
    let left: Vec<f64> = (0..nz).map(|j| u[grid.idx(0, j)]).collect();
    let mut traj = RunTrajectory2D {
        grid: config.grid,
        c: model.c(),
        t_start: config.t_start,
        m: config.m,
        wave_start: config.initial == Initial2D::Wave,
        snapshots: Vec::new(),
        tracking_lost: None,
        steps: 0,
        stopped_early: false,
    };
    let section_grid = traj.section_grid();
    let mut observers: Vec<Observer> = (0..nz)
        .map(|_| Observer {
            model,
            grid: section_grid,
            track: config.track,
            eps1: config.eps1,
            chi_prev: 0.0,
            lost: None,
        })
        .collect();

    let record = |traj: &mut RunTrajectory2D, observers: &mut [Observer], t: f64, u: &[f64]| -> bool {
        let origin = traj.wave_origin(t);
        let sections: Vec<Snapshot> = observers
            .iter_mut()
            .enumerate()
            .map(|(j, obs)| obs.observe(t, &u[j * nx..(j + 1) * nx], origin, false))
            .collect();
        if traj.tracking_lost.is_none() {
            if let Some((j, (tl, why))) = observers.iter().enumerate().find_map(|(j, o)| o.lost.clone().map(|l| (j, l))) {
                traj.tracking_lost = Some((tl, j, why));
            }
        }
        let chis: Option<Vec<f64>> = sections.iter().map(|s| s.chi).collect();
        let fronts: Vec<Option<f64>> = sections.iter().map(|s| s.front_pos).collect();
        let sup_err = sections.iter().map(|s| s.sup_err).collect::<Option<Vec<f64>>>();
        let norms = config.residuals.then(|| residual_diagnostics(&grid, &domain, u));
        let snap = Snapshot2D {
            t,
            u: if config.store_fields { u.to_vec() } else { Vec::new() },
            mean_front: mean_front(&fronts),
            chi_min: chis.as_ref().map(|c| c.iter().copied().fold(f64::INFINITY, f64::min)),
            chi_max: chis.as_ref().map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            sup_err: sup_err.map(|e| e.into_iter().fold(0.0, f64::max)),
            r1_sup: norms.map(|n| n.r1_sup),
            r2_sup: norms.map(|n| n.r2_sup),
            sections,
        };
        let stop = match (config.stop_front_beyond, snap.mean_front) {
            (Some(limit), Some(p)) => p > limit,
            _ => false,
        };
        traj.snapshots.push(snap);
        stop
    };
    record(&mut traj, &mut observers, config.t_start, &u);

    let mut react = vec![0.0; grid.len()];
    let mut react_prev = vec![0.0; grid.len()];
    let mut react_ab = vec![0.0; grid.len()];
    let every = config.snapshot_every();
    let steps = config.steps();
    for k in 1..=steps {
        let t = config.t_start + k as f64 * dt;
        for (r, &v) in react.iter_mut().zip(u.iter()) {
            *r = model.f.f(v);
        }
        for idx in 0..grid.len() {
            react_ab[idx] = if k == 1 { react[idx] } else { 1.5 * react[idx] - 0.5 * react_prev[idx] };
        }
        stepper.step(&mut u, &react_ab, &left);
        std::mem::swap(&mut react, &mut react_prev);
        let norm = sup_norm(&u);
        if !(norm <= 2.0) {
            return Err(SimError::BlowUp { t, norm }.into());
        }
        traj.steps = k;
        if (k % every == 0 || k == steps) && record(&mut traj, &mut observers, t, &u) {
            traj.stopped_early = k < steps;
            break;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::super::domain::BoundaryCurve;
    use super::*;
    use crate::sim1d::run_cauchy_1d;

    fn model() -> FrontModel {
        FrontModel::cubic(0.25).unwrap()
    }

    fn strip_config() -> Sim2DConfig {
        Sim2DConfig {
            grid: GridSpec2D { x_min: -40.0, x_max: 30.0, hx: 0.1, nz: 6 },
            t_end: 20.0,
            m: 20.0,
            dt: 0.05,
            store_fields: true,
            ..Default::default()
        }
    }

    #[test]
    fn ones_stay_ones() {
        let m = model();
        let mut cfg = strip_config();
        cfg.domain.b_plus = BoundaryCurve::sigmoid(1.0, 0.5, 0.25, 0.0);
        cfg.initial = Initial2D::Constant { value: 1.0 };
        cfg.right_boundary = RightBoundary::Neumann;
        cfg.track = false;
        let t = run_cauchy_2d(&m, &cfg).unwrap();
        let u = &t.snapshots.last().unwrap().u;
        assert!(u.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn strip_reduces_to_line() {
        let m = model();
        let cfg = strip_config();
        let two = run_cauchy_2d(&m, &cfg).unwrap();
        let one = run_cauchy_1d(&m, &cfg.section_config()).unwrap();
        assert_eq!(two.snapshots.len(), one.snapshots.len());
        let nx = cfg.grid.nx();
        let mut worst = 0.0_f64;
        for (a, b) in two.snapshots.iter().zip(&one.snapshots) {
            for j in 0..cfg.grid.nz {
                for i in 0..nx {
                    worst = worst.max((a.u[j * nx + i] - b.u[i]).abs());
                }
                let s = &a.sections[j];
                worst = worst.max((s.chi.unwrap() - b.chi.unwrap()).abs());
                worst = worst.max((s.sup_err.unwrap() - b.sup_err.unwrap()).abs());
                worst = worst.max((s.front_pos.unwrap() - b.front_pos.unwrap()).abs());
                worst = worst.max((s.w_l2.unwrap() - b.w_l2.unwrap()).abs());
            }
        }
        assert!(worst <= 1e-6, "{worst}");
        assert!(two.snapshots.iter().all(|s| s.r1_sup == Some(0.0)));
    }

    #[test]
    fn converging_domain_front_stays_in_bounds() {
        let m = model();
        let mut cfg = strip_config();
        cfg.domain.b_plus = BoundaryCurve::sigmoid(1.0, 0.5, 0.25, 0.0);
        cfg.t_end = 100.0;
        cfg.grid.x_max = 40.0;
        let t = run_cauchy_2d(&m, &cfg).unwrap();
        for s in &t.snapshots {
            assert!(s.u.iter().all(|&v| (-1e-8..=1.0 + 1e-8).contains(&v)));
        }
        let first = t.snapshots.first().unwrap().mean_front.unwrap();
        let last = t.snapshots.last().unwrap().mean_front.unwrap();
        assert!(last - first > 0.9 * m.c() * 100.0, "{first} {last}");
    }

    #[test]
    fn abrupt_widening_stays_bounded() {
        // a 10x widening over a length of about 1/8
        let m = model();
        let mut cfg = strip_config();
        cfg.domain.b_plus = BoundaryCurve::sigmoid(1.0, 9.0, 8.0, 0.0);
        cfg.domain.r_ball = 0.001;
        cfg.grid = GridSpec2D { x_min: -40.0, x_max: 30.0, hx: 0.05, nz: 21 };
        cfg.dt = 0.04;
        cfg.t_end = 60.0;
        cfg.track = false;
        let t = run_cauchy_2d(&m, &cfg).unwrap();
        for s in &t.snapshots {
            assert!(s.u.iter().all(|&v| (-1e-6..=1.0 + 1e-6).contains(&v)));
        }
    }

    #[test]
    fn step_limit_follows_wall_bending() {
        let m = model();
        let mut cfg = strip_config();
        let flat = cfg.dt_limit(&m, &build_domain(&cfg.domain).unwrap());
        assert_eq!(flat, cfg.grid.hx);
        cfg.domain.b_plus = BoundaryCurve::sigmoid(1.0, 9.0, 20.0, 0.0);
        cfg.domain.r_ball = 0.0005;
        let d = build_domain(&cfg.domain).unwrap();
        let bent = cfg.dt_limit(&m, &d);
        assert!(bent < 0.01, "{bent}");
        cfg.dt = 0.05;
        assert!(matches!(cfg.validate(&m), Err(Sim2DError::Sim(SimError::CflViolation { .. }))));
    }

    #[test]
    fn translate_field_tracks_to_constant_phase() {
        let m = model();
        let spec = GridSpec2D { x_min: -40.0, x_max: 40.0, hx: 0.05, nz: 5 };
        let nx = spec.nx();
        let mut u = vec![0.0; nx * spec.nz];
        for j in 0..spec.nz {
            for i in 0..nx {
                let x = spec.x_min + i as f64 * spec.hx;
                u[j * nx + i] = m.wave.phi_at(x - 3.0 + 0.2);
            }
        }
        let r = track_front_2d(&m, &spec, &u, 3.0, 0.0, DEFAULT_EPS1).unwrap();
        for chi in &r.chi {
            assert!((chi - r.chi[0]).abs() <= 1e-10);
            assert!((chi - 0.2).abs() <= 1e-4);
        }
    }

    #[test]
    fn modulated_phase_is_recovered() {
        let m = model();
        let spec = GridSpec2D { x_min: -40.0, x_max: 40.0, hx: 0.05, nz: 9 };
        let nx = spec.nx();
        let phase = |j: usize| 0.3 * (std::f64::consts::PI * j as f64 / 8.0).sin();
        let mut u = vec![0.0; nx * spec.nz];
        for j in 0..spec.nz {
            for i in 0..nx {
                let x = spec.x_min + i as f64 * spec.hx;
                u[j * nx + i] = m.wave.phi_at(x + phase(j));
            }
        }
        let r = track_front_2d(&m, &spec, &u, 0.0, 0.0, DEFAULT_EPS1).unwrap();
        for (j, chi) in r.chi.iter().enumerate() {
            assert!((chi - phase(j)).abs() <= 1e-4, "{j}: {chi} vs {}", phase(j));
        }
    }
}
