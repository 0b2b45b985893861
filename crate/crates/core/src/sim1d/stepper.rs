//! Crank-Nicolson diffusion with either explicit (Adams-Bashforth) or
//! implicit (trapezoidal, Newton) reaction.

use serde::{Deserialize, Serialize};

use crate::model::FrontModel;
use crate::numerics::{level_crossing, sup_norm, TridiagonalLu};

use super::tracking::{resample_moving_frame, track_front, w_energy, GridState, DEFAULT_EPS1};
use super::{Grid1D, Heterogeneity1D, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// CN diffusion, AB2 reaction (forward Euler on the first step).
    #[default]
    ImexCn,
    /// Trapezoidal rule on the full right side, Newton per step.
    FullyImplicit,
}

/// Closure at `x_max`. The left end is always Dirichlet with the initial
/// left value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RightBoundary {
    /// `u' = lambda u`, the linearised wave tail.
    #[default]
    Robin,
    Neumann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDatum {
    /// `u(t_start, x) = phi(x - position)`.
    Wave { position: f64 },
    Constant { value: f64 },
    Samples { values: Vec<f64> },
}

impl Default for InitialDatum {
    fn default() -> Self {
        InitialDatum::Wave { position: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sim1DConfig {
    pub grid: Grid1D,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub right_boundary: RightBoundary,
    pub heterogeneity: Heterogeneity1D,
    pub initial: InitialDatum,
    /// Time between snapshots; rounded to a whole number of steps.
    pub snapshot_dt: f64,
    pub store_states: bool,
    pub track: bool,
    pub eps1: f64,
    /// Stop once the level-1/2 crossing passes this station.
    pub stop_front_beyond: Option<f64>,
}

impl Default for Sim1DConfig {
    fn default() -> Self {
        Self {
            grid: Grid1D::new(-50.0, 80.0, 0.05),
            dt: 0.01,
            t_start: 0.0,
            t_end: 50.0,
            scheme: Scheme::ImexCn,
            right_boundary: RightBoundary::Robin,
            heterogeneity: Heterogeneity1D::none(),
            initial: InitialDatum::default(),
            snapshot_dt: 1.0,
            store_states: true,
            track: true,
            eps1: DEFAULT_EPS1,
            stop_front_beyond: None,
        }
    }
}

impl Sim1DConfig {
    /// Reaction-limited step bound for the explicit reaction.
    pub fn dt_limit(&self, model: &FrontModel) -> f64 {
        let reaction = 0.5 / (model.sup_f_prime * (1.0 + self.heterogeneity.sup_abs()));
        reaction.min(self.grid.h)
    }

    pub fn validate(&self, model: &FrontModel) -> Result<(), SimError> {
        self.grid.validate()?;
        self.heterogeneity.validate()?;
        let bad = |m: String| Err(SimError::BadConfig(m));
        if !(self.dt > 0.0) || !(self.t_end > self.t_start) {
            return bad(format!("need dt > 0 and t_end > t_start, got dt = {}", self.dt));
        }
        if !(self.snapshot_dt >= self.dt) {
            return bad("snapshot_dt must be at least dt".into());
        }
        if !(self.eps1 > 0.0) {
            return bad("eps1 must be positive".into());
        }
        match &self.initial {
            InitialDatum::Samples { values } if values.len() != self.grid.n() => {
                return bad(format!("initial samples: {} values for {} nodes", values.len(), self.grid.n()));
            }
            InitialDatum::Wave { position } => {
                let end = position + model.c() * (self.t_end - self.t_start);
                if self.grid.x_max - end < 10.0 {
                    return bad(format!(
                        "front reaches x = {end:.2} by t_end, within 10 of x_max = {}",
                        self.grid.x_max
                    ));
                }
            }
            _ => {}
        }
        if self.scheme == Scheme::ImexCn {
            let limit = self.dt_limit(model);
            if self.dt > limit * (1.0 + 1e-12) {
                return Err(SimError::CflViolation { dt: self.dt, limit });
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt).round() as usize
    }

    pub fn snapshot_every(&self) -> usize {
        ((self.snapshot_dt / self.dt).round() as usize).max(1)
    }
}

/// `d^2/dx^2` with a Dirichlet row at node 0 (zero) and a ghost-node
/// closure `u' = beta u` at the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct XOperator {
    pub n: usize,
    pub h: f64,
    pub beta: f64,
}

impl XOperator {
    pub fn new(n: usize, h: f64, right: RightBoundary, lambda: f64) -> Self {
        let beta = match right {
            RightBoundary::Robin => lambda,
            RightBoundary::Neumann => 0.0,
        };
        Self { n, h, beta }
    }

    /// Row coefficients `(lower, diag, upper)`.
    pub fn row(&self, i: usize) -> (f64, f64, f64) {
        let k = 1.0 / (self.h * self.h);
        if i == 0 {
            (0.0, 0.0, 0.0)
        } else if i == self.n - 1 {
            (2.0 * k, -2.0 * k + 2.0 * self.beta / self.h, 0.0)
        } else {
            (k, -2.0 * k, k)
        }
    }

    pub fn apply_strided(&self, u: &[f64], offset: usize, stride: usize, out: &mut [f64]) {
        let n = self.n;
        let at = |i: usize| u[offset + i * stride];
        out[0] = 0.0;
        for i in 1..n {
            let (l, d, r) = self.row(i);
            let right = if i + 1 < n { r * at(i + 1) } else { 0.0 };
            out[i] = l * at(i - 1) + d * at(i) + right;
        }
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.apply_strided(u, 0, 1, out)
    }

    /// Factorisation of `I - a D - diag(extra)` with an identity row at 0.
    pub fn implicit(&self, a: f64, extra: Option<&[f64]>) -> TridiagonalLu {
        let n = self.n;
        let mut lower = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n {
            let (l, d, r) = self.row(i);
            lower[i] = -a * l;
            diag[i] = 1.0 - a * d - extra.map_or(0.0, |e| e[i]);
            upper[i] = -a * r;
        }
        TridiagonalLu::new(&lower, &diag, &upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    #[serde(skip)]
    pub u: Vec<f64>,
    /// `sup_x |u - phi(x - x_wave(t))|` when the run started from a wave.
    pub sup_err: Option<f64>,
    /// Level-1/2 crossing.
    pub front_pos: Option<f64>,
    pub chi: Option<f64>,
    pub v_sup: Option<f64>,
    pub w_l2: Option<f64>,
    pub pairing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrajectory {
    pub grid: Grid1D,
    pub c: f64,
    pub t_start: f64,
    /// Initial wave position, if the run started from a wave.
    pub wave_position: Option<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Time and reason tracking stopped.
    pub tracking_lost: Option<(f64, String)>,
    /// First snapshot time with `sup_err > eps1`.
    pub n0_est: Option<f64>,
    pub steps: usize,
    pub stopped_early: bool,
}

impl RunTrajectory {
    /// Position of the reference wave `phi(x - origin)` at time `t`.
    pub fn wave_origin(&self, t: f64) -> Option<f64> {
        self.wave_position.map(|p| p + self.c * (t - self.t_start))
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.snapshots.last().map(|s| s.u.as_slice()).filter(|u| !u.is_empty())
    }
}

pub fn initial_state(model: &FrontModel, config: &Sim1DConfig) -> Vec<f64> {
    let g = &config.grid;
    match &config.initial {
        InitialDatum::Wave { position } => {
            (0..g.n()).map(|i| model.wave.phi_at(g.x(i) - position)).collect()
        }
        InitialDatum::Constant { value } => vec![*value; g.n()],
        InitialDatum::Samples { values } => values.clone(),
    }
}

pub(crate) fn sup_err_against_wave(model: &FrontModel, grid: &Grid1D, u: &[f64], origin: f64) -> f64 {
    u.iter()
        .enumerate()
        .map(|(i, v)| (v - model.wave.phi_at(grid.x(i) - origin)).abs())
        .fold(0.0, f64::max)
}

/// Observation at a snapshot time; shared with the 2D tracker per section.
pub(crate) struct Observer<'a> {
    pub model: &'a FrontModel,
    pub grid: Grid1D,
    pub track: bool,
    pub eps1: f64,
    pub chi_prev: f64,
    pub lost: Option<(f64, String)>,
}

impl Observer<'_> {
    pub fn observe(&mut self, t: f64, u: &[f64], origin: Option<f64>, store: bool) -> Snapshot {
        let sup_err = origin.map(|o| sup_err_against_wave(self.model, &self.grid, u, o));
        let front_pos = level_crossing(self.grid.x_min, self.grid.h, u, 0.5);
        let mut snap = Snapshot {
            t,
            u: if store { u.to_vec() } else { Vec::new() },
            sup_err,
            front_pos,
            chi: None,
            v_sup: None,
            w_l2: None,
            pairing: None,
        };
        if let (true, None, Some(o)) = (self.track, &self.lost, origin) {
            let state = GridState { x_min: self.grid.x_min, h: self.grid.h, u };
            let tilde = resample_moving_frame(self.model, state, o);
            match track_front(self.model, &tilde, self.chi_prev, self.eps1) {
                Ok(r) => {
                    self.chi_prev = r.chi;
                    snap.chi = Some(r.chi);
                    snap.v_sup = Some(r.v_sup);
                    snap.w_l2 = Some(w_energy(self.model, &r.v));
                    snap.pairing = Some(r.pairing);
                }
                Err(e) => self.lost = Some((t, e.to_string())),
            }
        }
        snap
    }
}

fn reaction(model: &FrontModel, u: &[f64], r: &[f64], out: &mut [f64]) {
    for i in 0..u.len() {
        out[i] = model.f.f(u[i]) * (1.0 + r[i]);
    }
}

/// Integrates the heterogeneous problem and records snapshots.
pub fn run_cauchy_1d(model: &FrontModel, config: &Sim1DConfig) -> Result<RunTrajectory, SimError> {
    config.validate(model)?;
    let g = config.grid;
    let n = g.n();
    let dt = config.dt;
    let r: Vec<f64> = (0..n).map(|i| config.heterogeneity.r(g.x(i))).collect();
    let op = XOperator::new(n, g.h, config.right_boundary, model.wave.lambda);
    let a = 0.5 * dt;

    let mut u = initial_state(model, config);
    let left = u[0];
    let wave_position = match config.initial {
        InitialDatum::Wave { position } => Some(position),
        _ => None,
    };
    let mut traj = RunTrajectory {
        grid: g,
        c: model.c(),
        t_start: config.t_start,
        wave_position,
        snapshots: Vec::new(),
        tracking_lost: None,
        n0_est: None,
        steps: 0,
        stopped_early: false,
    };
    let mut obs = Observer {
        model,
        grid: g,
        track: config.track,
        eps1: config.eps1,
        chi_prev: 0.0,
        lost: None,
    };
    let record = |traj: &mut RunTrajectory, obs: &mut Observer, t: f64, u: &[f64]| {
        let snap = obs.observe(t, u, traj.wave_origin(t), config.store_states);
        if traj.n0_est.is_none() && snap.sup_err.is_some_and(|e| e > config.eps1) {
            traj.n0_est = Some(t);
        }
        let stop = match (config.stop_front_beyond, snap.front_pos) {
            (Some(limit), Some(p)) => p > limit,
            _ => false,
        };
        traj.snapshots.push(snap);
        stop
    };
    record(&mut traj, &mut obs, config.t_start, &u);

    let explicit_lu = op.implicit(a, None);
    let mut du = vec![0.0; n];
    let mut nl = vec![0.0; n];
    let mut nl_prev = vec![0.0; n];
    let mut fp = vec![0.0; n];
    let every = config.snapshot_every();
    let steps = config.steps();
    for k in 1..=steps {
        let t = config.t_start + k as f64 * dt;
        op.apply(&u, &mut du);
        match config.scheme {
            Scheme::ImexCn => {
                reaction(model, &u, &r, &mut nl);
                let mut rhs: Vec<f64> = (0..n)
                    .map(|i| {
                        let react = if k == 1 { nl[i] } else { 1.5 * nl[i] - 0.5 * nl_prev[i] };
                        u[i] + a * du[i] + dt * react
                    })
                    .collect();
                rhs[0] = left;
                explicit_lu.solve_in_place(&mut rhs);
                std::mem::swap(&mut nl, &mut nl_prev);
                u = rhs;
            }
            Scheme::FullyImplicit => {
                reaction(model, &u, &r, &mut nl);
                let base: Vec<f64> = (0..n).map(|i| u[i] + a * (du[i] + nl[i])).collect();
                let mut w = u.clone();
                let mut converged = false;
                let mut increment = f64::INFINITY;
                for _ in 0..30 {
                    op.apply(&w, &mut du);
                    reaction(model, &w, &r, &mut nl);
                    let mut res: Vec<f64> = (0..n).map(|i| base[i] - w[i] + a * (du[i] + nl[i])).collect();
                    res[0] = left - w[0];
                    for i in 0..n {
                        fp[i] = a * model.f.f_prime(w[i]) * (1.0 + r[i]);
                    }
                    op.implicit(a, Some(&fp)).solve_in_place(&mut res);
                    increment = sup_norm(&res);
                    w.iter_mut().zip(&res).for_each(|(x, d)| *x += d);
                    if increment <= 1e-13 {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(SimError::NoConvergence { t, increment });
                }
                u = w;
            }
        }
        let norm = sup_norm(&u);
        if !(norm <= 2.0) {
            return Err(SimError::BlowUp { t, norm });
        }
        traj.steps = k;
        if (k % every == 0 || k == steps) && record(&mut traj, &mut obs, t, &u) {
            traj.stopped_early = k < steps;
            break;
        }
    }
    traj.tracking_lost = obs.lost;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> FrontModel {
        FrontModel::cubic(0.25).unwrap()
    }

    fn short(grid: Grid1D, t_end: f64) -> Sim1DConfig {
        Sim1DConfig { grid, t_end, ..Default::default() }
    }

    #[test]
    fn equilibria_are_preserved() {
        let m = model();
        let mut cfg = short(Grid1D::new(-20.0, 20.0, 0.1), 10.0);
        cfg.initial = InitialDatum::Constant { value: 0.0 };
        cfg.heterogeneity = Heterogeneity1D::sigmoid(0.5, 0.25, 0.0);
        let t = run_cauchy_1d(&m, &cfg).unwrap();
        assert!(t.snapshots.iter().all(|s| s.u.iter().all(|&v| v == 0.0)));

        cfg.initial = InitialDatum::Constant { value: 1.0 };
        cfg.right_boundary = RightBoundary::Neumann;
        for scheme in [Scheme::ImexCn, Scheme::FullyImplicit] {
            cfg.scheme = scheme;
            let t = run_cauchy_1d(&m, &cfg).unwrap();
            assert!(t.snapshots.iter().all(|s| s.u.iter().all(|&v| (v - 1.0).abs() < 1e-14)));
        }
    }

    #[test]
    fn cfl_is_enforced() {
        let m = model();
        let mut cfg = short(Grid1D::new(-20.0, 40.0, 0.1), 1.0);
        cfg.dt = 0.2;
        assert!(matches!(run_cauchy_1d(&m, &cfg), Err(SimError::CflViolation { .. })));
        cfg.scheme = Scheme::FullyImplicit;
        assert!(run_cauchy_1d(&m, &cfg).is_ok());
    }

    #[test]
    fn buffer_is_checked() {
        let m = model();
        let cfg = short(Grid1D::new(-20.0, 20.0, 0.1), 50.0);
        assert!(matches!(run_cauchy_1d(&m, &cfg), Err(SimError::BadConfig(_))));
    }

    #[test]
    fn homogeneous_front_follows_wave() {
        let m = model();
        let cfg = short(Grid1D::new(-50.0, 40.0, 0.05), 20.0);
        let t = run_cauchy_1d(&m, &cfg).unwrap();
        for s in &t.snapshots {
            assert!(s.sup_err.unwrap() <= 5e-3);
            assert!(s.chi.unwrap().abs() <= 1e-3);
            assert!(s.pairing.unwrap().abs() <= 1e-10);
            // monotone and in [0, 1]
            assert!(s.u.windows(2).all(|w| w[1] <= w[0] + 1e-10));
            assert!(s.u.iter().all(|&v| (-1e-8..=1.0 + 1e-8).contains(&v)));
        }
    }

    #[test]
    fn schemes_agree() {
        let m = model();
        let mut cfg = short(Grid1D::new(-40.0, 40.0, 0.1), 10.0);
        cfg.heterogeneity = Heterogeneity1D::sigmoid(0.5, 0.25, 5.0);
        let a = run_cauchy_1d(&m, &cfg).unwrap();
        cfg.scheme = Scheme::FullyImplicit;
        let b = run_cauchy_1d(&m, &cfg).unwrap();
        let (ua, ub) = (a.final_state().unwrap(), b.final_state().unwrap());
        let d = ua.iter().zip(ub).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(d < 1e-4, "{d}");
    }
}
