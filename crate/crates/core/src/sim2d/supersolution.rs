//! The travelling super-solution `eps psi(x, y) e^{-alpha (x - c t)}` ahead
//! of the front, with `psi` built from the distance to the boundary.

use serde::{Deserialize, Serialize};

use crate::model::FrontModel;

use super::domain::DomainSpec2D;
use super::operator::{GridSpec2D, MappedGrid};
use super::stepper::RunTrajectory2D;
use super::Sim2DError;

/// Cutoff equal to `s` on `(-inf, r]` and to `3r/2` on `[2r, inf)`, joined
/// by the quartic `r + r (t - t^3 + t^4/2)`, `t = (s - r)/r`, which is
/// monotone, `C^2`, and has `|g'| <= 1`, `|g''| <= 3/(2r)`.
pub fn cutoff(r: f64, s: f64) -> f64 {
    if s <= r {
        s
    } else if s >= 2.0 * r {
        1.5 * r
    } else {
        let t = (s - r) / r;
        r + r * (t - t * t * t + 0.5 * t * t * t * t)
    }
}

/// `(g', g'')` of [`cutoff`].
pub fn cutoff_derivatives(r: f64, s: f64) -> (f64, f64) {
    if s <= r {
        (1.0, 0.0)
    } else if s >= 2.0 * r {
        (0.0, 0.0)
    } else {
        let t = (s - r) / r;
        (1.0 - 3.0 * t * t + 2.0 * t * t * t, (-6.0 * t + 6.0 * t * t) / r)
    }
}

/// Rates and margins the construction is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionBounds {
    pub c: f64,
    pub f_prime_0: f64,
    pub delta: f64,
    /// Largest rate with `omega(alpha)^2 >= -f'(0)/2`.
    pub alpha1: f64,
    /// Bound on `|Delta psi|` and `|grad psi|`, at least 1.
    pub c_psi: f64,
    /// Smallest admissible offset `a` (exclusive).
    pub a_min: f64,
    /// `f(s) <= (f'(0) + delta) s` on `(0, s_star]`.
    pub s_star: f64,
}

/// `omega(alpha)^2 = alpha c - alpha^2 - f'(0) - delta`.
pub fn omega_squared(alpha: f64, c: f64, f_prime_0: f64, delta: f64) -> f64 {
    alpha * c - alpha * alpha - f_prime_0 - delta
}

/// Largest `s` with `f(sigma) <= (f'(0) + delta) sigma` on `(0, s]`,
/// located on a grid of step `1e-5`.
fn linear_bound_range(model: &FrontModel, delta: f64) -> f64 {
    let slope = model.f.f_prime(0.0) + delta;
    let step = 1e-5;
    let mut s = step;
    while s < 1.0 && model.f.f(s) <= slope * s {
        s += step;
    }
    s - step
}

pub fn supersolution_bounds(model: &FrontModel, domain: &DomainSpec2D, r: f64) -> SupersolutionBounds {
    let c = model.c();
    let fp0 = model.f.f_prime(0.0);
    let delta = fp0.abs() / 4.0;
    let disc = c * c - 4.0 * (0.5 * fp0 + delta);
    let alpha1 = 0.5 * (c + disc.max(0.0).sqrt());
    // |Delta d| is the curvature of the level line, below k / (1 - 2 r k)
    let k = domain.curvature_max;
    let c_psi = (1.5 / r + k / (1.0 - 2.0 * r * k)).max(1.0);
    SupersolutionBounds {
        c,
        f_prime_0: fp0,
        delta,
        alpha1,
        c_psi,
        a_min: -4.0 * c_psi / fp0,
        s_star: linear_bound_range(model, delta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Supersolution2D {
    pub alpha: f64,
    pub a: f64,
    pub r: f64,
    pub epsilon: f64,
    pub c: f64,
    pub domain: DomainSpec2D,
}

impl Supersolution2D {
    /// Skips the admissibility checks; used to probe the verifier.
    pub fn unchecked(model: &FrontModel, domain: &DomainSpec2D, alpha: f64, a: f64, r: f64, epsilon: f64) -> Self {
        Self { alpha, a, r, epsilon, c: model.c(), domain: *domain }
    }

    pub fn psi(&self, x: f64, y: f64) -> f64 {
        let d = self.domain.signed_distance(x, y);
        1.5 * self.r - cutoff(self.r, d) + self.a
    }

    pub fn psi_range(&self) -> (f64, f64) {
        (self.a, self.a + 1.5 * self.r)
    }

    /// Samples of `psi` at the nodes of a mapped grid.
    pub fn psi_on(&self, grid: &MappedGrid) -> Vec<f64> {
        grid.sample(|x, y| self.psi(x, y))
    }

    pub fn u_bar(&self, t: f64, x: f64, y: f64) -> f64 {
        self.epsilon * self.psi(x, y) * (-self.alpha * (x - self.c * t)).exp()
    }

    /// Central-difference gradient and Laplacian of `psi`.
    pub fn psi_derivatives(&self, x: f64, y: f64, h: f64) -> ([f64; 2], f64) {
        let p = |a: f64, b: f64| self.psi(a, b);
        let (c0, xp, xm, yp, ym) = (p(x, y), p(x + h, y), p(x - h, y), p(x, y + h), p(x, y - h));
        let grad = [(xp - xm) / (2.0 * h), (yp - ym) / (2.0 * h)];
        let lap = (xp + xm + yp + ym - 4.0 * c0) / (h * h);
        (grad, lap)
    }
}

/// Builds the super-solution after checking the admissibility conditions.
/// `epsilon = None` picks the largest amplitude for which the linear bound
/// on `f` covers the range of `u_bar` on `{x > c t}`.
pub fn build_supersolution(
    model: &FrontModel,
    domain: &DomainSpec2D,
    alpha: f64,
    a: f64,
    r: f64,
    epsilon: Option<f64>,
) -> Result<Supersolution2D, Sim2DError> {
    let b = supersolution_bounds(model, domain, r);
    let mut failed = Vec::new();
    if !(b.f_prime_0 < 0.0) {
        failed.push(format!("f'(0) = {} must be negative", b.f_prime_0));
    }
    if !(alpha > 0.0) {
        failed.push(format!("alpha = {alpha} must be positive"));
    }
    if !(alpha <= b.alpha1) {
        failed.push(format!("alpha = {alpha} exceeds alpha1 = {:.6}", b.alpha1));
    }
    if !(r > 0.0 && r <= domain.r_ball) {
        failed.push(format!("r = {r} must lie in (0, r_ball = {}]", domain.r_ball));
    }
    if !(a > b.a_min) {
        failed.push(format!("a = {a} must exceed -4 C / f'(0) = {:.6}", b.a_min));
    }
    if !(alpha * (a + 1.5 * r) < 1.0) {
        failed.push(format!("alpha (a + 3r/2) = {:.6} must be below 1", alpha * (a + 1.5 * r)));
    }
    let eps_max = b.s_star / (a + 1.5 * r);
    let epsilon = epsilon.unwrap_or(eps_max);
    if !(epsilon > 0.0 && epsilon <= eps_max) {
        failed.push(format!("epsilon = {epsilon} must lie in (0, {eps_max:.6}]"));
    }
    if !failed.is_empty() {
        return Err(Sim2DError::ParameterViolation(failed));
    }
    Ok(Supersolution2D::unchecked(model, domain, alpha, a, r, epsilon))
}

/// Admissible parameters: `a` ten percent above its bound and `alpha` half
/// its upper limit.
pub fn derived_parameters(model: &FrontModel, domain: &DomainSpec2D, r: f64) -> (f64, f64) {
    let b = supersolution_bounds(model, domain, r);
    let a = 1.1 * b.a_min;
    let alpha = 0.5 * b.alpha1.min(1.0 / (a + 1.5 * r));
    (alpha, a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub alpha: f64,
    pub a: f64,
    pub r: f64,
    pub epsilon: f64,
    pub min_slack_interior: f64,
    pub min_slack_boundary: f64,
    pub worst_interior: (f64, f64),
    pub worst_boundary: (f64, f64),
    pub pass: bool,
}

/// Step of the difference quotients for the derivatives of `psi`.
pub const PSI_FD_STEP: f64 = 1e-4;

/// Evaluates `u_t - Delta u - f(u)` at interior nodes and `d u / d nu` at
/// boundary nodes of `grid`, over nodes with `x >= c t`.
pub fn verify_supersolution(
    model: &FrontModel,
    ss: &Supersolution2D,
    t: f64,
    grid: GridSpec2D,
) -> Result<SlackReport, Sim2DError> {
    let mg = MappedGrid::new(&ss.domain, grid)?;
    let (alpha, c, eps) = (ss.alpha, ss.c, ss.epsilon);
    let h = PSI_FD_STEP;
    let mut report = SlackReport {
        alpha,
        a: ss.a,
        r: ss.r,
        epsilon: eps,
        min_slack_interior: f64::INFINITY,
        min_slack_boundary: f64::INFINITY,
        worst_interior: (f64::NAN, f64::NAN),
        worst_boundary: (f64::NAN, f64::NAN),
        pass: false,
    };
    for i in 0..mg.nx {
        let x = mg.x(i);
        if x < c * t {
            continue;
        }
        let e = (-alpha * (x - c * t)).exp();
        let (nu_minus, nu_plus) = ss.domain.normals(x);
        for j in 0..mg.nz {
            let y = mg.y(i, j);
            let psi = ss.psi(x, y);
            let (grad, lap) = ss.psi_derivatives(x, y, h);
            if j == 0 || j == mg.nz - 1 {
                let nu = if j == 0 { nu_minus } else { nu_plus };
                let dn = eps * e * (grad[0] * nu[0] + grad[1] * nu[1] - alpha * psi * nu[0]);
                if dn < report.min_slack_boundary {
                    report.min_slack_boundary = dn;
                    report.worst_boundary = (x, y);
                }
            } else {
                let u = eps * psi * e;
                let lap_u = eps * e * (lap - 2.0 * alpha * grad[0] + alpha * alpha * psi);
                let slack = alpha * c * u - lap_u - model.f.f(u);
                if slack < report.min_slack_interior {
                    report.min_slack_interior = slack;
                    report.worst_interior = (x, y);
                }
            }
        }
    }
    report.pass = report.min_slack_interior >= -1e-8 && report.min_slack_boundary >= -1e-8;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    /// `max (u - u_bar)` over the initial region; the comparison needs it
    /// non-positive.
    pub initial_excess: f64,
    /// `max (u - u_bar)` over all stored snapshots.
    pub max_excess: f64,
    pub pass: bool,
}

/// Compares a stored run against `u_bar` shifted to
/// `eps psi e^{-alpha (x - origin(t) - k0)}` on `{x > origin(t) + k0}`.
pub fn domination_check(traj: &RunTrajectory2D, ss: &Supersolution2D, k0: f64) -> Result<DominationReport, Sim2DError> {
    let grid = MappedGrid::new(&ss.domain, traj.grid)?;
    let mut initial_excess = f64::NEG_INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    for (n, snap) in traj.snapshots.iter().enumerate() {
        let origin = traj
            .wave_origin(snap.t)
            .ok_or_else(|| Sim2DError::BadConfig("domination check needs a wave start".into()))?;
        if snap.u.is_empty() {
            return Err(Sim2DError::BadConfig("domination check needs stored fields".into()));
        }
        for i in 0..grid.nx {
            let x = grid.x(i);
            if x <= origin + k0 {
                continue;
            }
            for j in 0..grid.nz {
                let y = grid.y(i, j);
                let bar = ss.epsilon * ss.psi(x, y) * (-ss.alpha * (x - origin - k0)).exp();
                let excess = snap.u[grid.idx(i, j)] - bar;
                max_excess = max_excess.max(excess);
                if n == 0 {
                    initial_excess = initial_excess.max(excess);
                }
            }
        }
    }
    Ok(DominationReport { initial_excess, max_excess, pass: initial_excess <= 0.0 && max_excess <= 1e-8 })
}

#[cfg(test)]
mod tests {
    use super::super::domain::{build_domain, BoundaryCurve, DomainParams};
    use super::*;

    fn model() -> FrontModel {
        FrontModel::cubic(0.25).unwrap()
    }

    fn converging() -> DomainSpec2D {
        build_domain(&DomainParams {
            b_plus: BoundaryCurve::sigmoid(1.0, 0.5, 0.25, 0.0),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn cutoff_shape() {
        let r = 0.2;
        for k in 0..=1000 {
            let s = 3.0 * r * k as f64 / 1000.0;
            let (d1, d2) = cutoff_derivatives(r, s);
            assert!((0.0..=1.0).contains(&d1));
            assert!(d2.abs() <= 1.5 / r + 1e-12);
            let h = 1e-6;
            let fd = (cutoff(r, s + h) - cutoff(r, s - h)) / (2.0 * h);
            assert!((fd - d1).abs() < 1e-6);
        }
        assert_eq!(cutoff(r, 0.1), 0.1);
        assert!((cutoff(r, 2.0 * r) - 1.5 * r).abs() < 1e-15);
        // C^2 at the joins
        assert!(cutoff_derivatives(r, r + 1e-12).1.abs() < 1e-9);
        assert!(cutoff_derivatives(r, 2.0 * r - 1e-12).1.abs() < 1e-9);
    }

    #[test]
    fn alpha1_for_quarter_cubic() {
        let m = model();
        let d = build_domain(&DomainParams::default()).unwrap();
        let b = supersolution_bounds(&m, &d, 0.2);
        let c = m.c();
        let want = 0.5 * (c + (c * c + 0.25).sqrt());
        assert!((b.alpha1 - want).abs() < 1e-6);
        assert!((omega_squared(b.alpha1, b.c, b.f_prime_0, b.delta) - 0.125).abs() < 1e-6);
        // cubic: f(s) <= (f'(0) + delta) s exactly up to the root of (1 + theta) s - s^2 = delta
        let exact = 0.5 * (1.25 - (1.25f64 * 1.25 - 4.0 * 0.0625).sqrt());
        assert!((b.s_star - exact).abs() < 2e-5);
    }

    #[test]
    fn psi_range_and_collar_gradient() {
        let m = model();
        let d = build_domain(&DomainParams::default()).unwrap();
        let (alpha, a) = derived_parameters(&m, &d, 0.2);
        let ss = build_supersolution(&m, &d, alpha, a, 0.2, None).unwrap();
        for k in 0..=100 {
            let y = k as f64 / 100.0;
            let p = ss.psi(0.0, y);
            assert!(p >= a - 1e-15 && p <= a + 0.3 + 1e-15);
        }
        // at d = r/2 from the lower wall the gradient is the outward normal
        let (grad, _) = ss.psi_derivatives(1.0, 0.1, 1e-4);
        assert!((grad[0]).abs() < 1e-8 && (grad[1] + 1.0).abs() < 1e-8);
        let (grad, _) = ss.psi_derivatives(1.0, 0.9, 1e-4);
        assert!((grad[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let m = model();
        let d = build_domain(&DomainParams::default()).unwrap();
        let (_, a) = derived_parameters(&m, &d, 0.2);
        match build_supersolution(&m, &d, 0.0, a, 0.2, None) {
            Err(Sim2DError::ParameterViolation(v)) => assert!(v.iter().any(|s| s.contains("positive"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verifier_passes_admissible_and_flags_large_alpha() {
        let m = model();
        let grid = GridSpec2D { x_min: 0.0, x_max: 20.0, hx: 0.1, nz: 41 };
        for d in [build_domain(&DomainParams::default()).unwrap(), converging()] {
            let (alpha, a) = derived_parameters(&m, &d, 0.2);
            let ss = build_supersolution(&m, &d, alpha, a, 0.2, None).unwrap();
            let rep = verify_supersolution(&m, &ss, 0.0, grid).unwrap();
            assert!(rep.pass, "{rep:?}");
            let b = supersolution_bounds(&m, &d, 0.2);
            let bad = Supersolution2D::unchecked(&m, &d, 2.0 * b.alpha1, a, 0.2, ss.epsilon);
            let rep = verify_supersolution(&m, &bad, 0.0, grid).unwrap();
            assert!(!rep.pass && rep.min_slack_interior < 0.0, "{rep:?}");
        }
    }
}
