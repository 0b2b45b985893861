//! The planar travelling wave `phi'' + c phi' + f(phi) = 0`, `phi(-inf) = 1`,
//! `phi(+inf) = 0`, normalised by `phi(0) = theta`.
//!
//! [`solve_wave`] runs Newton on the nodal values and the speed together.
//! The ends of the grid carry linearised-tail (Robin) closures instead of
//! Dirichlet data, so truncation only costs the nonlinear tail correction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlinearity::Nonlinearity;
use crate::numerics::{derivative_4th, fit_line, hermite_eval, BandedMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("invalid wave grid: {0}")]
    BadGrid(String),
    #[error("Newton did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("grid too short: tail mismatch {mismatch:e} exceeds {limit:e}")]
    GridTooShort { mismatch: f64, limit: f64 },
    #[error("f'(0) and f'(1) must be negative")]
    NotBistable,
    #[error("fit window has {points} points, need at least {needed}")]
    FitWindowUnderResolved { points: usize, needed: usize },
    #[error("closed-form wave needs theta in (0, 1/2), got {0}")]
    ThetaOutOfRange(f64),
}

/// Uniform grid on `[xi_min, xi_max]` that contains `xi = 0` as a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n_points: usize,
}

impl Default for WaveGrid {
    fn default() -> Self {
        Self::with_spacing(-40.0, 40.0, 0.01).unwrap()
    }
}

impl WaveGrid {
    /// Checks the node count puts `xi = 0` on the grid.
    pub fn new(xi_min: f64, xi_max: f64, n_points: usize) -> Result<Self, WaveError> {
        if !(xi_min < 0.0 && xi_max > 0.0) {
            return Err(WaveError::BadGrid(format!(
                "need xi_min < 0 < xi_max, got [{xi_min}, {xi_max}]"
            )));
        }
        if n_points < 5 {
            return Err(WaveError::BadGrid(format!("need at least 5 points, got {n_points}")));
        }
        let grid = Self { xi_min, xi_max, n_points };
        let s = -xi_min / grid.h();
        if (s - s.round()).abs() > 1e-8 {
            return Err(WaveError::BadGrid(format!(
                "xi = 0 is not a node ({n_points} points on [{xi_min}, {xi_max}])"
            )));
        }
        Ok(grid)
    }

    /// Rounds both ends to multiples of `h` so that zero is a node.
    pub fn with_spacing(xi_min: f64, xi_max: f64, h: f64) -> Result<Self, WaveError> {
        if !(h > 0.0) {
            return Err(WaveError::BadGrid(format!("spacing must be positive, got {h}")));
        }
        let left = (-xi_min / h).round();
        let right = (xi_max / h).round();
        Self::new(-left * h, right * h, (left + right) as usize + 1)
    }

    pub fn h(&self) -> f64 {
        (self.xi_max - self.xi_min) / (self.n_points - 1) as f64
    }

    pub fn zero_index(&self) -> usize {
        (-self.xi_min / self.h()).round() as usize
    }

    pub fn xi(&self, i: usize) -> f64 {
        self.xi_min + i as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.xi(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub grid: WaveGrid,
    pub phi: Vec<f64>,
    pub phi_prime: Vec<f64>,
    pub c: f64,
    pub lambda: f64,
    pub mu: f64,
    pub theta: f64,
    /// Infinity norm of the discrete residual at exit; zero for the closed form.
    pub residual_inf: f64,
    pub newton_iterations: usize,
}

impl WaveProfile {
    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    /// `(phi, phi')` at any `xi`: Hermite interpolation on the grid and the
    /// exponential tails outside it.
    pub fn eval(&self, xi: f64) -> (f64, f64) {
        let g = &self.grid;
        let n = self.phi.len();
        if xi > g.xi_max {
            let v = self.phi[n - 1] * (self.lambda * (xi - g.xi_max)).exp();
            return (v, self.lambda * v);
        }
        if xi < g.xi_min {
            let w = (1.0 - self.phi[0]) * (self.mu * (xi - g.xi_min)).exp();
            return (1.0 - w, -self.mu * w);
        }
        hermite_eval(g.xi_min, g.h(), &self.phi, &self.phi_prime, xi)
            .expect("point inside grid")
    }

    pub fn phi_at(&self, xi: f64) -> f64 {
        self.eval(xi).0
    }

    pub fn phi_prime_at(&self, xi: f64) -> f64 {
        self.eval(xi).1
    }

    /// Residual of `phi'' + c phi' + f(phi)` with second-order centered
    /// differences at interior nodes.
    pub fn discrete_residual(&self, f: &Nonlinearity) -> Vec<f64> {
        let h = self.h();
        let p = &self.phi;
        (1..p.len() - 1)
            .map(|i| {
                (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (h * h)
                    + self.c * (p[i + 1] - p[i - 1]) / (2.0 * h)
                    + f.f(p[i])
            })
            .collect()
    }
}

/// `(lambda, mu)`: the negative root of `l^2 + c l + f'(0)` and the positive
/// root of `m^2 + c m + f'(1)`.
pub fn decay_rates(f: &Nonlinearity, c: f64) -> (f64, f64) {
    rates_from(f.f_prime(0.0), f.f_prime(1.0), c)
}

pub fn rates_from(fp0: f64, fp1: f64, c: f64) -> (f64, f64) {
    let lambda = 0.5 * (-c - (c * c - 4.0 * fp0).sqrt());
    let mu = 0.5 * (-c + (c * c - 4.0 * fp1).sqrt());
    (lambda, mu)
}

fn rate_derivatives(fp0: f64, fp1: f64, c: f64) -> (f64, f64) {
    let dl = 0.5 * (-1.0 - c / (c * c - 4.0 * fp0).sqrt());
    let dm = 0.5 * (-1.0 + c / (c * c - 4.0 * fp1).sqrt());
    (dl, dm)
}

/// `0 < kappa < -lambda - c/2`.
pub fn check_rate_constraint(kappa: f64, profile: &WaveProfile) -> bool {
    kappa > 0.0 && kappa < rate_constraint_bound(profile)
}

pub fn rate_constraint_bound(profile: &WaveProfile) -> f64 {
    -profile.lambda - 0.5 * profile.c
}

/// Closed-form wave of the cubic `u (1 - u) (u - theta)`.
pub fn exact_cubic_wave(theta: f64, grid: WaveGrid) -> Result<WaveProfile, WaveError> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(WaveError::ThetaOutOfRange(theta));
    }
    let s2 = std::f64::consts::SQRT_2;
    let xi0 = -s2 * ((1.0 - theta) / theta).ln();
    let c = (1.0 - 2.0 * theta) / s2;
    let mut phi = Vec::with_capacity(grid.n_points);
    let mut phi_prime = Vec::with_capacity(grid.n_points);
    for i in 0..grid.n_points {
        let e = ((grid.xi(i) - xi0) / s2).exp();
        let p = 1.0 / (1.0 + e);
        phi.push(p);
        // 1 - p = e / (1 + e), written without cancellation
        phi_prime.push(-p * (e / (1.0 + e)) / s2);
    }
    phi[grid.zero_index()] = theta;
    let (lambda, mu) = rates_from(-theta, theta - 1.0, c);
    Ok(WaveProfile {
        grid,
        phi,
        phi_prime,
        c,
        lambda,
        mu,
        theta,
        residual_inf: 0.0,
        newton_iterations: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveSolveOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Moves the initial guess by this much; the solution should not care.
    pub guess_shift: f64,
    /// Overrides the initial speed guess.
    pub guess_speed: Option<f64>,
}

impl Default for WaveSolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 50,
            guess_shift: 0.0,
            guess_speed: None,
        }
    }
}

struct Residual {
    values: Vec<f64>,
    norm: f64,
}

fn residual(f: &Nonlinearity, phi: &[f64], c: f64, h: f64) -> Residual {
    let n = phi.len();
    let (lambda, mu) = decay_rates(f, c);
    let mut r = vec![0.0; n];
    r[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h) + mu * (1.0 - phi[0]);
    for i in 1..n - 1 {
        r[i] = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h)
            + c * (phi[i + 1] - phi[i - 1]) / (2.0 * h)
            + f.f(phi[i]);
    }
    r[n - 1] = (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * h) - lambda * phi[n - 1];
    let norm = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    Residual { values: r, norm }
}

/// Newton solve for `(phi, c)`.
///
/// The unknown `phi(0)` is pinned to `theta` and its slot in the unknown
/// vector is taken by `c`. The resulting matrix is the banded Jacobian with
/// one column swapped for the dense `d/dc` column, which is solved with a
/// rank-one update of the banded factorisation.
pub fn solve_wave(
    f: &Nonlinearity,
    grid: WaveGrid,
    options: &WaveSolveOptions,
) -> Result<WaveProfile, WaveError> {
    let fp0 = f.f_prime(0.0);
    let fp1 = f.f_prime(1.0);
    if !(fp0 < 0.0 && fp1 < 0.0) {
        return Err(WaveError::NotBistable);
    }
    let theta = f.theta();
    let n = grid.n_points;
    let h = grid.h();
    let i0 = grid.zero_index();
    let s2 = std::f64::consts::SQRT_2;

    // tanh guess with the cubic slope, placed so that phi(shift) = theta
    let xi0 = -s2 * ((1.0 - theta) / theta).ln() + options.guess_shift;
    let mut phi: Vec<f64> = (0..n)
        .map(|i| 1.0 / (1.0 + ((grid.xi(i) - xi0) / s2).exp()))
        .collect();
    phi[i0] = theta;
    let mut c = options
        .guess_speed
        .unwrap_or_else(|| 6.0 * s2 * f.integral());

    let mut res = residual(f, &phi, c, h);
    let mut iterations = 0;
    while res.norm > options.tol {
        if iterations >= options.max_iterations {
            return Err(WaveError::NoConvergence { iterations, residual: res.norm });
        }
        iterations += 1;

        let (lambda, mu) = rates_from(fp0, fp1, c);
        let (dl, dm) = rate_derivatives(fp0, fp1, c);
        let mut jac = BandedMatrix::zeros(n, 2, 2);
        let mut dc = vec![0.0; n];
        jac.set(0, 0, -1.5 / h - mu);
        jac.set(0, 1, 2.0 / h);
        jac.set(0, 2, -0.5 / h);
        dc[0] = dm * (1.0 - phi[0]);
        for i in 1..n - 1 {
            jac.set(i, i - 1, 1.0 / (h * h) - c / (2.0 * h));
            jac.set(i, i, -2.0 / (h * h) + f.f_prime(phi[i]));
            jac.set(i, i + 1, 1.0 / (h * h) + c / (2.0 * h));
            dc[i] = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
        }
        jac.set(n - 1, n - 3, 0.5 / h);
        jac.set(n - 1, n - 2, -2.0 / h);
        jac.set(n - 1, n - 1, 1.5 / h - lambda);
        dc[n - 1] = -dl * phi[n - 1];

        // B = J with column i0 replaced by e_i0; target is B + (dc - e) e^T.
        for i in i0.saturating_sub(2)..=(i0 + 2).min(n - 1) {
            jac.set(i, i0, if i == i0 { 1.0 } else { 0.0 });
        }
        jac.factor();
        let mut y: Vec<f64> = res.values.iter().map(|r| -r).collect();
        jac.solve_in_place(&mut y);
        let mut z = dc;
        z[i0] -= 1.0;
        jac.solve_in_place(&mut z);
        let denom = 1.0 + z[i0];
        if denom.abs() < 1e-300 || !denom.is_finite() {
            return Err(WaveError::NoConvergence { iterations, residual: res.norm });
        }
        let alpha = y[i0] / denom;
        let mut step: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - b * alpha).collect();
        let delta_c = step[i0];
        step[i0] = 0.0;

        // damped update: halve until the residual drops
        let mut t = 1.0;
        loop {
            let trial_phi: Vec<f64> = phi.iter().zip(&step).map(|(p, d)| p + t * d).collect();
            let trial_c = c + t * delta_c;
            let trial = residual(f, &trial_phi, trial_c, h);
            if trial.norm.is_finite() && (trial.norm < res.norm || t < 1e-3) {
                phi = trial_phi;
                c = trial_c;
                res = trial;
                break;
            }
            t *= 0.5;
        }
    }

    let limit = 100.0 * options.tol.max(1e-12);
    let mismatch = (1.0 - phi[0]).abs().max(phi[n - 1].abs());
    if mismatch > limit {
        return Err(WaveError::GridTooShort { mismatch, limit });
    }
    let (lambda, mu) = decay_rates(f, c);
    let phi_prime = derivative_4th(&phi, h);
    Ok(WaveProfile {
        grid,
        phi,
        phi_prime,
        c,
        lambda,
        mu,
        theta,
        residual_inf: res.norm,
        newton_iterations: iterations,
    })
}

/// Fitted tail slopes and the tightest constants in the two-sided
/// exponential bounds for `phi`, `1 - phi` and `-phi'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub slope_plus: f64,
    pub slope_minus: f64,
    pub lambda: f64,
    pub mu: f64,
    pub rel_err_plus: f64,
    pub rel_err_minus: f64,
    pub c1: f64,
    pub c2: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const MIN_FIT_POINTS: usize = 20;

pub fn check_tail_estimates(profile: &WaveProfile) -> Result<TailReport, WaveError> {
    let g = &profile.grid;
    let window = |lo: f64, hi: f64, value: &dyn Fn(usize) -> f64| {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..g.n_points {
            let x = g.xi(i);
            if x >= lo && x <= hi {
                xs.push(x);
                ys.push(value(i).ln());
            }
        }
        if xs.len() < MIN_FIT_POINTS {
            return Err(WaveError::FitWindowUnderResolved {
                points: xs.len(),
                needed: MIN_FIT_POINTS,
            });
        }
        // log of a non-positive value is a violation, not a fit
        Ok(fit_line(&xs, &ys).map(|l| l.slope).unwrap_or(f64::NAN))
    };
    let phi = &profile.phi;
    let slope_plus = window(0.5 * g.xi_max, 0.9 * g.xi_max, &|i| phi[i])?;
    let slope_minus = window(0.9 * g.xi_min, 0.5 * g.xi_min, &|i| 1.0 - phi[i])?;

    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0_f64;
    for i in 0..g.n_points {
        let x = g.xi(i);
        let (a, b) = if x <= 0.0 {
            let e = (profile.mu * x).exp();
            ((1.0 - phi[i]) / e, -profile.phi_prime[i] / e)
        } else {
            let e = (profile.lambda * x).exp();
            (phi[i] / e, -profile.phi_prime[i] / e)
        };
        c1 = c1.min(a).min(b);
        c2 = c2.max(a).max(b);
    }

    let tolerance = 0.02;
    let rel_err_plus = ((slope_plus - profile.lambda) / profile.lambda).abs();
    let rel_err_minus = ((slope_minus - profile.mu) / profile.mu).abs();
    let passed = rel_err_plus <= tolerance && rel_err_minus <= tolerance && c1 > 0.0;
    Ok(TailReport {
        slope_plus,
        slope_minus,
        lambda: profile.lambda,
        mu: profile.mu,
        rel_err_plus,
        rel_err_minus,
        c1,
        c2,
        tolerance,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cubic(theta: f64) -> Nonlinearity {
        Nonlinearity::cubic(theta).unwrap()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn grid_contains_zero() {
        let g = WaveGrid::default();
        assert_eq!(g.n_points, 8001);
        assert_eq!(g.xi(g.zero_index()), 0.0);
        assert!(WaveGrid::new(-1.0, 2.0, 5).is_err());
        assert!(WaveGrid::new(1.0, 2.0, 5).is_err());
    }

    #[test]
    fn rates_for_cubic() {
        let f = cubic(0.25);
        let (l, m) = decay_rates(&f, 2f64.sqrt() / 4.0);
        assert!((l + INV_SQRT2).abs() < 1e-14);
        assert!((m - INV_SQRT2).abs() < 1e-14);
        let (l, m) = rates_from(-1.0, -1.0, 0.0);
        assert_eq!((l, m), (-1.0, 1.0));
    }

    #[test]
    fn closed_form_profile() {
        let g = WaveGrid::with_spacing(-30.0, 30.0, 0.05).unwrap();
        let p = exact_cubic_wave(0.25, g).unwrap();
        assert_eq!(p.phi[g.zero_index()], 0.25);
        assert!((p.c - 2f64.sqrt() / 4.0).abs() < 1e-15);
        // analytic residual via the closed-form derivatives
        let f = cubic(0.25);
        for i in 0..g.n_points {
            let (u, du) = (p.phi[i], p.phi_prime[i]);
            let d2 = -INV_SQRT2 * du * (1.0 - 2.0 * u);
            assert!((d2 + p.c * du + f.f(u)).abs() < 1e-12);
        }
        let r = p.discrete_residual(&f);
        assert!(r.iter().all(|x| x.abs() < 1e-3));
        assert!(exact_cubic_wave(0.5, g).is_err());
    }

    #[test]
    fn rate_constraint() {
        let p = exact_cubic_wave(0.25, WaveGrid::with_spacing(-20.0, 20.0, 0.1).unwrap()).unwrap();
        assert!((rate_constraint_bound(&p) - (INV_SQRT2 - 2f64.sqrt() / 8.0)).abs() < 1e-14);
        assert!(check_rate_constraint(0.1, &p));
        assert!(!check_rate_constraint(0.6, &p));
        assert!(!check_rate_constraint(0.0, &p));
    }

    #[test]
    fn newton_matches_closed_form() {
        let f = cubic(0.25);
        let g = WaveGrid::default();
        let p = solve_wave(&f, g, &WaveSolveOptions::default()).unwrap();
        let exact = exact_cubic_wave(0.25, g).unwrap();
        assert!((p.c - exact.c).abs() < 1e-5, "c = {}", p.c);
        assert!(max_diff(&p.phi, &exact.phi) <= 1e-4);
        assert!(p.residual_inf <= 1e-10);
        assert_eq!(p.phi[g.zero_index()], 0.25);
        assert!(p.phi.windows(2).all(|w| w[1] < w[0]));
        assert!(p.phi_prime.iter().all(|&d| d < 0.0));
        let (l, m) = (p.lambda, p.mu);
        assert!((l * l + p.c * l + f.f_prime(0.0)).abs() < 1e-10);
        assert!((m * m + p.c * m + f.f_prime(1.0)).abs() < 1e-10);
    }

    #[test]
    fn second_order_convergence() {
        let f = cubic(0.3);
        let err = |h: f64| {
            let g = WaveGrid::with_spacing(-30.0, 30.0, h).unwrap();
            let p = solve_wave(&f, g, &WaveSolveOptions::default()).unwrap();
            max_diff(&p.phi, &exact_cubic_wave(0.3, g).unwrap().phi)
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn speed_ignores_guess_shift() {
        let f = cubic(0.25);
        let g = WaveGrid::with_spacing(-30.0, 30.0, 0.05).unwrap();
        let base = solve_wave(&f, g, &WaveSolveOptions::default()).unwrap();
        for shift in [-3.0, 2.0] {
            let opts = WaveSolveOptions { guess_shift: shift, ..Default::default() };
            let p = solve_wave(&f, g, &opts).unwrap();
            assert!((p.c - base.c).abs() < 1e-8);
            assert!(max_diff(&p.phi, &base.phi) < 1e-8);
        }
    }

    #[test]
    fn reflected_problem_reverses_speed() {
        let g = WaveGrid::with_spacing(-30.0, 30.0, 0.05).unwrap();
        let a = solve_wave(&cubic(0.3), g, &WaveSolveOptions::default()).unwrap();
        let b = solve_wave(&cubic(0.7), g, &WaveSolveOptions::default()).unwrap();
        assert!((a.c + b.c).abs() < 1e-8, "{} vs {}", a.c, b.c);
    }

    #[test]
    fn tabulated_cubic_gives_same_wave() {
        let f = cubic(0.25);
        let t = Nonlinearity::tabulate(&f, 201).unwrap();
        let g = WaveGrid::with_spacing(-30.0, 30.0, 0.05).unwrap();
        let a = solve_wave(&f, g, &WaveSolveOptions::default()).unwrap();
        let b = solve_wave(&t, g, &WaveSolveOptions::default()).unwrap();
        assert!((a.c - b.c).abs() < 1e-9);
    }

    #[test]
    fn derivative_is_consistent() {
        let f = cubic(0.25);
        let g = WaveGrid::with_spacing(-30.0, 30.0, 0.05).unwrap();
        let p = solve_wave(&f, g, &WaveSolveOptions::default()).unwrap();
        let h = g.h();
        for i in 1..g.n_points - 1 {
            let cd = (p.phi[i + 1] - p.phi[i - 1]) / (2.0 * h);
            assert!((cd - p.phi_prime[i]).abs() < 0.05 * h * h);
        }
    }

    #[test]
    fn tails_of_exact_and_numerical_waves() {
        let g = WaveGrid::default();
        let exact = exact_cubic_wave(0.25, g).unwrap();
        let r = check_tail_estimates(&exact).unwrap();
        assert!((r.slope_plus + INV_SQRT2).abs() < 1e-6, "{}", r.slope_plus);
        assert!((r.slope_minus - INV_SQRT2).abs() < 1e-6, "{}", r.slope_minus);
        assert!(r.passed && r.c1 > 0.0 && r.c2 >= r.c1);

        let p = solve_wave(&cubic(0.25), g, &WaveSolveOptions::default()).unwrap();
        assert!(check_tail_estimates(&p).unwrap().passed);
    }

    #[test]
    fn degenerate_profiles_are_flagged() {
        let g = WaveGrid::with_spacing(-40.0, 40.0, 1.0).unwrap();
        let mut p = exact_cubic_wave(0.25, g).unwrap();
        assert!(matches!(
            check_tail_estimates(&p),
            Err(WaveError::FitWindowUnderResolved { .. })
        ));
        let g = WaveGrid::default();
        p = exact_cubic_wave(0.25, g).unwrap();
        p.phi.iter_mut().for_each(|v| *v = 0.5);
        assert!(!check_tail_estimates(&p).unwrap().passed);
    }

    /// Independent oracle: shoot from the left tail with RK4 and bisect on
    /// the speed until the trajectory neither overshoots 0 nor turns back.
    #[test]
    fn shooting_oracle_agrees() {
        let f = cubic(0.25);
        let shoot = |c: f64| -> bool {
            // true: crossed below zero (speed too small)
            let (_, mu) = decay_rates(&f, c);
            let eps = 1e-8;
            let mut u = 1.0 - eps;
            let mut v = -mu * eps;
            let dt = 1e-3;
            let rhs = |u: f64, v: f64| (v, -c * v - f.f(u));
            for _ in 0..200_000 {
                let (k1u, k1v) = rhs(u, v);
                let (k2u, k2v) = rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v);
                let (k3u, k3v) = rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v);
                let (k4u, k4v) = rhs(u + dt * k3u, v + dt * k3v);
                u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
                v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
                if u < 0.0 {
                    return true;
                }
                if v > 0.0 {
                    return false;
                }
            }
            false
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        assert!(shoot(lo) && !shoot(hi));
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if shoot(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c_shoot = 0.5 * (lo + hi);
        let p = solve_wave(&f, WaveGrid::default(), &WaveSolveOptions::default()).unwrap();
        assert!((c_shoot - p.c).abs() < 1e-5, "shooting {c_shoot} vs newton {}", p.c);
    }
}
