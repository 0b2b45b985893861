//! Splitting a near-wave state as `phi(. + chi) + v` with `<e*, v> = 0`.

use crate::model::FrontModel;
use crate::numerics::{cubic_lagrange_eval, sup_norm, trapezoid};

use super::SimError;

/// Samples of a state on a uniform grid, with the exponential closures of
/// the wave tails used outside it.
#[derive(Debug, Clone, Copy)]
pub struct GridState<'a> {
    pub x_min: f64,
    pub h: f64,
    pub u: &'a [f64],
}

impl GridState<'_> {
    pub fn x_max(&self) -> f64 {
        self.x_min + (self.u.len() - 1) as f64 * self.h
    }

    /// Cubic interpolation inside, tail extensions with rates `(lambda, mu)`
    /// outside.
    pub fn eval(&self, x: f64, lambda: f64, mu: f64) -> f64 {
        let n = self.u.len();
        if x > self.x_max() {
            return self.u[n - 1] * (lambda * (x - self.x_max())).exp();
        }
        if x < self.x_min {
            return 1.0 - (1.0 - self.u[0]) * (mu * (x - self.x_min)).exp();
        }
        cubic_lagrange_eval(self.x_min, self.h, self.u, x)
    }
}

/// `u~(xi) = u(xi + origin)` on the wave grid.
pub fn resample_moving_frame(model: &FrontModel, state: GridState<'_>, origin: f64) -> Vec<f64> {
    let g = &model.wave.grid;
    (0..g.n_points)
        .map(|i| state.eval(g.xi(i) + origin, model.wave.lambda, model.wave.mu))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackResult {
    pub chi: f64,
    /// Range part `u~ - phi(. + chi)` on the wave grid.
    pub v: Vec<f64>,
    pub v_sup: f64,
    /// `<e*, v>`, zero up to the root tolerance.
    pub pairing: f64,
    pub iterations: usize,
}

/// Default smallness threshold for the range part.
pub const DEFAULT_EPS1: f64 = 0.1;

fn shifted_wave(model: &FrontModel, chi: f64) -> (Vec<f64>, Vec<f64>) {
    let g = &model.wave.grid;
    (0..g.n_points).map(|i| model.wave.eval(g.xi(i) + chi)).unzip()
}

/// Finds `chi` near `chi_prev` with `<e*, u~ - phi(. + chi)> = 0`.
///
/// Safeguarded Newton: a step that leaves the current bracket is replaced
/// by bisection. No sign change on `[chi_prev - 1, chi_prev + 1]`, or a
/// range part larger than `eps1`, counts as losing the front.
pub fn track_front(
    model: &FrontModel,
    u_tilde: &[f64],
    chi_prev: f64,
    eps1: f64,
) -> Result<TrackResult, SimError> {
    let proj = &model.proj;
    if u_tilde.len() != proj.grid.n_points {
        return Err(SimError::BadConfig(format!(
            "state has {} samples, wave grid has {}",
            u_tilde.len(),
            proj.grid.n_points
        )));
    }
    let base = proj.pair_unchecked(u_tilde);
    let g_and_dg = |chi: f64| {
        let (p, dp) = shifted_wave(model, chi);
        (base - proj.pair_unchecked(&p), -proj.pair_unchecked(&dp))
    };

    let (mut a, mut b) = (chi_prev - 1.0, chi_prev + 1.0);
    let (ga, _) = g_and_dg(a);
    let (gb, _) = g_and_dg(b);
    if !(ga * gb <= 0.0) {
        return Err(SimError::TrackingLost(format!(
            "no phase root in [{a}, {b}] (G = {ga:e}, {gb:e})"
        )));
    }
    let a_negative = ga < 0.0;
    let mut chi = chi_prev;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (g, dg) = g_and_dg(chi);
        if g.abs() <= 1e-15 || iterations > 100 {
            break;
        }
        if (g < 0.0) == a_negative {
            a = chi;
        } else {
            b = chi;
        }
        let newton = chi - g / dg;
        let next = if dg != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - chi).abs() <= 1e-15 * (1.0 + chi.abs()) || (b - a) <= 1e-15 {
            chi = next;
            break;
        }
        chi = next;
    }

    let (p, _) = shifted_wave(model, chi);
    let v: Vec<f64> = u_tilde.iter().zip(&p).map(|(u, q)| u - q).collect();
    let v_sup = sup_norm(&v);
    if v_sup > eps1 {
        return Err(SimError::TrackingLost(format!(
            "range part |v| = {v_sup:.3e} exceeds eps1 = {eps1}"
        )));
    }
    let pairing = proj.pair_unchecked(&v);
    Ok(TrackResult { chi, v, v_sup, pairing, iterations })
}

/// `|w|_2` for `w = e^{c xi / 2} v`, trapezoid rule on the wave grid.
pub fn w_energy(model: &FrontModel, v: &[f64]) -> f64 {
    let g = &model.wave.grid;
    let c = model.wave.c;
    let vals: Vec<f64> = (0..g.n_points)
        .map(|i| (c * g.xi(i)).exp() * v[i] * v[i])
        .collect();
    trapezoid(&vals, g.h()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Quadrature;
    use crate::wave::{exact_cubic_wave, WaveGrid};
    use crate::Nonlinearity;

    fn model() -> FrontModel {
        let g = WaveGrid::with_spacing(-30.0, 30.0, 0.02).unwrap();
        let w = exact_cubic_wave(0.25, g).unwrap();
        FrontModel::from_profile(Nonlinearity::cubic(0.25).unwrap(), w, Quadrature::Trapezoid).unwrap()
    }

    #[test]
    fn pure_translate() {
        let m = model();
        for s in [0.0, 0.3, -0.77] {
            let u: Vec<f64> = m.wave.grid.nodes().iter().map(|&x| m.wave.phi_at(x + s)).collect();
            let r = track_front(&m, &u, 0.0, DEFAULT_EPS1).unwrap();
            assert!((r.chi - s).abs() < 1e-10, "{} vs {s}", r.chi);
            assert!(r.v_sup < 1e-10);
            // decomposition is algebraically exact
            let g = &m.wave.grid;
            for i in 0..g.n_points {
                let back = m.wave.phi_at(g.xi(i) + r.chi) + r.v[i];
                assert!((back - u[i]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn orthogonal_perturbation_barely_moves_phase() {
        let m = model();
        let bump: Vec<f64> = m.wave.grid.nodes().iter().map(|x| (-(x - 1.0).powi(2)).exp()).collect();
        let q = m.proj.project_range(&bump).unwrap();
        let scale = 1e-3 / sup_norm(&q);
        let u: Vec<f64> = m.wave.phi.iter().zip(&q).map(|(p, d)| p + scale * d).collect();
        let r = track_front(&m, &u, 0.0, DEFAULT_EPS1).unwrap();
        assert!(r.chi.abs() < 1e-6, "chi = {}", r.chi);
        assert!((r.v_sup - 1e-3).abs() < 1e-5);
        assert!(r.pairing.abs() < 1e-10);

        // brute-force oracle: scan the pairing on a fine chi grid
        let pairing = |chi: f64| {
            let p: Vec<f64> = m.wave.grid.nodes().iter().map(|&x| m.wave.phi_at(x + chi)).collect();
            let diff: Vec<f64> = u.iter().zip(&p).map(|(a, b)| a - b).collect();
            m.proj.pair(&diff).unwrap()
        };
        let mut best = (f64::INFINITY, 0.0);
        for k in -100..=100 {
            let chi = k as f64 * 1e-7;
            let g = pairing(chi).abs();
            if g < best.0 {
                best = (g, chi);
            }
        }
        assert!((best.1 - r.chi).abs() <= 1e-7);
    }

    #[test]
    fn far_state_is_lost() {
        let m = model();
        let u = vec![0.5; m.wave.grid.n_points];
        assert!(matches!(track_front(&m, &u, 0.0, DEFAULT_EPS1), Err(SimError::TrackingLost(_))));
        let far: Vec<f64> = m.wave.grid.nodes().iter().map(|&x| m.wave.phi_at(x + 5.0)).collect();
        assert!(track_front(&m, &far, 0.0, DEFAULT_EPS1).is_err());
    }

    #[test]
    fn energy_of_zero_and_oracle() {
        let m = model();
        assert_eq!(w_energy(&m, &vec![0.0; m.wave.grid.n_points]), 0.0);
        // v = phi' e^{-c xi / 2} gives |w|^2 = ∫ phi'^2
        let c = m.wave.c;
        let v: Vec<f64> = (0..m.wave.grid.n_points)
            .map(|i| m.wave.phi_prime[i] * (-0.5 * c * m.wave.grid.xi(i)).exp())
            .collect();
        // ∫ phi'^2 for the exact cubic wave: ∫ phi^2 (1-phi)^2 / 2 = sqrt(2)/12
        let oracle = (2f64.sqrt() / 12.0).sqrt();
        assert!((w_energy(&m, &v) - oracle).abs() < 1e-8);
    }

    #[test]
    fn grid_state_tails() {
        let u = [1.0 - 1e-6, 0.5, 1e-6];
        let s = GridState { x_min: 0.0, h: 1.0, u: &u };
        assert!((s.eval(3.0, -1.0, 1.0) - 1e-6 * (-1.0f64).exp()).abs() < 1e-18);
        assert!((s.eval(-1.0, -1.0, 1.0) - (1.0 - 1e-6 * (-1.0f64).exp())).abs() < 1e-15);
    }
}
