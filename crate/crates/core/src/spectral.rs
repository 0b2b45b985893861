//! Projection onto the translation mode and the spectral gap of the
//! linearisation `L v = v'' + c v' + f'(phi) v` around the wave.
//!
//! The kernel of `L` is spanned by `phi'`. Its adjoint eigenfunction is
//! `e^{c xi} phi'`, which gives the pairing
//! `<e*, psi> = (1/Lambda) ∫ e^{c xi} phi' psi`. After the substitution
//! `w = e^{c xi / 2} v` the operator becomes the Schrödinger form
//! `-w'' + (c^2/4 - f'(phi)) w`, whose two lowest eigenvalues give the gap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlinearity::Nonlinearity;
use crate::numerics::{fit_line, sup_norm, BandedMatrix, Quadrature, TridiagonalLu};
use crate::wave::{WaveGrid, WaveProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid function has {got} samples, grid has {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("spectral gap is not positive: rho1 = {0:e}")]
    DegenerateGap(f64),
    #[error("Simpson quadrature needs an odd number of nodes, got {0}")]
    SimpsonNeedsOddNodes(usize),
}

/// Everything needed to evaluate `<e*, .>`, `P` and `Q` on the wave grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionContext {
    pub grid: WaveGrid,
    pub c: f64,
    pub phi_prime: Vec<f64>,
    /// `e^{c xi} phi'(xi)` at the nodes.
    pub weight: Vec<f64>,
    pub lambda_norm: f64,
    pub quadrature: Quadrature,
    /// Quadrature weight times `e^{c xi} phi' / Lambda`.
    coeff: Vec<f64>,
}

impl ProjectionContext {
    pub fn new(profile: &WaveProfile, quadrature: Quadrature) -> Result<Self, SpectralError> {
        let g = profile.grid;
        let qw = quadrature
            .weights(g.n_points, g.h())
            .ok_or(SpectralError::SimpsonNeedsOddNodes(g.n_points))?;
        let weight: Vec<f64> = (0..g.n_points)
            .map(|i| (profile.c * g.xi(i)).exp() * profile.phi_prime[i])
            .collect();
        let lambda_norm: f64 = (0..g.n_points)
            .map(|i| qw[i] * weight[i] * profile.phi_prime[i])
            .sum();
        let coeff = (0..g.n_points).map(|i| qw[i] * weight[i] / lambda_norm).collect();
        Ok(Self {
            grid: g,
            c: profile.c,
            phi_prime: profile.phi_prime.clone(),
            weight,
            lambda_norm,
            quadrature,
            coeff,
        })
    }

    fn check(&self, psi: &[f64]) -> Result<(), SpectralError> {
        if psi.len() != self.grid.n_points {
            return Err(SpectralError::ShapeMismatch {
                expected: self.grid.n_points,
                got: psi.len(),
            });
        }
        Ok(())
    }

    /// `<e*, psi>`.
    pub fn pair(&self, psi: &[f64]) -> Result<f64, SpectralError> {
        self.check(psi)?;
        Ok(self.pair_unchecked(psi))
    }

    pub(crate) fn pair_unchecked(&self, psi: &[f64]) -> f64 {
        self.coeff.iter().zip(psi).map(|(a, b)| a * b).sum()
    }

    /// `P psi = <e*, psi> phi'`.
    pub fn project_kernel(&self, psi: &[f64]) -> Result<Vec<f64>, SpectralError> {
        let a = self.pair(psi)?;
        Ok(self.phi_prime.iter().map(|d| a * d).collect())
    }

    /// `Q psi = psi - P psi`.
    pub fn project_range(&self, psi: &[f64]) -> Result<Vec<f64>, SpectralError> {
        let a = self.pair(psi)?;
        Ok(psi.iter().zip(&self.phi_prime).map(|(p, d)| p - a * d).collect())
    }

    pub(crate) fn project_range_in_place(&self, psi: &mut [f64]) {
        let a = self.pair_unchecked(psi);
        psi.iter_mut().zip(&self.phi_prime).for_each(|(p, d)| *p -= a * d);
    }
}

/// Symmetric tridiagonal matrix on the interior nodes (Dirichlet ends).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples `i` and `i + 1`; length `diag.len() - 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let n = self.dim();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for a known eigenvalue by inverse iteration,
    /// orthogonalised against `deflate`.
    pub fn eigenvector(&self, value: f64, deflate: &[&[f64]]) -> Vec<f64> {
        let n = self.dim();
        let scale = self.diag.iter().fold(1.0_f64, |m, d| m.max(d.abs()));
        let shift = value - 1e-10 * scale;
        let lower: Vec<f64> = (0..n).map(|i| if i > 0 { self.off[i - 1] } else { 0.0 }).collect();
        let upper: Vec<f64> = (0..n).map(|i| if i + 1 < n { self.off[i] } else { 0.0 }).collect();
        let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let lu = TridiagonalLu::new(&lower, &diag, &upper);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.37).sin()).collect();
        for _ in 0..6 {
            for d in deflate {
                let a: f64 = x.iter().zip(d.iter()).map(|(p, q)| p * q).sum();
                x.iter_mut().zip(d.iter()).for_each(|(p, q)| *p -= a * q);
            }
            lu.solve_in_place(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        // fix sign: largest component positive
        let imax = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap();
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }
}

/// `-w'' + (c^2/4 - f'(phi)) w` with second-order differences on the
/// interior nodes of the wave grid.
pub fn symmetrized_operator(f: &Nonlinearity, profile: &WaveProfile) -> SymTridiagonal {
    let h = profile.h();
    let n = profile.grid.n_points;
    let q = profile.c * profile.c / 4.0;
    let diag = (1..n - 1)
        .map(|i| 2.0 / (h * h) + q - f.f_prime(profile.phi[i]))
        .collect();
    let off = vec![-1.0 / (h * h); n - 3];
    SymTridiagonal { diag, off }
}

pub fn potential(f: &Nonlinearity, profile: &WaveProfile, i: usize) -> f64 {
    profile.c * profile.c / 4.0 - f.f_prime(profile.phi[i])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Lowest eigenvalue of the symmetrised operator; zero in the continuum.
    pub rho0: f64,
    /// Second eigenvalue before subtracting `rho0`.
    pub rho1_raw: f64,
    pub rho1: f64,
    pub varpi: f64,
    pub sup_f_prime: f64,
    pub h: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    /// Eigenvectors on the full grid (zero at both ends), unit 2-norm.
    #[serde(skip)]
    pub ground_vector: Vec<f64>,
    #[serde(skip)]
    pub second_vector: Vec<f64>,
}

pub fn spectral_gap(f: &Nonlinearity, profile: &WaveProfile) -> Result<SpectralReport, SpectralError> {
    let a = symmetrized_operator(f, profile);
    let rho0 = a.eigenvalue(0);
    let rho1_raw = a.eigenvalue(1);
    let rho1 = rho1_raw - rho0;
    if !(rho1 > 0.0) {
        return Err(SpectralError::DegenerateGap(rho1));
    }
    let v0 = a.eigenvector(rho0, &[]);
    let v1 = a.eigenvector(rho1_raw, &[&v0]);
    let pad = |v: Vec<f64>| {
        let mut out = Vec::with_capacity(v.len() + 2);
        out.push(0.0);
        out.extend(v);
        out.push(0.0);
        out
    };
    let sup_f_prime = f.sup_norm_f_prime();
    Ok(SpectralReport {
        rho0,
        rho1_raw,
        rho1,
        varpi: rho1 / sup_f_prime,
        sup_f_prime,
        h: profile.h(),
        xi_min: profile.grid.xi_min,
        xi_max: profile.grid.xi_max,
        ground_vector: pad(v0),
        second_vector: pad(v1),
    })
}

/// Second eigenvalue of the symmetrised operator for the cubic with the
/// exact wave on the whole line: a Rosen-Morse well with a bound state
/// `3 theta (1 - theta) / 2` when `theta >= 1/4`, otherwise only the
/// continuum starting at `c^2/4 - f'(0) = (1 + 2 theta)^2 / 8`.
pub fn cubic_gap_closed_form(theta: f64) -> f64 {
    let edge = (1.0 + 2.0 * theta).powi(2) / 8.0;
    let bound = 1.5 * theta * (1.0 - theta);
    bound.min(edge)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayCheckOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Fit window as fractions of `t_end`.
    pub fit_from: f64,
    pub fit_to: f64,
}

impl Default for DecayCheckOptions {
    fn default() -> Self {
        Self {
            t_end: 30.0,
            dt: 0.02,
            fit_from: 0.5,
            fit_to: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCheckReport {
    pub rho: f64,
    /// Slope of `-log |v|_inf` over the fit window; infinite when `v = 0`.
    pub fitted_rate: f64,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// `max |v(t)|_inf / |v(0)|_inf`, the constant in front of the exponential.
    pub growth_constant: f64,
    pub passed: bool,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Crank-Nicolson matrix pieces for `L` with the wave-solver stencil and
/// homogeneous Dirichlet ends.
fn linearized_operator(f: &Nonlinearity, profile: &WaveProfile) -> BandedMatrix {
    let n = profile.grid.n_points;
    let h = profile.h();
    let c = profile.c;
    let mut m = BandedMatrix::zeros(n, 1, 1);
    for i in 1..n - 1 {
        m.set(i, i - 1, 1.0 / (h * h) - c / (2.0 * h));
        m.set(i, i, -2.0 / (h * h) + f.f_prime(profile.phi[i]));
        m.set(i, i + 1, 1.0 / (h * h) + c / (2.0 * h));
    }
    m
}

/// Evolves `v_t = L v` from `v0` and fits the exponential decay of the
/// sup norm.
///
/// The kernel component is frozen: each step only adds the range part of
/// the increment. This is exact for the continuous semigroup, which
/// commutes with `P`, and stops the discretisation error of the projector
/// from feeding a non-decaying floor.
pub fn semigroup_decay_check(
    f: &Nonlinearity,
    profile: &WaveProfile,
    ctx: &ProjectionContext,
    v0: &[f64],
    rho: f64,
    options: &DecayCheckOptions,
) -> Result<DecayCheckReport, SpectralError> {
    ctx.check(v0)?;
    let n = v0.len();
    let dt = options.dt;
    let steps = (options.t_end / dt).round() as usize;
    let l = linearized_operator(f, profile);

    let mut lhs = BandedMatrix::zeros(n, 1, 1);
    for i in 0..n {
        for j in i.saturating_sub(1)..=(i + 1).min(n - 1) {
            let id = if i == j { 1.0 } else { 0.0 };
            lhs.set(i, j, id - 0.5 * dt * l.get(i, j));
        }
    }
    lhs.factor();

    let mut v = v0.to_vec();
    v[0] = 0.0;
    v[n - 1] = 0.0;
    let mut times = vec![0.0];
    let mut norms = vec![sup_norm(&v)];
    let mut lv = vec![0.0; n];
    for k in 1..=steps {
        l.mul_vec(&v, &mut lv);
        let mut next: Vec<f64> = v.iter().zip(&lv).map(|(a, b)| a + 0.5 * dt * b).collect();
        next[0] = 0.0;
        next[n - 1] = 0.0;
        lhs.solve_in_place(&mut next);
        let mut inc: Vec<f64> = next.iter().zip(&v).map(|(a, b)| a - b).collect();
        ctx.project_range_in_place(&mut inc);
        v.iter_mut().zip(&inc).for_each(|(a, d)| *a += d);
        times.push(k as f64 * dt);
        norms.push(sup_norm(&v));
    }

    let initial_norm = norms[0];
    let final_norm = *norms.last().unwrap();
    let fitted_rate = if initial_norm == 0.0 {
        f64::INFINITY
    } else {
        let (lo, hi) = (options.fit_from * options.t_end, options.fit_to * options.t_end);
        let (xs, ys): (Vec<f64>, Vec<f64>) = times
            .iter()
            .zip(&norms)
            .filter(|(t, v)| **t >= lo && **t <= hi && **v > 0.0)
            .map(|(t, v)| (*t, v.ln()))
            .unzip();
        match fit_line(&xs, &ys) {
            Some(line) => -line.slope,
            None => f64::INFINITY,
        }
    };
    let growth_constant = if initial_norm == 0.0 {
        0.0
    } else {
        norms.iter().fold(0.0_f64, |m, v| m.max(*v)) / initial_norm
    };
    Ok(DecayCheckReport {
        rho,
        fitted_rate,
        initial_norm,
        final_norm,
        growth_constant,
        passed: fitted_rate >= rho,
        times,
        norms,
    })
}
