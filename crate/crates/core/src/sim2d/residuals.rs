//! What the mapped problem leaves over when read as the straight-cylinder
//! problem `u_t = u_xx + u_z'z' + f(u)` with `z' = W z`, `W` the limit
//! width: `R1` in the interior and `R2 = d u / d nu_inf` on the boundary.

use serde::{Deserialize, Serialize};

use crate::numerics::{fit_line, LineFit};

use super::domain::DomainSpec2D;
use super::operator::{centred_derivatives, MappedGrid};

/// `R1` for `N = 1` in unit-strip variables:
/// `z_xx u_z + 2 z_x u_xz + (z_x^2 + 1/w^2 - 1/W^2) u_zz`.
pub fn r1_pointwise(z_x: f64, z_xx: f64, inv_w: f64, width_inf: f64, u_z: f64, u_xz: f64, u_zz: f64) -> f64 {
    z_xx * u_z + 2.0 * z_x * u_xz + (z_x * z_x + inv_w * inv_w - 1.0 / (width_inf * width_inf)) * u_zz
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub r1_sup: f64,
    pub r2_sup: f64,
}

/// Sup norms of `R1` over interior nodes and `R2` over boundary nodes.
pub fn residual_diagnostics(grid: &MappedGrid, domain: &DomainSpec2D, u: &[f64]) -> ResidualNorms {
    let w_inf = domain.width_inf();
    let mut r1_sup = 0.0_f64;
    for j in 1..grid.nz - 1 {
        for i in 1..grid.nx - 1 {
            let k = grid.idx(i, j);
            let d = centred_derivatives(grid, u, i, j);
            let r = r1_pointwise(grid.z_x[k], grid.z_xx[k], grid.inv_w[i], w_inf, d.u_z, d.u_xz, d.u_zz);
            r1_sup = r1_sup.max(r.abs());
        }
    }
    let top = grid.nz - 1;
    let hz = grid.hz;
    let mut r2_sup = 0.0_f64;
    for i in 1..grid.nx {
        let at = |j: usize| u[grid.idx(i, j)];
        let bottom = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * hz);
        let upper = (3.0 * at(top) - 4.0 * at(top - 1) + at(top - 2)) / (2.0 * hz);
        r2_sup = r2_sup.max(bottom.abs().max(upper.abs()) / w_inf);
    }
    ResidualNorms { r1_sup, r2_sup }
}

/// Least-squares fit of `log R = log K + rate s` over the points with
/// `R > floor`.
pub fn fit_envelope(s: &[f64], values: &[f64], floor: f64) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = s
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > floor)
        .map(|(&a, &v)| (a, v.ln()))
        .unzip();
    if xs.len() < 3 {
        return None;
    }
    fit_line(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::super::domain::{build_domain, BoundaryCurve, DomainParams};
    use super::super::operator::GridSpec2D;
    use super::*;

    /// The general residual with `Phi(x, y) = W (y - b_-)/w` and `u` read in
    /// `z' = W z`, expanded term by term.
    fn r1_expanded(zx: f64, zxx: f64, inv_w: f64, w: f64, uz: f64, uxz: f64, uzz: f64) -> f64 {
        let (phi_x, phi_xx, phi_y, phi_yy) = (w * zx, w * zxx, w * inv_w, 0.0);
        let (v_z, v_xz, v_zz) = (uz / w, uxz / w, uzz / (w * w));
        v_z * phi_xx + 2.0 * v_xz * phi_x + phi_x * v_zz * phi_x + v_z * phi_yy + v_zz * (phi_y * phi_y - 1.0)
    }

    #[test]
    fn r1_matches_expanded_sum() {
        let cases = [
            (0.3, -0.1, 0.8, 1.0, 0.5, -2.0, 3.0),
            (-1.2, 0.7, 0.25, 2.5, 1.5, 0.2, -0.7),
            (0.0, 0.0, 1.0, 1.0, 4.0, 4.0, 4.0),
        ];
        for (zx, zxx, iw, w, uz, uxz, uzz) in cases {
            let a = r1_pointwise(zx, zxx, iw, w, uz, uxz, uzz);
            let b = r1_expanded(zx, zxx, iw, w, uz, uxz, uzz);
            assert!((a - b).abs() <= 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn r1_on_grid_matches_expanded_sum_for_quadratic_field() {
        // centred differences are exact on quadratics
        let d = build_domain(&DomainParams {
            b_plus: BoundaryCurve::sigmoid(1.0, 0.5, 0.25, 0.0),
            ..Default::default()
        })
        .unwrap();
        let g = MappedGrid::new(&d, GridSpec2D { x_min: -5.0, x_max: 5.0, hx: 0.25, nz: 9 }).unwrap();
        let mut u = vec![0.0; g.len()];
        for j in 0..g.nz {
            for i in 0..g.nx {
                let (x, z) = (g.x(i), g.z(j));
                u[g.idx(i, j)] = 1.0 + 0.5 * x * z - 2.0 * z * z + 0.1 * x * x;
            }
        }
        let mut worst = 0.0_f64;
        for j in 1..g.nz - 1 {
            for i in 1..g.nx - 1 {
                let k = g.idx(i, j);
                let (x, z) = (g.x(i), g.z(j));
                let (uz, uxz, uzz) = (0.5 * x - 4.0 * z, 0.5, -4.0);
                let want = r1_expanded(g.z_x[k], g.z_xx[k], g.inv_w[i], 1.0, uz, uxz, uzz);
                let dd = centred_derivatives(&g, &u, i, j);
                let got = r1_pointwise(g.z_x[k], g.z_xx[k], g.inv_w[i], 1.0, dd.u_z, dd.u_xz, dd.u_zz);
                worst = worst.max((got - want).abs());
            }
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn strip_residuals_vanish() {
        let d = build_domain(&DomainParams::default()).unwrap();
        let g = MappedGrid::new(&d, GridSpec2D { x_min: -5.0, x_max: 5.0, hx: 0.25, nz: 9 }).unwrap();
        let u = g.sample(|x, _| (-x).exp() / (1.0 + (-x).exp()));
        let r = residual_diagnostics(&g, &d, &u);
        assert_eq!(r.r1_sup, 0.0);
        assert!(r.r2_sup < 1e-12);
    }
}
