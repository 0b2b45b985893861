//! The Laplacian in mapped coordinates `(x, z)` with `z = (y - b_-)/w`:
//!
//! `u_xx + 2 z_x u_xz + (z_x^2 + 1/w^2) u_zz + z_xx u_z`,
//!
//! and the physical Neumann condition, which becomes `u_z = beta u_x` on
//! `z = 0, 1`.

use serde::{Deserialize, Serialize};

use super::domain::{DomainSpec2D, Section};
use super::Sim2DError;

/// Tensor grid on `[x_min, x_max] x [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec2D {
    pub x_min: f64,
    pub x_max: f64,
    pub hx: f64,
    /// Nodes across the section, boundaries included.
    pub nz: usize,
}

impl Default for GridSpec2D {
    fn default() -> Self {
        Self { x_min: -60.0, x_max: 40.0, hx: 0.1, nz: 11 }
    }
}

impl GridSpec2D {
    pub fn nx(&self) -> usize {
        ((self.x_max - self.x_min) / self.hx).round() as usize + 1
    }

    pub fn validate(&self) -> Result<(), Sim2DError> {
        let s = (self.x_max - self.x_min) / self.hx;
        if !(self.hx > 0.0) || !(s >= 4.0) || (s - s.round()).abs() > 1e-6 {
            return Err(Sim2DError::BadConfig(format!(
                "x grid must have h > 0 and a whole number (>= 4) of cells, got {self:?}"
            )));
        }
        if self.nz < 5 {
            return Err(Sim2DError::BadConfig(format!("nz must be at least 5, got {}", self.nz)));
        }
        Ok(())
    }
}

/// Grid with per-node map data. Fields are stored section by section:
/// node `(i, j)` lives at `j * nx + i`.
#[derive(Debug, Clone)]
pub struct MappedGrid {
    pub spec: GridSpec2D,
    pub nx: usize,
    pub nz: usize,
    pub hx: f64,
    pub hz: f64,
    pub sections: Vec<Section>,
    pub z_x: Vec<f64>,
    pub z_xx: Vec<f64>,
    pub inv_w: Vec<f64>,
    pub beta_minus: Vec<f64>,
    pub beta_plus: Vec<f64>,
}

impl MappedGrid {
    pub fn new(domain: &DomainSpec2D, spec: GridSpec2D) -> Result<Self, Sim2DError> {
        spec.validate()?;
        let nx = spec.nx();
        let nz = spec.nz;
        let hz = 1.0 / (nz - 1) as f64;
        let sections: Vec<Section> = (0..nx).map(|i| domain.section(spec.x_min + i as f64 * spec.hx)).collect();
        let mut z_x = vec![0.0; nx * nz];
        let mut z_xx = vec![0.0; nx * nz];
        for j in 0..nz {
            let z = j as f64 * hz;
            for (i, s) in sections.iter().enumerate() {
                z_x[j * nx + i] = s.z_x(z);
                z_xx[j * nx + i] = s.z_xx(z);
            }
        }
        for (i, s) in sections.iter().enumerate() {
            if !(s.w() > 0.0) {
                return Err(Sim2DError::PinchedDomain { x: spec.x_min + i as f64 * spec.hx, width: s.w() });
            }
        }
        Ok(Self {
            spec,
            nx,
            nz,
            hx: spec.hx,
            hz,
            inv_w: sections.iter().map(|s| 1.0 / s.w()).collect(),
            beta_minus: sections.iter().map(Section::beta_minus).collect(),
            beta_plus: sections.iter().map(Section::beta_plus).collect(),
            sections,
            z_x,
            z_xx,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn x(&self, i: usize) -> f64 {
        self.spec.x_min + i as f64 * self.hx
    }

    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.hz
    }

    pub fn y(&self, i: usize, j: usize) -> f64 {
        let s = &self.sections[i];
        s.bm[0] + self.z(j) * s.w()
    }

    /// Samples `g(x, y)` at the nodes.
    pub fn sample(&self, g: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for j in 0..self.nz {
            for i in 0..self.nx {
                out[self.idx(i, j)] = g(self.x(i), self.y(i, j));
            }
        }
        out
    }
}

/// Per-node coefficients of the mapped Laplacian.
#[derive(Debug, Clone)]
pub struct MappedOperator {
    pub cxx: Vec<f64>,
    /// Always `2 z_x`.
    pub cxz: Vec<f64>,
    pub czz: Vec<f64>,
    pub cz: Vec<f64>,
}

pub fn assemble_mapped_operator(grid: &MappedGrid) -> MappedOperator {
    let n = grid.len();
    let mut czz = vec![0.0; n];
    for j in 0..grid.nz {
        for i in 0..grid.nx {
            let k = grid.idx(i, j);
            let iw = grid.inv_w[i];
            czz[k] = grid.z_x[k] * grid.z_x[k] + iw * iw;
        }
    }
    MappedOperator {
        cxx: vec![1.0; n],
        cxz: grid.z_x.iter().map(|v| 2.0 * v).collect(),
        czz,
        cz: grid.z_xx.clone(),
    }
}

/// Centred first and second differences at an interior node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub u_x: f64,
    pub u_z: f64,
    pub u_xx: f64,
    pub u_xz: f64,
    pub u_zz: f64,
}

pub fn centred_derivatives(grid: &MappedGrid, u: &[f64], i: usize, j: usize) -> Derivatives {
    let at = |a: usize, b: usize| u[grid.idx(a, b)];
    let (hx, hz) = (grid.hx, grid.hz);
    Derivatives {
        u_x: (at(i + 1, j) - at(i - 1, j)) / (2.0 * hx),
        u_z: (at(i, j + 1) - at(i, j - 1)) / (2.0 * hz),
        u_xx: (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (hx * hx),
        u_zz: (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (hz * hz),
        u_xz: (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * hx * hz),
    }
}

impl MappedOperator {
    /// Applies the operator at interior nodes; boundary entries are zero.
    pub fn apply_interior(&self, grid: &MappedGrid, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; grid.len()];
        for j in 1..grid.nz - 1 {
            for i in 1..grid.nx - 1 {
                let k = grid.idx(i, j);
                let d = centred_derivatives(grid, u, i, j);
                out[k] = self.cxx[k] * d.u_xx + self.cxz[k] * d.u_xz + self.czz[k] * d.u_zz + self.cz[k] * d.u_z;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    Plus,
}

/// `u_z - beta u_x` at one boundary node, with a second-order one-sided
/// difference in `z` and a centred one in `x`; `scale` times the row
/// gives the outward normal derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannRow {
    pub i: usize,
    pub j: usize,
    /// Weights on rows `j`, `j +- 1`, `j +- 2` (towards the interior).
    pub z_weights: [f64; 3],
    /// Weights on columns `i - 1`, `i + 1`.
    pub x_weights: [f64; 2],
    pub scale: f64,
}

impl NeumannRow {
    pub fn apply(&self, grid: &MappedGrid, u: &[f64]) -> f64 {
        let step = |m: usize| match self.j {
            0 => self.j + m,
            _ => self.j - m,
        };
        let mut r = 0.0;
        for (m, w) in self.z_weights.iter().enumerate() {
            r += w * u[grid.idx(self.i, step(m))];
        }
        r + self.x_weights[0] * u[grid.idx(self.i - 1, self.j)] + self.x_weights[1] * u[grid.idx(self.i + 1, self.j)]
    }
}

/// Closure rows for one side at the x-interior nodes.
pub fn apply_neumann_mapped(grid: &MappedGrid, side: Side) -> Vec<NeumannRow> {
    let hz = grid.hz;
    let (j, sign, beta, slope_index) = match side {
        Side::Minus => (0, -1.0, &grid.beta_minus, 0),
        Side::Plus => (grid.nz - 1, 1.0, &grid.beta_plus, 1),
    };
    // u_z one-sided: (-3 u_j + 4 u_{j+1} - u_{j+2}) / (2 hz), mirrored on top
    let z_weights = [-3.0, 4.0, -1.0].map(|w| -sign * w / (2.0 * hz));
    (1..grid.nx - 1)
        .map(|i| {
            let s = &grid.sections[i];
            let b1 = if slope_index == 0 { s.bm[1] } else { s.bp[1] };
            let bx = beta[i] / (2.0 * grid.hx);
            NeumannRow {
                i,
                j,
                z_weights,
                x_weights: [bx, -bx],
                scale: sign * (1.0 + b1 * b1).sqrt() / s.w(),
            }
        })
        .collect()
}

/// Errors of the discrete operator and closure against a smooth field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedReport {
    pub hx: Vec<f64>,
    pub interior_error: Vec<f64>,
    pub boundary_error: Vec<f64>,
    pub interior_order: Vec<f64>,
    pub boundary_order: Vec<f64>,
}

impl ManufacturedReport {
    pub fn min_interior_order(&self) -> f64 {
        self.interior_order.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_boundary_order(&self) -> f64 {
        self.boundary_order.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Manufactured field `U = cos(x) y^2`: its Laplacian `(2 - y^2) cos x`
/// and its outward normal derivatives are known in closed form.
/// Both step sizes are halved `halvings` times starting from `base`.
pub fn manufactured_convergence(
    domain: &DomainSpec2D,
    base: GridSpec2D,
    halvings: usize,
) -> Result<ManufacturedReport, Sim2DError> {
    let u = |x: f64, y: f64| x.cos() * y * y;
    let lap = |x: f64, y: f64| (2.0 - y * y) * x.cos();
    let grad = |x: f64, y: f64| [-x.sin() * y * y, 2.0 * y * x.cos()];
    let mut rep = ManufacturedReport {
        hx: Vec::new(),
        interior_error: Vec::new(),
        boundary_error: Vec::new(),
        interior_order: Vec::new(),
        boundary_order: Vec::new(),
    };
    for level in 0..=halvings {
        let k = 1usize << level;
        let spec = GridSpec2D { hx: base.hx / k as f64, nz: (base.nz - 1) * k + 1, ..base };
        let grid = MappedGrid::new(domain, spec)?;
        let op = assemble_mapped_operator(&grid);
        let field = grid.sample(u);
        let applied = op.apply_interior(&grid, &field);
        // compare on the nodes shared with the coarsest grid, so the sup is
        // taken over the same points at every level
        let mut interior = 0.0_f64;
        for j in (k..grid.nz - 1).step_by(k) {
            for i in (k..grid.nx - 1).step_by(k) {
                let e = applied[grid.idx(i, j)] - lap(grid.x(i), grid.y(i, j));
                interior = interior.max(e.abs());
            }
        }
        let (nu_minus, nu_plus) = (|x| domain.normals(x).0, |x| domain.normals(x).1);
        let mut boundary = 0.0_f64;
        for (side, normal) in [(Side::Minus, &nu_minus as &dyn Fn(f64) -> [f64; 2]), (Side::Plus, &nu_plus)] {
            for row in apply_neumann_mapped(&grid, side).into_iter().filter(|r| r.i % k == 0) {
                let (x, y) = (grid.x(row.i), grid.y(row.i, row.j));
                let g = grad(x, y);
                let n = normal(x);
                let exact = g[0] * n[0] + g[1] * n[1];
                boundary = boundary.max((row.scale * row.apply(&grid, &field) - exact).abs());
            }
        }
        rep.hx.push(spec.hx);
        rep.interior_error.push(interior);
        rep.boundary_error.push(boundary);
    }
    let order = |e: &[f64]| e.windows(2).map(|w| (w[0] / w[1]).log2()).collect::<Vec<_>>();
    rep.interior_order = order(&rep.interior_error);
    rep.boundary_order = order(&rep.boundary_error);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::super::domain::{build_domain, BoundaryCurve, DomainParams};
    use super::*;

    fn widening() -> DomainSpec2D {
        build_domain(&DomainParams {
            b_plus: BoundaryCurve::sigmoid(1.0, 0.5, 0.5, 0.0),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn strip_reduces_to_plain_laplacian() {
        let d = build_domain(&DomainParams::default()).unwrap();
        let g = MappedGrid::new(&d, GridSpec2D { x_min: -2.0, x_max: 2.0, hx: 0.5, nz: 5 }).unwrap();
        let op = assemble_mapped_operator(&g);
        for k in 0..g.len() {
            assert_eq!((op.cxx[k], op.cxz[k], op.czz[k], op.cz[k]), (1.0, 0.0, 1.0, 0.0));
        }
        for row in apply_neumann_mapped(&g, Side::Plus) {
            assert_eq!(row.x_weights, [0.0, -0.0]);
        }
    }

    #[test]
    fn mixed_coefficient_is_twice_z_x() {
        let g = MappedGrid::new(&widening(), GridSpec2D { x_min: -4.0, x_max: 4.0, hx: 0.1, nz: 9 }).unwrap();
        let op = assemble_mapped_operator(&g);
        assert!(op.cxz.iter().zip(&g.z_x).all(|(a, b)| *a == 2.0 * b));
    }

    #[test]
    fn z_independent_field_satisfies_widening_closure_exactly() {
        // constant in y means constant in z and in x, whatever the map
        let g = MappedGrid::new(&widening(), GridSpec2D { x_min: -4.0, x_max: 4.0, hx: 0.1, nz: 9 }).unwrap();
        let u = vec![0.37; g.len()];
        for side in [Side::Minus, Side::Plus] {
            for row in apply_neumann_mapped(&g, side) {
                assert!(row.apply(&g, &u).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn manufactured_field_converges_at_second_order() {
        let base = GridSpec2D { x_min: -4.0, x_max: 4.0, hx: 0.2, nz: 6 };
        let rep = manufactured_convergence(&widening(), base, 3).unwrap();
        assert!(rep.min_interior_order() >= 1.9, "{rep:?}");
        assert!(rep.min_boundary_order() >= 1.9, "{rep:?}");
    }
}
