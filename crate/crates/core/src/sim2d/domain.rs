//! Planar cylinder-like domains `{b_-(x) < y < b_+(x)}` and the affine map
//! onto the unit strip.

use serde::{Deserialize, Serialize};

use crate::sim1d::logistic;

use super::Sim2DError;

/// `limit + amplitude * logistic(rate (x - center))`: constant at `-inf`,
/// converging there at rate `rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryCurve {
    pub limit: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub center: f64,
}

impl Default for BoundaryCurve {
    fn default() -> Self {
        Self { limit: 0.0, amplitude: 0.0, rate: 1.0, center: 0.0 }
    }
}

impl BoundaryCurve {
    pub fn constant(limit: f64) -> Self {
        Self { limit, ..Default::default() }
    }

    pub fn sigmoid(limit: f64, amplitude: f64, rate: f64, center: f64) -> Self {
        Self { limit, amplitude, rate, center }
    }

    pub fn is_constant(&self) -> bool {
        self.amplitude == 0.0
    }

    /// `(b, b', b'', b''')` at `x`.
    pub fn eval(&self, x: f64) -> [f64; 4] {
        if self.is_constant() {
            return [self.limit, 0.0, 0.0, 0.0];
        }
        let k = self.rate;
        let s = logistic(k * (x - self.center));
        let d1 = s * (1.0 - s);
        let d2 = d1 * (1.0 - 2.0 * s);
        let d3 = d1 * (1.0 - 6.0 * s + 6.0 * s * s);
        let a = self.amplitude;
        [self.limit + a * s, a * k * d1, a * k * k * d2, a * k * k * k * d3]
    }

    pub fn b(&self, x: f64) -> f64 {
        self.eval(x)[0]
    }

    /// `b - limit`, without the cancellation.
    pub fn deviation(&self, x: f64) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        self.amplitude * logistic(self.rate * (x - self.center))
    }

    /// Constant with `|b - limit|, |b'|, |b''| <= C e^{rate x}` for all x.
    pub fn envelope_constant(&self) -> f64 {
        let k = self.rate;
        self.amplitude.abs() * 1f64.max(k).max(k * k) * (-k * self.center).exp()
    }

    fn validate(&self, name: &str) -> Result<(), Sim2DError> {
        let finite = [self.limit, self.amplitude, self.rate, self.center].iter().all(|v| v.is_finite());
        if !finite || (!self.is_constant() && !(self.rate > 0.0)) {
            return Err(Sim2DError::BadConfig(format!("{name}: need finite values and rate > 0, got {self:?}")));
        }
        Ok(())
    }
}

/// Domain parameters as they appear in a run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainParams {
    pub b_minus: BoundaryCurve,
    pub b_plus: BoundaryCurve,
    /// Sliding-sphere parameter: interior tangent balls of radius `3 r_ball`.
    pub r_ball: f64,
    /// Range on which the geometric invariants are sampled.
    pub x_range: (f64, f64),
}

impl Default for DomainParams {
    fn default() -> Self {
        Self {
            b_minus: BoundaryCurve::constant(0.0),
            b_plus: BoundaryCurve::constant(1.0),
            r_ball: 0.2,
            x_range: (-100.0, 100.0),
        }
    }
}

impl DomainParams {
    pub fn strip(width: f64) -> Self {
        Self { b_plus: BoundaryCurve::constant(width), ..Default::default() }
    }

    /// Width `1` on the left widening to `ratio` around `center`.
    pub fn widening(ratio: f64, rate: f64, center: f64) -> Self {
        Self {
            b_plus: BoundaryCurve::sigmoid(1.0, ratio - 1.0, rate, center),
            ..Default::default()
        }
    }
}

/// Number of samples for the geometric checks.
pub const DOMAIN_SAMPLES: usize = 10_000;

/// Validated domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec2D {
    pub b_minus: BoundaryCurve,
    pub b_plus: BoundaryCurve,
    /// Convergence rate to the limit strip; infinite for a straight strip.
    pub kappa: f64,
    pub omega_inf: (f64, f64),
    pub r_ball: f64,
    pub width_min: f64,
    pub curvature_max: f64,
    pub x_range: (f64, f64),
}

/// Checks the width, the sliding-sphere bound and the exponential envelope
/// on `DOMAIN_SAMPLES` points of `x_range`.
pub fn build_domain(params: &DomainParams) -> Result<DomainSpec2D, Sim2DError> {
    params.b_minus.validate("b_minus")?;
    params.b_plus.validate("b_plus")?;
    let (x_lo, x_hi) = params.x_range;
    if !(x_lo < x_hi) || !(params.r_ball > 0.0) {
        return Err(Sim2DError::BadConfig(format!(
            "need x_range increasing and r_ball > 0, got {:?} and {}",
            params.x_range, params.r_ball
        )));
    }
    let curves = [params.b_minus, params.b_plus];
    let kappa = curves
        .iter()
        .filter(|c| !c.is_constant())
        .map(|c| c.rate)
        .fold(f64::INFINITY, f64::min);
    let mut width_min = f64::INFINITY;
    let mut curvature_max = 0.0_f64;
    let step = (x_hi - x_lo) / (DOMAIN_SAMPLES - 1) as f64;
    for k in 0..DOMAIN_SAMPLES {
        let x = x_lo + k as f64 * step;
        let w = params.b_plus.b(x) - params.b_minus.b(x);
        if w < width_min {
            width_min = w;
            if !(w > 0.0) {
                return Err(Sim2DError::PinchedDomain { x, width: w });
            }
        }
        for c in &curves {
            let [_, d1, d2, _] = c.eval(x);
            curvature_max = curvature_max.max(d2.abs() / (1.0 + d1 * d1).powf(1.5));
            if x <= 0.0 && !c.is_constant() {
                let bound = c.envelope_constant() * (c.rate * x).exp() * (1.0 + 1e-12);
                if c.deviation(x).abs() > bound || d1.abs() > bound || d2.abs() > bound {
                    return Err(Sim2DError::BadConfig(format!("envelope check failed at x = {x}")));
                }
            }
        }
    }
    let r = params.r_ball;
    if curvature_max > 1.0 / (3.0 * r) {
        return Err(Sim2DError::SphereConditionFail {
            detail: format!("curvature {curvature_max:.4} exceeds 1/(3 r) = {:.4}", 1.0 / (3.0 * r)),
        });
    }
    // the two collars of width 2r must not meet
    if width_min < 4.0 * r {
        return Err(Sim2DError::SphereConditionFail {
            detail: format!("width {width_min:.4} leaves no room for collars of width 2r = {}", 2.0 * r),
        });
    }
    Ok(DomainSpec2D {
        b_minus: params.b_minus,
        b_plus: params.b_plus,
        kappa,
        omega_inf: (params.b_minus.limit, params.b_plus.limit),
        r_ball: r,
        width_min,
        curvature_max,
        x_range: params.x_range,
    })
}

/// Map data at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub bm: [f64; 4],
    pub bp: [f64; 4],
}

impl Section {
    pub fn w(&self) -> f64 {
        self.bp[0] - self.bm[0]
    }

    pub fn w_prime(&self) -> f64 {
        self.bp[1] - self.bm[1]
    }

    pub fn w_second(&self) -> f64 {
        self.bp[2] - self.bm[2]
    }

    /// `dz/dx` at fixed `y`.
    pub fn z_x(&self, z: f64) -> f64 {
        -(self.bm[1] + z * self.w_prime()) / self.w()
    }

    /// `d^2z/dx^2` at fixed `y`.
    pub fn z_xx(&self, z: f64) -> f64 {
        let zx = self.z_x(z);
        -(self.bm[2] + 2.0 * zx * self.w_prime() + z * self.w_second()) / self.w()
    }

    /// Oblique Neumann coefficient: `u_z = beta u_x` on the boundary with
    /// slope `slope`.
    pub fn beta(&self, slope: f64) -> f64 {
        self.w() * slope / (1.0 + slope * slope)
    }

    pub fn beta_minus(&self) -> f64 {
        self.beta(self.bm[1])
    }

    pub fn beta_plus(&self) -> f64 {
        self.beta(self.bp[1])
    }
}

impl DomainSpec2D {
    pub fn section(&self, x: f64) -> Section {
        Section { bm: self.b_minus.eval(x), bp: self.b_plus.eval(x) }
    }

    pub fn is_straight(&self) -> bool {
        self.b_minus.is_constant() && self.b_plus.is_constant()
    }

    pub fn width_inf(&self) -> f64 {
        self.omega_inf.1 - self.omega_inf.0
    }

    pub fn to_mapped(&self, x: f64, y: f64) -> f64 {
        let s = self.section(x);
        (y - s.bm[0]) / s.w()
    }

    pub fn to_physical(&self, x: f64, z: f64) -> f64 {
        let s = self.section(x);
        s.bm[0] + z * s.w()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        y >= self.b_minus.b(x) && y <= self.b_plus.b(x)
    }

    /// Outward unit normals `(nu_minus, nu_plus)` at abscissa `x`.
    pub fn normals(&self, x: f64) -> ([f64; 2], [f64; 2]) {
        let s = self.section(x);
        let unit = |a: f64, b: f64| {
            let n = a.hypot(b);
            [a / n, b / n]
        };
        (unit(s.bm[1], -1.0), unit(-s.bp[1], 1.0))
    }

    /// Distance to the nearer boundary graph; negative outside.
    pub fn signed_distance(&self, x: f64, y: f64) -> f64 {
        let dm = distance_to_curve(&self.b_minus, x, y);
        let dp = distance_to_curve(&self.b_plus, x, y);
        let sign = if self.contains(x, y) { 1.0 } else { -1.0 };
        sign * dm.min(dp)
    }
}

/// Nearest-point projection onto the graph of `b`, by damped Newton on
/// the squared distance `D(s) = (s - x)^2 + (b(s) - y)^2`.
fn distance_to_curve(curve: &BoundaryCurve, x: f64, y: f64) -> f64 {
    if curve.is_constant() {
        return (y - curve.limit).abs();
    }
    let dist2 = |s: f64| {
        let b = curve.b(s);
        (s - x).powi(2) + (b - y).powi(2)
    };
    let mut s = x;
    let mut d = dist2(s);
    for _ in 0..100 {
        let [b, b1, b2, _] = curve.eval(s);
        let g = (s - x) + (b - y) * b1;
        let h = 1.0 + b1 * b1 + (b - y) * b2;
        // plain gradient step when the local model is not convex
        let mut step = if h > 0.0 { -g / h } else { -g };
        let mut accepted = false;
        for _ in 0..60 {
            let trial = dist2(s + step);
            if trial <= d {
                s += step;
                d = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || step.abs() <= 1e-15 * (1.0 + s.abs()) {
            break;
        }
    }
    d.sqrt()
}

/// Distance from an interior point to the boundary.
pub fn distance_to_boundary(domain: &DomainSpec2D, x: f64, y: f64) -> Result<f64, Sim2DError> {
    if !domain.contains(x, y) {
        return Err(Sim2DError::OutsideDomain { x, y });
    }
    Ok(domain.signed_distance(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn converging() -> DomainParams {
        DomainParams {
            b_plus: BoundaryCurve::sigmoid(1.0, 0.5, 0.25, 0.0),
            ..Default::default()
        }
    }

    #[test]
    fn strip_and_converging_domains_are_valid() {
        let d = build_domain(&DomainParams::default()).unwrap();
        assert!(d.is_straight() && d.kappa.is_infinite());
        assert_eq!(d.width_min, 1.0);
        let d = build_domain(&converging()).unwrap();
        assert_eq!(d.kappa, 0.25);
        assert_eq!(d.omega_inf, (0.0, 1.0));
        assert!(d.curvature_max < 0.01);
    }

    #[test]
    fn pinched_and_curved_domains_are_rejected() {
        let p = DomainParams { b_plus: BoundaryCurve::sigmoid(1.0, -2.0, 1.0, 0.0), ..Default::default() };
        assert!(matches!(build_domain(&p), Err(Sim2DError::PinchedDomain { .. })));
        let p = DomainParams { b_plus: BoundaryCurve::sigmoid(1.0, 0.5, 10.0, 0.0), r_ball: 0.25, ..Default::default() };
        assert!(matches!(build_domain(&p), Err(Sim2DError::SphereConditionFail { .. })));
    }

    #[test]
    fn curve_derivatives_match_differences() {
        let c = BoundaryCurve::sigmoid(1.0, 0.7, 0.6, 2.0);
        let h = 1e-4;
        for &x in &[-5.0, 0.0, 1.7, 6.0] {
            for k in 0..3 {
                let fd = (c.eval(x + h)[k] - c.eval(x - h)[k]) / (2.0 * h);
                assert!((fd - c.eval(x)[k + 1]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn map_derivatives_match_differences_at_fixed_y() {
        let d = build_domain(&converging()).unwrap();
        let y = 0.8;
        // Richardson-extrapolated central differences of z(x, y)
        let z = |x: f64| d.to_mapped(x, y);
        let dz = |x: f64, h: f64| (z(x + h) - z(x - h)) / (2.0 * h);
        let ddz = |x: f64, h: f64| (z(x + h) - 2.0 * z(x) + z(x - h)) / (h * h);
        for &x in &[-3.0, 0.5, 4.0] {
            let s = d.section(x);
            let zz = z(x);
            let h = 1e-2;
            let zx = (4.0 * dz(x, h / 2.0) - dz(x, h)) / 3.0;
            let zxx = (4.0 * ddz(x, h / 2.0) - ddz(x, h)) / 3.0;
            assert!((zx - s.z_x(zz)).abs() < 1e-10, "{zx} {}", s.z_x(zz));
            assert!((zxx - s.z_xx(zz)).abs() < 1e-9, "{zxx} {}", s.z_xx(zz));
            // on the boundaries z_x reduces to -b'/w
            assert!((s.z_x(1.0) + s.bp[1] / s.w()).abs() < 1e-15);
            assert!((s.z_x(0.0) + s.bm[1] / s.w()).abs() < 1e-15);
        }
    }

    #[test]
    fn strip_distances() {
        let d = build_domain(&DomainParams::default()).unwrap();
        assert!((distance_to_boundary(&d, 3.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!((distance_to_boundary(&d, -7.0, 0.7).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(distance_to_boundary(&d, 0.0, 1.5), Err(Sim2DError::OutsideDomain { .. })));
    }

    fn brute_force(curve: &BoundaryCurve, x: f64, y: f64) -> f64 {
        let (lo, hi, n) = (x - 2.0, x + 2.0, 400_000);
        let step = (hi - lo) / n as f64;
        let d2 = |s: f64| (s - x).powi(2) + (curve.b(s) - y).powi(2);
        let k = (0..=n).min_by(|&a, &b| d2(lo + a as f64 * step).total_cmp(&d2(lo + b as f64 * step))).unwrap();
        // parabola through the three best samples
        let s = lo + k as f64 * step;
        let (a, b, c) = (d2(s - step), d2(s), d2(s + step));
        let shift = 0.5 * step * (a - c) / (a - 2.0 * b + c);
        d2(s + shift).sqrt()
    }

    #[test]
    fn curved_distance_matches_scan() {
        let p = DomainParams { b_plus: BoundaryCurve::sigmoid(1.0, 0.8, 1.5, 0.0), r_ball: 0.1, ..Default::default() };
        let d = build_domain(&p).unwrap();
        for &(x, y) in &[(0.0, 1.2), (-0.5, 0.9), (1.0, 1.5), (0.3, 0.2)] {
            let got = distance_to_boundary(&d, x, y).unwrap();
            let want = brute_force(&p.b_plus, x, y).min(y);
            assert!((got - want).abs() < 1e-8, "({x}, {y}): {got} vs {want}");
        }
    }
}
