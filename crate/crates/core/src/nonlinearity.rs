//! Bistable reaction terms.
//!
//! A [`Nonlinearity`] is either the cubic `u (1 - u) (u - theta)` or a table
//! of knots interpolated by a not-a-knot cubic spline. Both are evaluated
//! outside `[0, 1]` by their own polynomial pieces, so transient overshoot in
//! a time stepper never hits a discontinuity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::solve_tridiagonal;

/// Number of samples used by the dense sign and extremum checks.
pub const DENSE_SAMPLES: usize = 10_001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonlinearityError {
    #[error("theta must lie in (0, 1), got {0}")]
    ThetaOutOfRange(f64),
    #[error("tabulated nonlinearity needs at least 4 knots with strictly increasing u, got {0}")]
    BadKnots(usize),
    #[error("knots must cover [0, 1] (first {first}, last {last})")]
    KnotsDoNotCoverUnitInterval { first: f64, last: f64 },
    #[error("no interior zero found for tabulated nonlinearity")]
    NoInteriorZero,
    #[error("integral of f over [0, 1] is {0:e} <= 0: state 1 does not invade")]
    NotInvading(f64),
    #[error("bistability check failed: {0}")]
    Invalid(String),
}

/// Parametrisation of a reaction term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearityKind {
    Cubic { theta: f64 },
    Tabulated { knots: Vec<(f64, f64)> },
}

impl Default for NonlinearityKind {
    fn default() -> Self {
        NonlinearityKind::Cubic { theta: 0.25 }
    }
}

/// Not-a-knot cubic spline through `(x_i, y_i)`, stored with the second
/// derivatives at the knots.
#[derive(Debug, Clone, PartialEq)]
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(knots: &[(f64, f64)]) -> Result<Self, NonlinearityError> {
        let n = knots.len();
        if n < 4 || knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(NonlinearityError::BadKnots(n));
        }
        let x: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let y: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Unknowns m_1 .. m_{n-2}; m_0 and m_{n-1} eliminated through the
        // third-derivative continuity at x_1 and x_{n-2}.
        let k = n - 2;
        let mut lower = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            let i = r + 1;
            lower[r] = h[i - 1];
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            upper[r] = h[i];
            rhs[r] = 6.0 * (d[i] - d[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (1.0 + h0 / h1);
        upper[0] -= h0 * h0 / h1;
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[k - 1] += hb * (1.0 + hb / ha);
        lower[k - 1] -= hb * hb / ha;
        if k == 1 {
            // n == 3 is rejected above; k >= 2 always.
            unreachable!();
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs);

        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&rhs);
        m[0] = m[1] * (1.0 + h0 / h1) - m[2] * h0 / h1;
        m[n - 1] = m[n - 2] * (1.0 + hb / ha) - m[n - 3] * hb / ha;
        Ok(Self { x, y, m })
    }

    fn segment(&self, u: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= u) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Value and first two derivatives.
    fn eval(&self, u: f64) -> (f64, f64, f64) {
        let i = self.segment(u);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - u) / h;
        let b = (u - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let dv = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let ddv = a * m0 + b * m1;
        (v, dv, ddv)
    }
}

/// A validated-or-not bistable reaction term with its interior zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    theta: f64,
    spline: Option<Spline>,
}

impl Nonlinearity {
    pub fn cubic(theta: f64) -> Result<Self, NonlinearityError> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(NonlinearityError::ThetaOutOfRange(theta));
        }
        Ok(Self {
            kind: NonlinearityKind::Cubic { theta },
            theta,
            spline: None,
        })
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self, NonlinearityError> {
        let spline = Spline::new(&knots)?;
        let (first, last) = (knots[0].0, knots[knots.len() - 1].0);
        if first > 0.0 || last < 1.0 {
            return Err(NonlinearityError::KnotsDoNotCoverUnitInterval { first, last });
        }
        let theta = interior_zero(&spline).ok_or(NonlinearityError::NoInteriorZero)?;
        Ok(Self {
            kind: NonlinearityKind::Tabulated { knots },
            theta,
            spline: Some(spline),
        })
    }

    pub fn from_kind(kind: NonlinearityKind) -> Result<Self, NonlinearityError> {
        match kind {
            NonlinearityKind::Cubic { theta } => Self::cubic(theta),
            NonlinearityKind::Tabulated { knots } => Self::tabulated(knots),
        }
    }

    /// Tabulates `other` on `n` equally spaced knots of `[0, 1]`.
    pub fn tabulate(other: &Nonlinearity, n: usize) -> Result<Self, NonlinearityError> {
        let knots = (0..n)
            .map(|i| {
                let u = i as f64 / (n - 1) as f64;
                (u, other.f(u))
            })
            .collect();
        Self::tabulated(knots)
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn f(&self, u: f64) -> f64 {
        match (&self.kind, &self.spline) {
            (NonlinearityKind::Cubic { theta }, _) => u * (1.0 - u) * (u - theta),
            (_, Some(s)) => s.eval(u).0,
            _ => unreachable!(),
        }
    }

    pub fn f_prime(&self, u: f64) -> f64 {
        match (&self.kind, &self.spline) {
            (NonlinearityKind::Cubic { theta }, _) => {
                -3.0 * u * u + 2.0 * (1.0 + theta) * u - theta
            }
            (_, Some(s)) => s.eval(u).1,
            _ => unreachable!(),
        }
    }

    pub fn f_second(&self, u: f64) -> f64 {
        match (&self.kind, &self.spline) {
            (NonlinearityKind::Cubic { theta }, _) => -6.0 * u + 2.0 * (1.0 + theta),
            (_, Some(s)) => s.eval(u).2,
            _ => unreachable!(),
        }
    }

    /// `max |f'|` on `[0, 1]`: dense sampling, then golden-section refinement
    /// around the best sample.
    pub fn sup_norm_f_prime(&self) -> f64 {
        let n = DENSE_SAMPLES;
        let du = 1.0 / (n - 1) as f64;
        let abs_fp = |u: f64| self.f_prime(u).abs();
        let (mut best_i, mut best) = (0, abs_fp(0.0));
        for i in 1..n {
            let v = abs_fp(i as f64 * du);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let lo = (best_i as f64 - 1.0).max(0.0) * du;
        let hi = ((best_i + 1) as f64 * du).min(1.0);
        let refined = golden_max(abs_fp, lo, hi);
        best.max(refined)
    }

    /// `∫_0^1 f`. Simpson on every spline segment (exact for piecewise cubics),
    /// or on `[0, 1]` for the cubic.
    pub fn integral(&self) -> f64 {
        let simpson = |a: f64, b: f64| (b - a) / 6.0 * (self.f(a) + 4.0 * self.f(0.5 * (a + b)) + self.f(b));
        match &self.spline {
            None => simpson(0.0, 1.0),
            Some(s) => {
                let mut cuts = vec![0.0];
                cuts.extend(s.x.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
                cuts.push(1.0);
                cuts.windows(2).map(|w| simpson(w[0], w[1])).sum()
            }
        }
    }

    /// Same as [`integral`](Self::integral) but rejects non-invading terms.
    pub fn invading_integral(&self) -> Result<f64, NonlinearityError> {
        let v = self.integral();
        if v > 0.0 {
            Ok(v)
        } else {
            Err(NonlinearityError::NotInvading(v))
        }
    }

    /// Runs every bistability check and collects the results.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let theta = self.theta;
        let zero_tol = match self.kind {
            NonlinearityKind::Cubic { .. } => 1e-12,
            NonlinearityKind::Tabulated { .. } => 1e-12,
        };
        for (name, u) in [("f(0) = 0", 0.0), ("f(theta) = 0", theta), ("f(1) = 0", 1.0)] {
            let v = self.f(u);
            checks.push(Check::new(name, v.abs() <= zero_tol, Some(u), v));
        }
        let d0 = self.f_prime(0.0);
        checks.push(Check::new("f'(0) < 0", d0 < 0.0, Some(0.0), d0));
        let d1 = self.f_prime(1.0);
        checks.push(Check::new("f'(1) < 0", d1 < 0.0, Some(1.0), d1));

        let n = DENSE_SAMPLES;
        let mut neg_witness = None;
        let mut pos_witness = None;
        for i in 1..n - 1 {
            let u = i as f64 / (n - 1) as f64;
            // Skip the sample nearest theta: the sign there is roundoff.
            if (u - theta).abs() < 0.5 / (n - 1) as f64 {
                continue;
            }
            let v = self.f(u);
            if u < theta && v >= 0.0 && neg_witness.is_none() {
                neg_witness = Some((u, v));
            }
            if u > theta && v <= 0.0 && pos_witness.is_none() {
                pos_witness = Some((u, v));
            }
        }
        checks.push(match neg_witness {
            None => Check::new("f < 0 on (0, theta)", true, None, 0.0),
            Some((u, v)) => Check::new("f < 0 on (0, theta)", false, Some(u), v),
        });
        checks.push(match pos_witness {
            None => Check::new("f > 0 on (theta, 1)", true, None, 0.0),
            Some((u, v)) => Check::new("f > 0 on (theta, 1)", false, Some(u), v),
        });
        let integral = self.integral();
        checks.push(Check::new("integral of f > 0", integral > 0.0, None, integral));
        ValidationReport { checks }
    }

    pub fn validated(self) -> Result<Self, NonlinearityError> {
        let report = self.validate();
        if let Some(fail) = report.checks.iter().find(|c| !c.passed) {
            if fail.name == "integral of f > 0" {
                return Err(NonlinearityError::NotInvading(fail.value));
            }
            return Err(NonlinearityError::Invalid(fail.to_string()));
        }
        Ok(self)
    }
}

fn interior_zero(s: &Spline) -> Option<f64> {
    // First sign change from negative to positive inside (0, 1).
    let n = 4001;
    let mut prev_u = 1.0 / (n - 1) as f64;
    let mut prev = s.eval(prev_u).0;
    for i in 2..n - 1 {
        let u = i as f64 / (n - 1) as f64;
        let v = s.eval(u).0;
        if v == 0.0 {
            return Some(u);
        }
        if prev < 0.0 && v > 0.0 {
            let (mut a, mut b) = (prev_u, u);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if s.eval(mid).0 < 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = v;
        prev_u = u;
    }
    None
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..100 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    f(0.5 * (a + b)).max(f(a)).max(f(b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Point where the check was evaluated or first failed.
    pub witness: Option<f64>,
    pub value: f64,
}

impl Check {
    fn new(name: &str, passed: bool, witness: Option<f64>, value: f64) -> Self {
        Self {
            name: name.to_string(),
            passed,
            witness,
            value,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        match self.witness {
            Some(u) => write!(f, "{}: {verdict} (u = {u}, value = {:e})", self.name, self.value),
            None => write!(f, "{}: {verdict} (value = {:e})", self.name, self.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(theta: f64) -> Nonlinearity {
        Nonlinearity::cubic(theta).unwrap()
    }

    #[test]
    fn cubic_values() {
        let f = cubic(0.25);
        assert_eq!(f.f(0.0), 0.0);
        assert_eq!(f.f(0.25), 0.0);
        assert!((f.f(0.5) - 0.0625).abs() < 1e-15);
        assert!((f.f_prime(0.0) + 0.25).abs() < 1e-15);
        assert!((f.f_prime(1.0) + 0.75).abs() < 1e-15);
        assert!((f.f_prime(5.0 / 12.0) - 13.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_of_derivative() {
        assert!((cubic(0.25).sup_norm_f_prime() - 0.75).abs() < 1e-12);
        assert!((cubic(0.4).sup_norm_f_prime() - 0.6).abs() < 1e-12);
        assert!((cubic(0.1).sup_norm_f_prime() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn integral_matches_closed_form() {
        for &theta in &[0.05, 0.1, 0.25, 0.4, 0.49] {
            let exact = (1.0 - 2.0 * theta) / 12.0;
            assert!((cubic(theta).integral() - exact).abs() < 1e-12);
        }
        assert!((cubic(0.25).integral() - 1.0 / 24.0).abs() < 1e-15);
        let near = cubic(0.5 - 1e-9).invading_integral().unwrap();
        assert!((near - 2e-9 / 12.0).abs() < 1e-16);
        assert!(matches!(
            cubic(0.6).invading_integral(),
            Err(NonlinearityError::NotInvading(_))
        ));
    }

    #[test]
    fn validation_reports() {
        assert!(cubic(0.25).validate().all_passed());
        let bad = cubic(0.6).validate();
        let fails: Vec<_> = bad.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(fails, vec!["integral of f > 0"]);
        assert!(matches!(
            cubic(0.6).validated(),
            Err(NonlinearityError::NotInvading(_))
        ));
    }

    #[test]
    fn tabulated_cubic_is_reproduced() {
        let c = cubic(0.25);
        let t = Nonlinearity::tabulate(&c, 201).unwrap();
        assert!((t.theta() - 0.25).abs() < 1e-12);
        assert!(t.validate().all_passed());
        // not-a-knot splines reproduce cubics exactly
        for i in 0..=50 {
            let u = -0.1 + 1.2 * i as f64 / 50.0;
            assert!((t.f(u) - c.f(u)).abs() < 1e-12, "u = {u}");
            assert!((t.f_prime(u) - c.f_prime(u)).abs() < 1e-10, "u = {u}");
        }
        assert!((t.integral() - c.integral()).abs() < 1e-12);
    }

    #[test]
    fn sign_violation_has_witness() {
        // f > 0 somewhere in (0, theta): bump added near u = 0.1
        let base = cubic(0.3);
        let knots: Vec<(f64, f64)> = (0..101)
            .map(|i| {
                let u = i as f64 / 100.0;
                let bump = 0.05 * (-((u - 0.1) / 0.02).powi(2)).exp();
                (u, base.f(u) + bump)
            })
            .collect();
        match Nonlinearity::tabulated(knots) {
            Ok(t) => {
                let report = t.validate();
                assert!(!report.all_passed());
                let w = report.failures().find_map(|c| c.witness);
                assert!(w.is_some());
            }
            Err(NonlinearityError::NoInteriorZero) => {}
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_bad_theta() {
        assert!(Nonlinearity::cubic(0.0).is_err());
        assert!(Nonlinearity::cubic(1.0).is_err());
        assert!(Nonlinearity::tabulated(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn derivative_matches_centered_differences(theta in 0.05f64..0.49, u in 0.0f64..1.0) {
                let f = cubic(theta);
                let h = 1e-5;
                let fd = (f.f(u + h) - f.f(u - h)) / (2.0 * h);
                prop_assert!((fd - f.f_prime(u)).abs() < 1e-8);
            }

            #[test]
            fn sign_pattern_holds(theta in 0.05f64..0.49, u in 0.0f64..1.0) {
                let f = cubic(theta);
                let v = f.f(u);
                if u > 0.0 && u < theta { prop_assert!(v < 0.0); }
                if u > theta && u < 1.0 { prop_assert!(v > 0.0); }
            }
        }
    }
}
