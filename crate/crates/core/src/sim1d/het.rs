//! Heterogeneities `g` and their translates `r(x) = g(x - M)`.

use serde::{Deserialize, Serialize};

use super::SimError;

/// Logistic function written so that neither branch overflows.
pub fn logistic(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape1D {
    /// `g = 0`.
    None,
    /// `g(x) = A / (1 + e^{-kappa x})`.
    Sigmoid { amplitude: f64, kappa: f64 },
    /// Smoothed plateau of height `A` on `[x_left, x_right]`.
    Gap {
        amplitude: f64,
        x_left: f64,
        x_right: f64,
        smoothing: f64,
    },
    /// Piecewise linear through the points, constant beyond them.
    Custom { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Heterogeneity1D {
    pub shape: Shape1D,
    #[serde(rename = "M", default)]
    pub m: f64,
}

impl Default for Heterogeneity1D {
    fn default() -> Self {
        Self::none()
    }
}

impl Heterogeneity1D {
    pub fn none() -> Self {
        Self { shape: Shape1D::None, m: 0.0 }
    }

    pub fn sigmoid(amplitude: f64, kappa: f64, m: f64) -> Self {
        Self { shape: Shape1D::Sigmoid { amplitude, kappa }, m }
    }

    /// Plateau of height `amplitude` on `[x_left, x_right]`, already in
    /// physical coordinates (`M = 0`).
    pub fn gap(amplitude: f64, x_left: f64, x_right: f64, smoothing: f64) -> Self {
        Self {
            shape: Shape1D::Gap { amplitude, x_left, x_right, smoothing },
            m: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.shape {
            Shape1D::None => true,
            Shape1D::Sigmoid { amplitude, .. } | Shape1D::Gap { amplitude, .. } => *amplitude == 0.0,
            Shape1D::Custom { points } => points.iter().all(|p| p.1 == 0.0),
        }
    }

    pub fn g(&self, x: f64) -> f64 {
        match &self.shape {
            Shape1D::None => 0.0,
            Shape1D::Sigmoid { amplitude, kappa } => amplitude * logistic(kappa * x),
            Shape1D::Gap { amplitude, x_left, x_right, smoothing } => {
                amplitude * (logistic((x - x_left) / smoothing) - logistic((x - x_right) / smoothing))
            }
            Shape1D::Custom { points } => {
                let i = points.partition_point(|p| p.0 <= x);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[points.len() - 1].1
                } else {
                    let (a, b) = (points[i - 1], points[i]);
                    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
                }
            }
        }
    }

    /// `r(x) = g(x - M)`.
    pub fn r(&self, x: f64) -> f64 {
        self.g(x - self.m)
    }

    pub fn sup_abs(&self) -> f64 {
        match &self.shape {
            Shape1D::None => 0.0,
            Shape1D::Sigmoid { amplitude, .. } | Shape1D::Gap { amplitude, .. } => amplitude.abs(),
            Shape1D::Custom { points } => points.iter().fold(0.0_f64, |m, p| m.max(p.1.abs())),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::BadConfig(msg));
        match &self.shape {
            Shape1D::None => {}
            Shape1D::Sigmoid { amplitude, kappa } => {
                if !(*kappa > 0.0) {
                    return bad(format!("sigmoid kappa must be positive, got {kappa}"));
                }
                // |g(x)| <= e^{kappa x} needs |A| <= 1
                if amplitude.abs() > 1.0 {
                    return bad(format!("sigmoid amplitude must satisfy |A| <= 1, got {amplitude}"));
                }
            }
            Shape1D::Gap { x_left, x_right, smoothing, .. } => {
                if !(x_right > x_left) || !(*smoothing > 0.0) {
                    return bad("gap needs x_left < x_right and smoothing > 0".into());
                }
            }
            Shape1D::Custom { points } => {
                if points.is_empty() || points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return bad("custom heterogeneity needs increasing abscissae".into());
                }
            }
        }
        if !self.m.is_finite() {
            return bad("M must be finite".into());
        }
        Ok(())
    }

    /// Largest violation of `|g(x)| <= e^{kappa x}` on the sample points.
    pub fn envelope_violation(&self, kappa: f64, xs: &[f64]) -> f64 {
        xs.iter()
            .map(|&x| self.g(x).abs() - (kappa * x).exp())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
