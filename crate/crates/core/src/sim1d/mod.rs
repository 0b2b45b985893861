//! The heterogeneous Cauchy problem `u_t = u_xx + f(u) (1 + r(x))` on a
//! line, its front tracking, and the analyses built on top of it.

mod analysis;
mod het;
mod stepper;
mod sweeps;
mod tracking;

pub use analysis::*;
pub use het::*;
pub use stepper::*;
pub use sweeps::*;
pub use tracking::*;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("time step {dt} exceeds the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("solution blew up at t = {t} (|u| = {norm:e})")]
    BlowUp { t: f64, norm: f64 },
    #[error("Newton did not converge at t = {t} (increment {increment:e})")]
    NoConvergence { t: f64, increment: f64 },
    #[error("front tracking lost: {0}")]
    TrackingLost(String),
    #[error("fit window contains {0} points")]
    EmptyWindow(usize),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

impl SimError {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, SimError::BadConfig(_) | SimError::CflViolation { .. })
    }
}

/// Uniform grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub h: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, h: f64) -> Self {
        Self { x_min, x_max, h }
    }

    pub fn n(&self) -> usize {
        ((self.x_max - self.x_min) / self.h).round() as usize + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.x(i)).collect()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.h > 0.0 && self.x_max > self.x_min) {
            return Err(SimError::BadConfig(format!(
                "grid needs h > 0 and x_min < x_max, got {self:?}"
            )));
        }
        let s = (self.x_max - self.x_min) / self.h;
        if (s - s.round()).abs() > 1e-6 || s.round() < 4.0 {
            return Err(SimError::BadConfig(format!(
                "grid length must be a multiple of h with at least 5 nodes, got {self:?}"
            )));
        }
        Ok(())
    }
}
