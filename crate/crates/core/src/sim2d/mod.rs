//! The Neumann problem on planar cylinder-like domains, solved on the unit
//! strip through the affine map `z = (y - b_-(x)) / (b_+(x) - b_-(x))`,
//! with the travelling super-solution, the metric residuals and the
//! per-section front tracking.

mod domain;
mod operator;
mod residuals;
mod stepper;
mod supersolution;
mod sweeps;

pub use domain::*;
pub use operator::*;
pub use residuals::*;
pub use stepper::*;
pub use supersolution::*;
pub use sweeps::*;

use thiserror::Error;

use crate::sim1d::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Sim2DError {
    #[error("domain pinches at x = {x} (width {width})")]
    PinchedDomain { x: f64, width: f64 },
    #[error("sliding-sphere condition fails: {detail}")]
    SphereConditionFail { detail: String },
    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("super-solution parameters violate: {}", .0.join("; "))]
    ParameterViolation(Vec<String>),
    #[error("front tracking lost in section {z_index} at t = {t}: {reason}")]
    TrackingLost { z_index: usize, t: f64, reason: String },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

impl Sim2DError {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Sim2DError::Sim(e) => e.is_numerical(),
            Sim2DError::TrackingLost { .. } => true,
            _ => false,
        }
    }
}
