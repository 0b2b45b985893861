//! A nonlinearity together with its solved wave and projection context.

use thiserror::Error;

use crate::nonlinearity::{Nonlinearity, NonlinearityError};
use crate::numerics::Quadrature;
use crate::spectral::{ProjectionContext, SpectralError};
use crate::wave::{solve_wave, WaveError, WaveGrid, WaveProfile, WaveSolveOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Nonlinearity(#[from] NonlinearityError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Everything the simulators need to know about the homogeneous problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontModel {
    pub f: Nonlinearity,
    pub wave: WaveProfile,
    pub proj: ProjectionContext,
    pub sup_f_prime: f64,
}

impl FrontModel {
    pub fn solve(
        f: Nonlinearity,
        grid: WaveGrid,
        options: &WaveSolveOptions,
        quadrature: Quadrature,
    ) -> Result<Self, ModelError> {
        let wave = solve_wave(&f, grid, options)?;
        Self::from_profile(f, wave, quadrature)
    }

    pub fn from_profile(
        f: Nonlinearity,
        wave: WaveProfile,
        quadrature: Quadrature,
    ) -> Result<Self, ModelError> {
        let proj = ProjectionContext::new(&wave, quadrature)?;
        let sup_f_prime = f.sup_norm_f_prime();
        Ok(Self { f, wave, proj, sup_f_prime })
    }

    /// Cubic with the given `theta` on the default wave grid.
    pub fn cubic(theta: f64) -> Result<Self, ModelError> {
        let f = Nonlinearity::cubic(theta)?.validated()?;
        Self::solve(f, WaveGrid::default(), &WaveSolveOptions::default(), Quadrature::Trapezoid)
    }

    pub fn c(&self) -> f64 {
        self.wave.c
    }

    pub fn theta(&self) -> f64 {
        self.f.theta()
    }
}
