//! Bistable travelling fronts in heterogeneous media.

// NaN has to fail validation, so `!(x > 0.0)` is intended
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod harness;
pub mod model;
pub mod nonlinearity;
pub mod numerics;
pub mod sim1d;
pub mod sim2d;
pub mod spectral;
pub mod wave;

pub use model::FrontModel;
pub use nonlinearity::{Nonlinearity, NonlinearityKind};
pub use wave::{solve_wave, WaveGrid, WaveProfile};
