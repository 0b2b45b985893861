//! Solves for the bistable travelling wave of a cubic and of a tabulated
//! nonlinearity, and checks the tails against the linearised rates.

use std::error::Error;

use frontlab::numerics::Quadrature;
use frontlab::wave::{check_tail_estimates, solve_wave, WaveGrid, WaveSolveOptions};
use frontlab::{FrontModel, Nonlinearity};

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let w = &model.wave;
    println!("cubic theta = 0.25: c = {:.12} (exact {:.12})", w.c, 2f64.sqrt() / 4.0);
    println!("  lambda = {:.6}, mu = {:.6}, {} Newton steps", w.lambda, w.mu, w.newton_iterations);

    let tails = check_tail_estimates(w)?;
    println!("  tail slopes {:.5} / {:.5}, C1 = {:.3}, C2 = {:.3}", tails.slope_plus, tails.slope_minus, tails.c1, tails.c2);

    // the same f through a spline on 41 knots
    let tabulated = Nonlinearity::tabulate(&model.f, 41)?;
    let grid = WaveGrid::with_spacing(-40.0, 40.0, 0.02)?;
    let p = solve_wave(&tabulated, grid, &WaveSolveOptions::default())?;
    println!("tabulated: c = {:.8}, theta = {:.6}", p.c, tabulated.theta());
    let _ = FrontModel::from_profile(tabulated, p, Quadrature::Trapezoid)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
