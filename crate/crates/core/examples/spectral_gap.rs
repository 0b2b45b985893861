//! The spectral gap of the linearisation around the wave, and the
//! projections onto and away from the translation mode.

use std::error::Error;

use frontlab::spectral::{cubic_gap_closed_form, spectral_gap};
use frontlab::FrontModel;

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let r = spectral_gap(&model.f, &model.wave)?;
    println!("rho0 = {:.3e}", r.rho0);
    println!("rho1 = {:.6} (whole line {:.6})", r.rho1, cubic_gap_closed_form(0.25));
    println!("varpi = rho1 / sup|f'| = {:.6}", r.varpi);

    // P phi' = phi', Q phi' = 0
    let ctx = &model.proj;
    let q = ctx.project_range(&model.wave.phi_prime)?;
    let leak = q.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    println!("<e*, phi'> = {:.15}, |Q phi'| = {leak:.1e}", ctx.pair(&model.wave.phi_prime)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
