//! A wave started far from a sigmoid heterogeneity: the deviation from the
//! homogeneous run grows like e^{gamma (c t - M)}.

use std::error::Error;

use frontlab::sim1d::{decay_fit, error_series_against, gamma_candidates, run_cauchy_1d, Grid1D, Heterogeneity1D, Sim1DConfig};
use frontlab::FrontModel;

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let c = model.c();
    let m = 40.0;
    let t_end = (0.8 * m / c).ceil();
    let hom_cfg = Sim1DConfig { grid: Grid1D::new(-50.0, 80.0, 0.05), t_end, track: false, ..Default::default() };
    let het_cfg = Sim1DConfig { heterogeneity: Heterogeneity1D::sigmoid(0.5, 0.25, m), ..hom_cfg.clone() };

    let hom = run_cauchy_1d(&model, &hom_cfg)?;
    let het = run_cauchy_1d(&model, &het_cfg)?;
    let fit = decay_fit(&error_series_against(&het, &hom), c, m, (5.0, 0.8 * m / c), 0.95)?;
    println!("gamma = {:.4}, K = {:.3e}, R^2 = {:.5}", fit.gamma, fit.k, fit.r_squared);
    let g = gamma_candidates(0.25, c, model.wave.mu);
    println!("candidates: {g:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
