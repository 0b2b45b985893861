//! Runs started at ever earlier times from the shifted wave converge on a
//! fixed window: the entire solution emerging from the wave.

use std::error::Error;

use frontlab::sim1d::{entire_solution_sequence, CompareWindow, Heterogeneity1D, Sim1DConfig};
use frontlab::FrontModel;

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let cfg = Sim1DConfig { heterogeneity: Heterogeneity1D::sigmoid(0.5, 0.25, 0.0), ..Default::default() };
    let window = CompareWindow { t0: 5.0, x_lo: -10.0, x_hi: 10.0 };
    let r = entire_solution_sequence(&model, &cfg, &[10, 20, 30, 40], window)?;
    for (n, d) in r.n_list.iter().zip(&r.differences) {
        println!("d_{n} = {d:.3e}");
    }
    println!("strictly decreasing: {}", r.strictly_decreasing);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
