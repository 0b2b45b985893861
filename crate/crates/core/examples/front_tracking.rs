//! A wave launched on the line keeps its shape; the tracked phase stays
//! near zero.

use std::error::Error;

use frontlab::sim1d::{run_cauchy_1d, Sim1DConfig};
use frontlab::FrontModel;

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let cfg = Sim1DConfig { t_end: 30.0, snapshot_dt: 5.0, store_states: false, ..Default::default() };
    let traj = run_cauchy_1d(&model, &cfg)?;
    println!("{:>6} {:>12} {:>12} {:>10}", "t", "sup_err", "chi", "front");
    for s in &traj.snapshots {
        println!(
            "{:>6.1} {:>12.3e} {:>12.3e} {:>10.4}",
            s.t,
            s.sup_err.unwrap_or(f64::NAN),
            s.chi.unwrap_or(f64::NAN),
            s.front_pos.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
