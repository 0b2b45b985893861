//! A region where the reaction is switched off: narrow ones are crossed,
//! wide ones stop the front.

use std::error::Error;

use frontlab::sim1d::{width_sweep, GapSetup, Sim1DConfig};
use frontlab::FrontModel;

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let template = Sim1DConfig { t_end: 400.0, snapshot_dt: 5.0, ..Default::default() };
    let r = width_sweep(&model, &template, &GapSetup::default(), -1.0, &[2.0, 5.0, 12.0, 15.0])?;
    for c in &r.results {
        println!("width {:>4}: {:?} (front reached {:.1})", c.parameter, c.outcome, c.max_front);
    }
    println!("transition near width {:?}", r.transition);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
