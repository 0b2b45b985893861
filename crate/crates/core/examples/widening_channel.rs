//! A front leaving a narrow channel into one ten times wider: a gentle
//! opening lets it through, an abrupt one stops it.

use std::error::Error;

use frontlab::sim2d::{blocking_exploration, GridSpec2D, Sim2DConfig, WideningFamily, WideningParameter};
use frontlab::FrontModel;

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let mut template = Sim2DConfig {
        grid: GridSpec2D { x_min: -40.0, x_max: 30.0, hx: 0.05, nz: 21 },
        dt: 0.05,
        t_end: 300.0,
        m: 20.0,
        snapshot_dt: 2.0,
        ..Default::default()
    };
    template.domain.r_ball = 0.0005;
    let family = WideningFamily { vary: WideningParameter::Rate, ratio: 10.0, rate: 2.0, center: 0.0 };
    let r = blocking_exploration(&model, &template, &family, &[0.5, 8.0])?;
    for c in &r.results {
        println!("rate {:>4}: {:?} (front reached {:.1} by t = {})", c.parameter, c.outcome, c.max_front, c.t_final);
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
