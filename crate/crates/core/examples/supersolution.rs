//! Builds the travelling super-solution ahead of the front and checks its
//! slack on a grid; a decay rate above the admissible one breaks it.

use std::error::Error;

use frontlab::sim2d::{
    build_domain, build_supersolution, derived_parameters, supersolution_bounds, verify_supersolution, BoundaryCurve,
    DomainParams, GridSpec2D, Supersolution2D,
};
use frontlab::FrontModel;

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = FrontModel::cubic(0.25)?;
    let domain = build_domain(&DomainParams { b_plus: BoundaryCurve::sigmoid(1.0, 0.5, 0.25, 0.0), ..Default::default() })?;
    let r = 0.2;
    let bounds = supersolution_bounds(&model, &domain, r);
    let (alpha, a) = derived_parameters(&model, &domain, r);
    println!("alpha1 = {:.4}, C_psi = {:.3}; using alpha = {alpha:.5}, a = {a:.2}", bounds.alpha1, bounds.c_psi);

    let grid = GridSpec2D { x_min: 0.0, x_max: 20.0, hx: 0.05, nz: 41 };
    let ss = build_supersolution(&model, &domain, alpha, a, r, None)?;
    let ok = verify_supersolution(&model, &ss, 0.0, grid)?;
    println!("admissible: interior {:.3e}, boundary {:.3e}, pass {}", ok.min_slack_interior, ok.min_slack_boundary, ok.pass);

    let bad = Supersolution2D::unchecked(&model, &domain, 2.0 * bounds.alpha1, a, r, ss.epsilon);
    let bad = verify_supersolution(&model, &bad, 0.0, grid)?;
    println!("alpha = 2 alpha1: interior {:.3e} at {:?}, pass {}", bad.min_slack_interior, bad.worst_interior, bad.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
