//! A widening channel mapped onto the unit strip; a manufactured field
//! shows the mapped Laplacian and the oblique wall condition are second
//! order.

use std::error::Error;

use frontlab::sim2d::{build_domain, manufactured_convergence, BoundaryCurve, DomainParams, GridSpec2D};

pub fn run() -> Result<(), Box<dyn Error>> {
    let domain = build_domain(&DomainParams { b_plus: BoundaryCurve::sigmoid(1.0, 0.5, 0.5, 0.0), ..Default::default() })?;
    let (left, right) = (domain.section(-20.0).w(), domain.section(20.0).w());
    println!("width {left:.3} -> {right:.3}, max curvature {:.4}, kappa {:.3}", domain.curvature_max, domain.kappa);
    let (y, z) = (1.1, domain.to_mapped(2.0, 1.1));
    println!("(2, {y}) -> z = {z:.6} -> y = {:.6}", domain.to_physical(2.0, z));

    let r = manufactured_convergence(&domain, GridSpec2D { x_min: -4.0, x_max: 4.0, hx: 0.2, nz: 6 }, 3)?;
    for k in 0..r.hx.len() {
        println!("hx {:.4}: interior {:.3e}, boundary {:.3e}", r.hx[k], r.interior_error[k], r.boundary_error[k]);
    }
    println!("orders: interior {:?}, boundary {:?}", r.interior_order, r.boundary_order);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
