//! The upper half-plane toolkit: K as a hyperbolic cosine-of-angle, horodisks
//! {J > 1}, banana neighbourhoods and the incenter of the covering triangle.
//!
//!     cargo run --example hyperbolic_geometry

use staircase_kvol::hyper::*;
use staircase_kvol::slope::Slope;

fn main() -> staircase_kvol::Result<()> {
    let z = DiskPoint::new(0.3, 1.2)?;
    let (r, rp) = (Slope::integer(0), Slope::INFINITY);
    println!("z = (0.3, 1.2)");
    println!("  K_(0,inf)(z)         = {:.15}", k_value(r, rp, &z)?);
    println!("  sech d(z, gamma[0,inf]) = {:.15}", k_via_distance(r, rp, &z)?);
    println!(
        "  J_1(z) = {:.6}, inside the horodisk at -1: {}",
        j_value(Slope::integer(1), &z),
        in_horodisk(&z, 1, 1)?
    );

    let g1 = Geodesic::from_ints(-1, 1)?;
    let g2 = Geodesic::from_ints(-2, 1)?;
    let g3 = Geodesic::from_ints(0, 2)?;
    let c = incenter(&g1, &g2, &g3)?;
    let k = DiskPoint::k_point();
    println!("\nincenter of {g1}, {g2}, {g3}: ({:.12}, {:.12})", c.x, c.y);
    println!("  expected (9/14, sqrt(143)/14) = ({:.12}, {:.12})", k.x, k.y);
    for g in [g1, g2, g3] {
        println!("  K on {g} = {:.12}", k_of_geodesic(&c, &g));
    }
    println!("  covering threshold sqrt(143/144) = {:.12}", cover_threshold());

    println!("\nbanana circles of V(-n, 1):");
    for n in 1..=4 {
        let (low, high) = banana_circles(n)?;
        println!(
            "  n = {n}: centre x {:+.3}, radius {:.4}, centres y {:+.4} / {:+.4}",
            low.cx, low.radius, low.cy, high.cy
        );
    }
    Ok(())
}
