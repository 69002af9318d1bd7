//! The Veech group Γ = <T, R>: membership mod 2, reduction of points to the
//! fundamental domain, and sending slopes to their cusp.
//!
//!     cargo run --example veech_reduction

use staircase_kvol::hyper::DiskPoint;
use staircase_kvol::slope::Slope;
use staircase_kvol::veech::*;

fn main() -> staircase_kvol::Result<()> {
    for (x, y) in [(3.7, 0.2), (-0.41, 0.05), (0.5, 0.5), (12.0, 3.0)] {
        let z = DiskPoint::new(x, y)?;
        let (w, g) = reduce_to_fundamental_domain(&z);
        println!("({x}, {y}) -> ({:.6}, {:.6}) by {}", w.x, w.y, g);
    }

    println!();
    for r in ["3/7", "5/13", "2/9", "inf", "-4"] {
        let r: Slope = r.parse()?;
        let v = slope_to_cusp(r);
        println!(
            "slope {r:<5} {:?}: {} sends it to {}",
            slope_class(r),
            v.word_string(),
            act_on_slope(&v, r)
        );
    }

    let m = [[1, 2], [2, 5]];
    println!(
        "\n(1 2; 2 5) in Γ: {}   (1 1; 0 1) in Γ: {}",
        in_gamma(m),
        in_gamma([[1, 1], [0, 1]])
    );
    Ok(())
}
