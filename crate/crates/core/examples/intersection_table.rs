//! Exact intersection ratios I(r, r') and the End(𝒵) test: the gap between 1 on
//! the family and at most 9/10 off it, and the largest values of I(r, ∞).
//!
//!     cargo run --release --example intersection_table -- 2 30

use staircase_kvol::saddle::SaddleTable;
use staircase_kvol::slope::{slopes_up_to, Rational, Slope};
use staircase_kvol::veech::{end_of_z_by_group, EndZOracle};

fn main() -> staircase_kvol::Result<()> {
    let args: Vec<i64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let s = args.first().copied().unwrap_or(2);
    let max_den = args.get(1).copied().unwrap_or(30);
    let oracle = EndZOracle::with_table(SaddleTable::new(s)?);
    let one = Rational::from_integer(1);

    let slopes = slopes_up_to(8);
    let (mut on, mut off, mut worst) = (0, 0, Rational::from_integer(0));
    for (i, &r) in slopes.iter().enumerate() {
        for &rp in &slopes[i + 1..] {
            let v = oracle.table().intersection_ratio(r, rp)?.value;
            assert_eq!(v == one, end_of_z_by_group(r, rp)?);
            if v == one {
                on += 1;
            } else {
                off += 1;
                worst = worst.max(v);
            }
        }
    }
    println!("heights <= 8: {on} pairs with I = 1, {off} without; largest I off the family = {worst}");

    let mut top: Vec<(Rational, Slope)> = Vec::new();
    for q in 1..=max_den {
        for p in 0..=q {
            let Ok(r) = Slope::direction(p, q) else { continue };
            let v = oracle.table().intersection_ratio(r, Slope::INFINITY)?.value;
            if v != one {
                top.push((v, r));
            }
        }
    }
    top.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    println!("largest I(r, inf) for r in [0, 1], denominator <= {max_den}:");
    for (v, r) in top.iter().take(6) {
        println!("  r = {r:<6} I = {v}");
    }
    Ok(())
}
