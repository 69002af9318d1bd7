//! Banana neighbourhoods of γ(-n, 1), γ(0, 2) and the wedge at 1/2 cover the
//! region around the minimum point k, except k itself.
//!
//!     cargo run --release --example covering_check -- 0.01

use staircase_kvol::kvol::verify_covering;

fn main() -> staircase_kvol::Result<()> {
    let step: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.01);
    for n_max in [12, 40, 71] {
        let r = verify_covering(step, n_max)?;
        let lowest = r.uncovered.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        print!(
            "n <= {n_max:>2}: {} samples, {} uncovered",
            r.samples,
            r.uncovered.len()
        );
        if r.uncovered.is_empty() {
            println!(", k covered: {}", r.k_covered);
        } else {
            println!(" (lowest at y = {lowest:.2})");
        }
    }
    Ok(())
}
