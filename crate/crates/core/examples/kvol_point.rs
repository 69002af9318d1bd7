//! KVol at a point of the Teichmüller disk, with the witness that realises it
//! and the search diagnostics.
//!
//!     cargo run --release --example kvol_point -- 2 9/14 0.8541614816

use staircase_kvol::hyper::DiskPoint;
use staircase_kvol::kvol::{kvol_at, CandidateConfig};
use staircase_kvol::slope::parse_rational;

fn main() -> staircase_kvol::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let s: i64 = args.first().and_then(|a| a.parse().ok()).unwrap_or(2);
    let coord = |i: usize, default: &str| parse_rational(args.get(i).map_or(default, |a| a.as_str()));
    let z = DiskPoint::exact(coord(1, "0")?, coord(2, "1")?)?;
    let res = kvol_at(s, &z, &CandidateConfig::default())?;
    println!("KVol(St({}) at ({}, {})) = {:.12}", 2 * s - 1, z.x, z.y, res.value);
    println!(
        "  reduced to ({:.9}, {:.9}) by {}",
        res.reduced.x, res.reduced.y, res.reduction
    );
    println!("  J_1 = {:.9}, J_-1 = {:.9}", res.j_terms.0, res.j_terms.1);
    println!("  witness kind: {}", res.witness_kind);
    for w in &res.witnesses {
        println!("  K on the pair ({}, {}) = {:.12}", w.r, w.rp, w.k);
    }
    let d = &res.search_diagnostics;
    println!(
        "  search: {} orbit points, {} candidates, {} rounds, final bound {}",
        d.orbit_points, d.candidates_examined, d.rounds, d.final_orbit_bound
    );
    Ok(())
}
