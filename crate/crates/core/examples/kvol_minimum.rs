//! The global minimum of KVol over the disk and a coarse CSV heat map of the
//! fundamental domain for external plotting.
//!
//!     cargo run --release --example kvol_minimum -- 2 > heatmap.csv

use staircase_kvol::kvol::{closed_form_minimum, find_minimum, scan, CandidateConfig, SCAN_HEADER};

fn main() -> staircase_kvol::Result<()> {
    let s: i64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let cfg = CandidateConfig::default();
    let m = find_minimum(s, &cfg)?;
    eprintln!(
        "minimum {:.12} at ({:.12}, {:.12}); closed form {:.12}; mirror {:.12}; {} evaluations",
        m.value,
        m.point.x,
        m.point.y,
        closed_form_minimum(s),
        m.mirrored_value,
        m.evaluations
    );
    println!("{SCAN_HEADER}");
    for row in scan(s, (-1.0, 1.0), (0.5, 2.5), 0.05, &cfg)? {
        println!("{}", row.to_csv());
    }
    Ok(())
}
