//! Saddle connections in a rational direction: one per square, each with its
//! holonomy, homology class and crossing word.
//!
//!     cargo run --example saddle_connections -- 2 7 3

use staircase_kvol::origami::StaircaseSurface;
use staircase_kvol::saddle::{trace_direction, SaddleRecord};
use staircase_kvol::slope::Slope;

fn main() -> staircase_kvol::Result<()> {
    let args: Vec<i64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (s, p, q) = match args[..] {
        [s, p, q] => (s, p, q),
        _ => (2, 7, 3),
    };
    let surface = StaircaseSurface::new(s)?;
    let d = Slope::direction(p, q)?;
    println!("direction ({p}, {q}) on St({}):", surface.n);
    for c in trace_direction(&surface, d)? {
        let rec = SaddleRecord::new(&surface, &c)?;
        println!(
            "  square {} -> {}: {} right/{} top exits, class {}",
            c.start_square,
            c.end_square,
            c.right_exits(),
            c.top_exits(),
            c.homology
        );
        if let Some(family) = rec.family {
            println!("      {family} word: {}", rec.crossing_word.join(" "));
        }
    }
    Ok(())
}
