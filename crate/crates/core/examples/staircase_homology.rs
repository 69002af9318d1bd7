//! The staircase origami St(2s−1): gluings, cylinders, cone point and the
//! intersection form on homology.
//!
//!     cargo run --example staircase_homology -- 3

use staircase_kvol::origami::{named_class, CurveName, IntersectionForm, StaircaseSurface};

fn main() -> staircase_kvol::Result<()> {
    let s: i64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let surface = StaircaseSurface::new(s)?;
    println!("St({}) with s = {s}: {} squares", surface.n, surface.volume());
    println!("  right gluing  {}", surface.sigma_right);
    println!("  up gluing     {}", surface.sigma_up);
    println!(
        "  commutator    {}  (one cycle: a single cone point)",
        surface.commutator()
    );
    println!("  rows    {:?}", surface.row_cylinders);
    println!("  columns {:?}", surface.column_cylinders);

    let form = IntersectionForm::staircase(surface.s)?;
    println!(
        "\nintersection matrix in the basis e1, f1, ..., e{s}, f{s} (det {}):",
        form.determinant()
    );
    for row in &form.m {
        println!("  {}", row.iter().map(|v| format!("{v:>3}")).collect::<String>());
    }

    let s = surface.s;
    println!("\nnamed curves:");
    let mut names = Vec::new();
    for i in 1..=s {
        names.extend([CurveName::Alpha(i), CurveName::Beta(i), CurveName::G(i)]);
        if i < s {
            names.push(CurveName::GPrime(i));
        }
    }
    for name in &names {
        println!("  {:<8} = {}", name.to_string(), named_class(*name, s)?);
    }
    let a1 = named_class(CurveName::Alpha(1), s)?;
    let b1 = named_class(CurveName::Beta(1), s)?;
    println!("\nInt(alpha1, beta1) = {}", form.pair(&a1, &b1)?);
    Ok(())
}
