//! Scores of every rule along an evidence ladder built from a circularity
//! spectrum.
//!
//! ```text
//! cargo run --example criteria_table -- [M] [coefficients...]
//! ```

use mosel::criteria::Criterion;
use mosel::noncircularity::{evidence_ladder, select_from_ladder};
use mosel::CircularitySpectrum;

fn main() -> mosel::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().map_or(100, |s| s.parse().expect("M"));
    let mut coeffs: Vec<f64> = args.map(|s| s.parse().expect("coefficient")).collect();
    if coeffs.is_empty() {
        coeffs = vec![0.8, 0.5, 0.0, 0.0, 0.0, 0.0];
    }
    let spectrum = CircularitySpectrum::new(coeffs)?;
    let ladder = evidence_ladder(&spectrum, m)?;

    let scored: Vec<_> = select_from_ladder(&ladder, m, &Criterion::ALL, false)?
        .into_values()
        .collect();

    println!("spectrum {:?}, M = {m}", spectrum.coefficients());
    print!("{:>3} {:>10} {:>4}", "k", "l_k", "d_k");
    for s in &scored {
        print!(" {:>10}", s.criterion.name());
    }
    println!();
    for step in &ladder {
        print!("{:>3} {:>10.4} {:>4}", step.k, step.llr, step.dim);
        for s in &scored {
            match s.scores.get(&step.k) {
                Some(v) => print!(" {v:>10.4}"),
                None => print!(" {:>10}", "-"),
            }
        }
        println!();
    }
    for s in &scored {
        println!("{:<5} selects k = {}", s.criterion.name(), s.selected);
    }
    Ok(())
}
