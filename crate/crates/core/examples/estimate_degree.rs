//! Draw an improper complex Gaussian sample, round-trip it through CSV and
//! estimate its degree of noncircularity.
//!
//! ```text
//! cargo run --example estimate_degree -- [M] [seed]
//! ```

use mosel::noncircularity::estimate_degree;
use mosel::numerics::{sample_complex_gaussian, stream_rng, ComplexMatrix};
use mosel::{ComplexDataset, Criterion};
use nalgebra::DVector;
use num_complex::Complex64;

fn main() -> mosel::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().map_or(2000, |s| s.parse().expect("M"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    // three noncircular coordinates out of six
    let truth = [0.9, 0.6, 0.3, 0.0, 0.0, 0.0];
    let c = ComplexMatrix::identity(6, 6);
    let p = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        6,
        truth.iter().map(|&v| Complex64::new(v, 0.0)),
    ));
    let data = sample_complex_gaussian(&c, &p, m, &mut stream_rng(seed, 0, 0))?;

    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    let data = ComplexDataset::read_csv(buf.as_slice())?;

    let est = estimate_degree(&data, &Criterion::ALL, true)?;
    println!("true coefficients      {truth:?}");
    let shown: Vec<String> = est.spectrum.coefficients().iter().map(|v| format!("{v:.3}")).collect();
    println!("estimated coefficients [{}]", shown.join(", "));
    for c in Criterion::ALL {
        println!("{:<5} k = {}", c.name(), est.selected(c).unwrap());
    }
    Ok(())
}
