//! Lindley and information paradoxes of the g-prior Bayes factor, next to
//! the EEF on the same data.
//!
//! ```text
//! cargo run --example paradoxes
//! ```

use mosel::cli::{paradox_tables, ParadoxArgs};
use mosel::linear_eef::bayes_factor_ceiling;

fn main() -> mosel::Result<()> {
    let args = ParadoxArgs {
        g: 100.0,
        n: 30,
        k: 3,
        scales: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
        sigma2: 1.0,
        seed: Some(1),
        out: None,
        g_sweep: vec![1.0, 1e2, 1e8, 1e16, 1e32, 1e64, 1e128],
        g_out: None,
    };
    let (rows, g_rows) = paradox_tables(&args)?;

    println!("growing signal, g = {}", args.g);
    println!("{:>6} {:>14} {:>14}", "scale", "eef", "bayes factor");
    for r in &rows {
        println!("{:>6} {:>14.4} {:>14.6e}", r.scale, r.eef, r.bayes_factor);
    }
    println!("bayes factor ceiling: {:.6e}", bayes_factor_ceiling(args.n, args.k, args.g));

    println!("\nfixed data (scale {}), growing g", args.scales.last().unwrap());
    println!("{:>8} {:>14} {:>14}", "g", "eef", "bayes factor");
    for r in &g_rows {
        println!("{:>8.0e} {:>14.4} {:>14.6e}", r.g, r.eef, r.bayes_factor);
    }
    Ok(())
}
