//! EEF of a linear model on one random data record: the SNR / mutual
//! information split and the brute-force check of the embedding MLE.
//!
//! ```text
//! cargo run --example linear_eef -- [n] [k] [signal_scale] [seed]
//! ```

use mosel::linear_eef::{eef_llr, grid_search_eta, mi_per_dimension, LinearModel};
use mosel::numerics::{stream_rng, RealMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> mosel::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(20, |s| s.parse().expect("n"));
    let k: usize = args.next().map_or(3, |s| s.parse().expect("k"));
    let scale: f64 = args.next().map_or(1.0, |s| s.parse().expect("signal_scale"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let mut rng = stream_rng(seed, 0, 0);
    let h = RealMatrix::from_fn(n, k, |_, _| rng.sample(StandardNormal));
    let theta: Vec<f64> = (0..k).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    let x: Vec<f64> = (0..n)
        .map(|i| (0..k).map(|j| h[(i, j)] * theta[j]).sum::<f64>() + rng.sample::<f64, _>(StandardNormal))
        .collect();
    let model = LinearModel::new(h, 1.0)?;

    let b = eef_llr(&x, &model)?;
    println!("l_G     {:.6}", b.l_g);
    println!("eta_hat {:.6}  (grid: {:.4})", b.eta_hat, grid_search_eta(&x, &model, 1e-4)?);
    if b.is_active() {
        println!("snr_hat {:.6}", b.snr_hat);
        println!("mi_hat  {:.6}  ({:.6} per dimension)", b.mi_hat, mi_per_dimension(&b)?);
    } else {
        println!("inactive: l_G <= k/2, so the null wins");
    }
    println!("eef     {:.6}", b.eef);

    // the step function in action: eef as the signal grows
    println!("\nscale   l_G        eef");
    for s in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let xs: Vec<f64> = x.iter().enumerate().map(|(i, v)| {
            let sig: f64 = (0..k).map(|j| model.design()[(i, j)] * theta[j]).sum();
            v - sig + s * sig
        }).collect();
        let b = eef_llr(&xs, &model)?;
        println!("{s:<7} {:<10.4} {:.4}", b.l_g, b.eef);
    }
    Ok(())
}
