//! Probability-of-correct-order curves for the four built-in scenarios.
//!
//! ```text
//! cargo run --release --example pc_curves -- [trials] [seed]
//! ```

use mosel::{BuiltinScenario, Criterion};

fn main() -> mosel::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(200, |s| s.parse().expect("trials"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    for (name, scenario) in [
        ("sim1: M=500,  U(0.05, 0.99)", BuiltinScenario::Sim1),
        ("sim2: M=500,  U(0.05, 0.50)", BuiltinScenario::Sim2),
        ("sim3: M=100,  U(0.05, 0.99)", BuiltinScenario::Sim3),
        ("sim4: M=1000, U(0.05, 0.99)", BuiltinScenario::Sim4),
    ] {
        let cfg = scenario.config(trials, seed);
        let curve = mosel::simulation::run_scenario(&cfg)?;
        println!("{name}, {trials} trials per order");
        println!("  {:<5} {}  mean", "", (1..=6).map(|k| format!("k={k:<4}")).collect::<String>());
        for c in Criterion::ALL {
            let row: String = (1..=6)
                .map(|k| format!("{:<6.3}", curve.p_c(c, k).unwrap()))
                .collect();
            println!("  {:<5} {row} {:.3}", c.name(), curve.mean_p_c(c).unwrap());
        }
        let sel: String = (1..=6)
            .map(|k| {
                let aic = curve.get(Criterion::Aic, k).unwrap().mean_selected_k;
                let mdl = curve.get(Criterion::Mdl, k).unwrap().mean_selected_k;
                format!("{aic:.2}/{mdl:.2} ")
            })
            .collect();
        println!("  mean selected k, aic/mdl: {sel}\n");
    }
    Ok(())
}
