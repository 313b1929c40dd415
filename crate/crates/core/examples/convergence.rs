//! Smallest record length at which each rule reaches a target probability
//! of picking the true order.
//!
//! ```text
//! cargo run --release --example convergence -- [trials] [true_k] [target]
//! ```

use mosel::simulation::convergence_sweep;
use mosel::BuiltinScenario;

fn main() -> mosel::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(200, |s| s.parse().expect("trials"));
    let true_k: usize = args.next().map_or(3, |s| s.parse().expect("true_k"));
    let target: f64 = args.next().map_or(1.0, |s| s.parse().expect("target"));

    let grid = [500, 1000, 2000, 3000, 4000];
    let cfg = BuiltinScenario::Sim1.config(trials, 1);
    let points = convergence_sweep(&cfg, true_k, &grid, target, None)?;

    println!("true k = {true_k}, target p_c = {target}, {trials} trials per point");
    println!("{:<5} {}  M_c", "", grid.map(|m| format!("{m:>7}")).concat());
    for p in &points {
        let row: String = p.p_c.iter().map(|v| format!("{v:>7.3}")).collect();
        let m_c = p.m_c.map_or("-".to_string(), |m| m.to_string());
        println!("{:<5} {row}  {m_c}", p.criterion.name());
    }
    Ok(())
}
