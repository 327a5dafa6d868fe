//! The κ bound as a function of `R` with the published polynomials held
//! fixed.
//!
//! ```text
//! cargo run --release --example sweep_r [grid]
//! ```

use critline::kappa;
use critline::mollifier::{MollifierConfig, TermGrids};

fn main() -> critline::Result<()> {
    let grid: usize = std::env::args().nth(1).map_or(10, |s| s.parse().expect("grid size"));
    let mut cfg = MollifierConfig::paper_kappa();
    cfg.grid = TermGrids::uniform(grid);
    let mut best = (0.0, f64::NEG_INFINITY);
    println!("R,c_total,bound");
    for k in 0..=14 {
        cfg.r = 1.19 + 0.01 * k as f64;
        let rep = kappa::evaluate(&cfg)?;
        println!("{:.2},{:.10},{:.8}", cfg.r, rep.c_total, rep.bound);
        if rep.bound > best.1 {
            best = (cfg.r, rep.bound);
        }
    }
    eprintln!("largest bound {:.8} at R = {:.2}", best.1, best.0);
    Ok(())
}
