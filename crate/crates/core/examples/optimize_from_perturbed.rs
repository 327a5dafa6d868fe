//! Perturbs every free coefficient of the κ preset by +1% and lets the
//! optimizer climb back.
//!
//! ```text
//! cargo run --release --example optimize_from_perturbed
//! ```

use std::time::Instant;

use critline::kappa;
use critline::mollifier::{from_free_params, to_free_params, MollifierConfig};
use critline::optimizer::{optimize_with_progress, OptimizerSettings};

fn main() -> critline::Result<()> {
    let preset = MollifierConfig::paper_kappa();
    let (v, layout) = to_free_params(&preset)?;
    let bumped: Vec<f64> = v.iter().map(|c| c * 1.01).collect();
    let mut start = from_free_params(&bumped, &layout, preset.r)?;
    start.grid = preset.grid;

    println!("preset bound    {:.7}", kappa::evaluate(&preset)?.bound);
    let t = Instant::now();
    let settings = OptimizerSettings::default();
    let res = optimize_with_progress(&start, &settings, |p| {
        if p.evaluation % 50 == 0 || p.evaluation < 5 {
            println!("  eval {:5}  R {:.5}  bound {:.9}", p.evaluation, p.r, p.bound);
        }
    })?;
    println!("perturbed start {:.7}", res.start_bound);
    println!(
        "optimized       {:.7}  (R = {:.5}, {} evaluations, converged: {})",
        res.best_bound, res.best_config.r, res.evaluations, res.converged
    );
    println!("search-grid     {:.7}", res.search_bound);
    println!("elapsed         {:.1?}", t.elapsed());
    Ok(())
}
