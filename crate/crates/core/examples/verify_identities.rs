//! Runs the identity battery against both presets: the integral identity,
//! the partial-fraction split and the operator form of `c31`.
//!
//! ```text
//! cargo run --release --example verify_identities
//! ```

use std::time::Instant;

use critline::mollifier::MollifierConfig;
use critline::verify::run_suite;

fn main() -> critline::Result<()> {
    for (name, cfg) in [
        ("kappa", MollifierConfig::paper_kappa()),
        ("kappa_star", MollifierConfig::paper_kappa_star()),
    ] {
        let t = Instant::now();
        println!("{name}");
        for check in run_suite(&cfg, 7)? {
            println!(
                "  {:<34} {:>10.3e}  < {:.0e}  {}",
                check.name,
                check.residual,
                check.tolerance,
                if check.passed { "ok" } else { "FAIL" }
            );
        }
        println!("  ({:.1?})", t.elapsed());
    }
    Ok(())
}
