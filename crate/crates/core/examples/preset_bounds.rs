//! All six constants and the bound for both bundled presets.

use critline::{kappa, mollifier::MollifierConfig, terms::Term};
use std::time::Instant;

fn main() {
    for cfg in [MollifierConfig::paper_kappa(), MollifierConfig::paper_kappa_star()] {
        let start = Instant::now();
        let rep = kappa::evaluate(&cfg).unwrap();
        for t in Term::ALL {
            let v = rep.terms.get(t);
            println!("{:>4} = {:.12} (delta {:.1e})", t.name(), v.value, v.refinement_delta);
        }
        println!("{} c = {:.10} bound = {:.7} [{:.1?}]", cfg.mode.label(), rep.c_total, rep.bound, start.elapsed());
    }
}
