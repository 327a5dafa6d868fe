//! Switching off the second and third mollifier pieces leaves only `c1`,
//! and at tiny `R` with `P1(x) = x`, `Q = 1` the constant approaches
//! `1 + 1/θ1`.

use critline::kappa;
use critline::mollifier::{MollifierConfig, TermGrids};
use critline::terms::{self, Term};

fn main() -> critline::Result<()> {
    let mut cfg = MollifierConfig::one_piece(1.3);
    cfg.grid = TermGrids::uniform(12);
    cfg.polys.q = MollifierConfig::paper_kappa().polys.q;
    let rep = kappa::evaluate(&cfg)?;
    for t in Term::ALL {
        println!("{:>4} = {:e}", t.name(), rep.terms.get(t).value);
    }
    println!("one-piece bound with the κ preset's Q at R = 1.3: {:.6}", rep.bound);

    for r in [1e-3, 1e-6, 1e-9] {
        let mut small = MollifierConfig::one_piece(r);
        small.theta1 = 0.5;
        small.theta2 = 0.4;
        println!("R = {r:e}: c1 = {:.12}", terms::eval_c1(&small)?.value);
    }
    Ok(())
}
