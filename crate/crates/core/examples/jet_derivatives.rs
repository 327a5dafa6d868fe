//! Mixed partial derivatives of `exp(3x + 2y) · P(1 + x - y)` at the
//! origin, read off a truncated Taylor jet and checked against the closed
//! form for a couple of multi-indices.

use critline::jet::{Affine, Jet, JetShape};
use critline::poly::Poly;

fn main() -> critline::Result<()> {
    let shape = JetShape::new(&[2, 1])?;
    let mut e = Affine::constant(0.0);
    e.linear[..2].copy_from_slice(&[3.0, 2.0]);
    let mut arg = Affine::constant(1.0);
    arg.linear[..2].copy_from_slice(&[1.0, -1.0]);
    let p = Poly::new(vec![0.0, 0.0, 1.0]); // P(z) = z^2

    let f = Jet::exp_affine(&shape, &e).mul_poly_affine(&p, &arg);
    for idx in 0..shape.len() {
        let alpha = shape.multi_index(idx);
        println!("d^{alpha:?} f(0) = {}", f.extract(alpha)?);
    }

    // exp alone: d^2/dx^2 d/dy = 3^2 * 2
    println!("exp part, (2,1): {}", Jet::exp_affine(&shape, &e).extract(&[2, 1])?);
    // f_y = e^(3x+2y) (2 z^2 - 2 z) with z = 1 + x - y, which vanishes at 0
    println!("(0,1) closed form: 0");
    Ok(())
}
