//! Pointwise integrands of the jet-valued main terms.
//!
//! Each integrand has the form
//!
//! ```text
//! kernel(x; t) · Q(qa(x; t)) · Q(qb(x; t)) · Pa(pa(x; t)) · Pb(pb(x; t))
//! ```
//!
//! where `kernel` is an exponential of an affine form times affine factors
//! and every polynomial argument is affine in `x`. The node builders return
//! the kernel jet and the four arguments; how the polynomials are applied is
//! left to the caller (direct evaluation or coefficient-tensor assembly).

use std::sync::Arc;

use crate::jet::{Affine, Jet, JetShape};

/// The polynomial plugged into a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Q,
    P1,
    P2SecondDerivative,
    P3,
}

/// Length exponents and offset, the scalars the integrands depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub r: f64,
}

/// Kernel jet and slot arguments at one quadrature node.
pub struct NodeFactors {
    pub kernel: Jet,
    pub q_args: [Affine; 2],
    pub p_args: [Affine; 2],
}

fn x(v: usize) -> Affine {
    Affine::var(v)
}

/// Kernel = `exp(exponent) · scalar · Π factors`.
fn kernel(shape: &Arc<JetShape>, exponent: Affine, scalar: f64, factors: &[Affine]) -> Jet {
    let mut k = Jet::exp_affine(shape, &exponent);
    for f in factors {
        k = k.mul_affine(f);
    }
    k.scale(scalar)
}

/// `d²/dx1dx2` integrand over the region `t1 + t2 <= u`; point `(t1, t2, u)`.
pub fn c12_node(p: &Params, shape: &Arc<JetShape>, pt: &[f64]) -> NodeFactors {
    let (t1, t2, u) = (pt[0], pt[1], pt[2]);
    let Params {
        theta1: th1,
        theta2: th2,
        r,
        ..
    } = *p;
    let exponent = r * (1.0 - th1 * (x(0) - x(1)) + th2 * (t1 - t2));
    NodeFactors {
        kernel: kernel(shape, exponent, 1.0 - u, &[]),
        q_args: [
            -th1 * x(0) + th2 * t1,
            1.0 + th1 * x(1) - th2 * t2,
        ],
        p_args: [
            x(0) + x(1) + (1.0 - th2 / th1 * (1.0 - u)),
            Affine::constant(u - t1 - t2),
        ],
    }
}

/// `d⁴/dx1²dx2²` integrand over `[0,1]^4`; point `(t1, t2, t3, u)`.
pub fn c2_node(p: &Params, shape: &Arc<JetShape>, pt: &[f64]) -> NodeFactors {
    let (t1, t2, t3, u) = (pt[0], pt[1], pt[2], pt[3]);
    let Params { theta2: th2, r, .. } = *p;
    let x1u = x(0) + u;
    let x2u = x(1) + u;
    let s = x(0) + x(1) - t1 * x1u - t2 * x2u;
    let w = 1.0 + th2 * s;
    let exponent = -th2 * r * s + 2.0 * r * t3 * w;
    NodeFactors {
        kernel: kernel(shape, exponent, (1.0 - u).powi(4), &[w, x1u, x2u]),
        q_args: [
            th2 * (-x(0) + t2 * x2u) + t3 * w,
            th2 * (-x(1) + t1 * x1u) + t3 * w,
        ],
        p_args: [x1u * (1.0 - t1), x2u * (1.0 - t2)],
    }
}

/// `d⁸/dx1²dx2²dx3²dx4²` integrand over `[0,1]^5`; point `(t1, t2, t3, t4, u)`.
pub fn c3_node(p: &Params, shape: &Arc<JetShape>, pt: &[f64]) -> NodeFactors {
    let (t1, t2, t3, t4, u) = (pt[0], pt[1], pt[2], pt[3], pt[4]);
    let Params { theta3: th3, r, .. } = *p;
    let a = 1.0 + th3 * (x(0) + x(2));
    let b = 1.0 + th3 * (x(1) + x(3));
    let l1 = t1 + th3 * (-x(0) + x(1) + t1 * (x(0) + x(2)));
    let l2 = t2 + th3 * (x(2) - x(3) + t2 * (x(1) + x(3)));
    let exponent = -th3 * r * (x(1) + x(2))
        + r * t1 * (1.0 - t4) * a
        + r * t2 * (1.0 - t3) * b
        + r * t3 * l1
        + r * t4 * l2;
    let f1 = (t1 - t2) + th3 * (-x(0) + x(1) + t1 * (x(0) + x(2)) - t2 * (x(1) + x(3)));
    let f2 = (t1 - t2) + th3 * (-x(2) + x(3) + t1 * (x(0) + x(2)) - t2 * (x(1) + x(3)));
    NodeFactors {
        kernel: kernel(shape, exponent, (1.0 - u).powi(3), &[f1, f2, a, b]),
        q_args: [
            -th3 * x(1) + t2 * (1.0 - t3) * b + t3 * l1,
            -th3 * x(2) + t1 * (1.0 - t4) * a + t4 * l2,
        ],
        p_args: [x(0) + x(1) + u, x(2) + x(3) + u],
    }
}

/// `d⁶/dx1²dx2²dx3²` integrand over `[0,1]^5`; point `(t1, t2, t3, t4, u)`.
pub fn c23_node(p: &Params, shape: &Arc<JetShape>, pt: &[f64]) -> NodeFactors {
    let (t1, t2, t3, t4, u) = (pt[0], pt[1], pt[2], pt[3], pt[4]);
    let Params {
        theta2: th2,
        theta3: th3,
        r,
        ..
    } = *p;
    let d = th2 * (1.0 + x(0)) - th3 * (1.0 - u);
    let g = 1.0 + th2 * x(0) + th3 * x(1);
    let m = th3 * (x(1) - x(2)) - t1 * (2.0 * t2 - 1.0) * d;
    let exponent = -r * (th2 * x(0) + th3 * x(1))
        + r * t1 * t2 * (1.0 - t3 - t3 * t4) * d
        + r * t3 * (1.0 + t4) * g
        + r * (1.0 - t4) * m;
    let f1 = -th3 * (x(1) - x(2)) + t1 * (2.0 * t2 - 1.0) * d + t3 * (g - t1 * t2 * d);
    let f2 = g - t1 * t2 * d;
    let z = x(0) + (1.0 - th3 / th2 * (1.0 - u));
    NodeFactors {
        kernel: kernel(shape, exponent, t1 * (1.0 - u).powi(3), &[f1, f2, z, z]),
        q_args: [
            -th3 * x(1) + t1 * t2 * (1.0 - t3 * t4) * d + t3 * t4 * g + (1.0 - t4) * m,
            -th2 * x(0) + t3 * (g - t1 * t2 * d),
        ],
        p_args: [z * (1.0 - t1), x(1) + x(2) + u],
    }
}

/// `d⁴/dx1dx2dx3²` integrand over `[0,1]^3`; point `(t1, t2, u)`.
pub fn c31_node(p: &Params, shape: &Arc<JetShape>, pt: &[f64]) -> NodeFactors {
    let (t1, t2, u) = (pt[0], pt[1], pt[2]);
    let Params {
        theta1: th1,
        theta3: th3,
        r,
        ..
    } = *p;
    let h = 1.0 + th1 * x(0) + th3 * x(2);
    let exponent =
        -r * (th1 * x(1) + th3 * x(2)) + r * t1 * (1.0 + t2) * h - th1 * r * t2 * (x(0) - x(1));
    let lead = -th1 * (x(0) - x(1)) + t1 * h;
    NodeFactors {
        kernel: kernel(shape, exponent, 1.0 - u, &[lead, h]),
        q_args: [
            -th1 * x(1) + t1 * t2 * h - th1 * t2 * (x(0) - x(1)),
            -th3 * x(2) + t1 * h,
        ],
        p_args: [
            x(0) + x(1) + (1.0 - th3 / th1 * (1.0 - u)),
            x(2) + u,
        ],
    }
}
