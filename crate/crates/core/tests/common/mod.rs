//! Independent reference evaluators for the main-term constants.
//!
//! Everything here works on plain `f64`: integrands are written out in
//! full, x-derivatives come from Richardson-extrapolated central
//! differences, and integrals from composite Simpson rules or stratified
//! Monte Carlo. Nothing is shared with the library except the
//! configuration struct.

#![allow(dead_code)]

pub mod dd;

use std::sync::Arc;

use critline::jet::{Affine, Jet, JetShape};
use critline::mollifier::{MollifierConfig, QSpec};
use critline::poly::Poly;
use dd::Dd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The four polynomials evaluated straight from the coefficient lists.
#[derive(Clone)]
pub struct Polys {
    p1: Vec<f64>,
    p2: Vec<f64>,
    p3: Vec<f64>,
    q: QSpec,
}

fn powsum(cs: &[f64], first: i32, x: f64) -> f64 {
    cs.iter()
        .enumerate()
        .map(|(j, c)| c * x.powi(first + j as i32))
        .sum()
}

impl Polys {
    pub fn of(cfg: &MollifierConfig) -> Self {
        Polys {
            p1: cfg.polys.p1.clone(),
            p2: cfg.polys.p2.clone(),
            p3: cfg.polys.p3.clone(),
            q: cfg.polys.q.clone(),
        }
    }

    pub fn p1(&self, x: f64) -> f64 {
        powsum(&self.p1, 1, x)
    }

    pub fn p3(&self, x: f64) -> f64 {
        powsum(&self.p3, 4, x)
    }

    /// Second derivative of `Σ p2[j] x^(j+3)`, differentiated by hand.
    pub fn p2pp(&self, x: f64) -> f64 {
        self.p2
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let n = (j + 3) as f64;
                c * n * (n - 1.0) * x.powi(j as i32 + 1)
            })
            .sum()
    }

    pub fn q(&self, x: f64) -> f64 {
        match &self.q {
            QSpec::Shifted { constant, odd } => {
                let y = 1.0 - 2.0 * x;
                constant
                    + odd
                        .iter()
                        .enumerate()
                        .map(|(k, w)| w * y.powi(2 * k as i32 + 1))
                        .sum::<f64>()
            }
            QSpec::Linear { slope } => 1.0 - slope * x,
        }
    }
}

/// Tensor central-difference stencil for `∂^orders f` at 0 with step `h`.
pub fn central_mixed(f: &dyn Fn(&[f64]) -> f64, orders: &[usize], h: f64) -> f64 {
    let stencil = |o: usize| -> Vec<(f64, f64)> {
        match o {
            0 => vec![(0.0, 1.0)],
            1 => vec![(-1.0, -0.5 / h), (1.0, 0.5 / h)],
            2 => vec![(-1.0, 1.0 / (h * h)), (0.0, -2.0 / (h * h)), (1.0, 1.0 / (h * h))],
            _ => panic!("orders up to 2"),
        }
    };
    let sts: Vec<Vec<(f64, f64)>> = orders.iter().map(|&o| stencil(o)).collect();
    let n: usize = sts.iter().map(Vec::len).product();
    let mut x = vec![0.0; orders.len()];
    let mut total = 0.0;
    for mut k in 0..n {
        let mut w = 1.0;
        for (v, st) in sts.iter().enumerate() {
            let (off, wt) = st[k % st.len()];
            k /= st.len();
            x[v] = off * h;
            w *= wt;
        }
        total += w * f(&x);
    }
    total
}

/// One Richardson step on [`central_mixed`]: the stencil error is even in `h`.
pub fn richardson(f: &dyn Fn(&[f64]) -> f64, orders: &[usize], h: f64) -> f64 {
    let coarse = central_mixed(f, orders, h);
    let fine = central_mixed(f, orders, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Two Richardson steps (error `O(h^6)`).
pub fn richardson2(f: &dyn Fn(&[f64]) -> f64, orders: &[usize], h: f64) -> f64 {
    let a = central_mixed(f, orders, h);
    let b = central_mixed(f, orders, h / 2.0);
    let c = central_mixed(f, orders, h / 4.0);
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}

/// Composite Simpson nodes and weights on `[0, 1]` with `n` (even) panels.
pub fn simpson(n: usize) -> Vec<(f64, f64)> {
    assert!(n.is_multiple_of(2));
    let h = 1.0 / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (i as f64 * h, w * h / 3.0)
        })
        .collect()
}

/// Product Simpson rule over `[0,1]^dims`.
pub fn simpson_cube(dims: usize, n: usize, g: &dyn Fn(&[f64]) -> f64) -> f64 {
    let rule = simpson(n);
    let m = rule.len();
    let mut p = vec![0.0; dims];
    let mut total = 0.0;
    for mut k in 0..m.pow(dims as u32) {
        let mut w = 1.0;
        for d in 0..dims {
            let (x, wx) = rule[k % m];
            k /= m;
            p[d] = x;
            w *= wx;
        }
        total += w * g(&p);
    }
    total
}

/// Stratified Monte Carlo: one uniform point in each of the `m^dims` cells,
/// repeated `reps` times. Returns the mean and its standard error.
pub fn stratified_mc(dims: usize, m: usize, reps: usize, seed: u64, g: &dyn Fn(&[f64]) -> f64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = m.pow(dims as u32);
    let mut p = vec![0.0; dims];
    let mut estimates = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut sum = 0.0;
        for mut k in 0..cells {
            for d in 0..dims {
                let cell = k % m;
                k /= m;
                p[d] = (cell as f64 + rng.gen::<f64>()) / m as f64;
            }
            sum += g(&p);
        }
        estimates.push(sum / cells as f64);
    }
    let mean = estimates.iter().sum::<f64>() / reps as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
    (mean, (var / reps as f64).sqrt())
}

pub struct Oracle {
    pub value: f64,
    /// Standard error of the Monte Carlo part; zero for deterministic rules.
    pub std_err: f64,
}

pub fn c1(cfg: &MollifierConfig, n: usize) -> Oracle {
    let p = Polys::of(cfg);
    let (th1, r) = (cfg.theta1, cfg.r);
    let h = 1e-3;
    let d = |f: &dyn Fn(f64) -> f64, x: f64| {
        let one = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        (4.0 * one(h / 2.0) - one(h)) / 3.0
    };
    let g = |pt: &[f64]| {
        let (t, u) = (pt[0], pt[1]);
        let inner = p.q(t) * d(&|x| p.p1(x), u)
            + th1 * d(&|x| p.q(x), t) * p.p1(u)
            + th1 * r * p.q(t) * p.p1(u);
        (2.0 * r * t).exp() * inner * inner
    };
    Oracle {
        value: p.p1(1.0).powi(2) + simpson_cube(2, n, &g) / th1,
        std_err: 0.0,
    }
}

pub fn c12(cfg: &MollifierConfig, n: usize) -> Oracle {
    let p = Polys::of(cfg);
    let (th1, th2, r) = (cfg.theta1, cfg.theta2, cfg.r);
    let g = |s: &[f64]| {
        // t2 = u s2, t1 = u (1 - s2) s1 covers t1 + t2 <= u
        let u = s[2];
        let t2 = u * s[1];
        let t1 = u * (1.0 - s[1]) * s[0];
        let jac = u * u * (1.0 - s[1]);
        let f = |x: &[f64]| {
            let (x1, x2) = (x[0], x[1]);
            (r * (1.0 - th1 * (x1 - x2) + th2 * (t1 - t2))).exp()
                * (1.0 - u)
                * p.q(-th1 * x1 + th2 * t1)
                * p.q(1.0 + th1 * x2 - th2 * t2)
                * p.p1(x1 + x2 + 1.0 - th2 / th1 * (1.0 - u))
                * p.p2pp(u - t1 - t2)
        };
        jac * richardson(&f, &[1, 1], 1e-2)
    };
    Oracle {
        value: 4.0 * th2 * th2 / (th1 * th1) * simpson_cube(3, n, &g),
        std_err: 0.0,
    }
}

pub fn c2(cfg: &MollifierConfig, n: usize) -> Oracle {
    let p = Polys::of(cfg);
    let (th2, r) = (cfg.theta2, cfg.r);
    let g = |t: &[f64]| {
        let (t1, t2, t3, u) = (t[0], t[1], t[2], t[3]);
        let f = |x: &[f64]| {
            let (x1, x2) = (x[0], x[1]);
            let s = x1 + x2 - t1 * (x1 + u) - t2 * (x2 + u);
            (-th2 * r * s + 2.0 * r * t3 * (1.0 + th2 * s)).exp()
                * (1.0 + th2 * s)
                * (x1 + u)
                * (x2 + u)
                * (1.0 - u).powi(4)
                * p.q(th2 * (-x1 + t2 * (x2 + u)) + t3 * (1.0 + th2 * s))
                * p.q(th2 * (-x2 + t1 * (x1 + u)) + t3 * (1.0 + th2 * s))
                * p.p2pp((x1 + u) * (1.0 - t1))
                * p.p2pp((x2 + u) * (1.0 - t2))
        };
        richardson(&f, &[2, 2], 0.05)
    };
    Oracle {
        value: 2.0 / (3.0 * th2) * simpson_cube(4, n, &g),
        std_err: 0.0,
    }
}

pub fn c3(cfg: &MollifierConfig, m: usize, reps: usize, seed: u64) -> Oracle {
    let p = Polys::of(cfg);
    let (th3, r) = (cfg.theta3, cfg.r);
    let g = |t: &[f64]| {
        let (t1, t2, t3, t4, u) = (t[0], t[1], t[2], t[3], t[4]);
        let f = |x: &[f64]| {
            let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
            let a = 1.0 + th3 * (x1 + x3);
            let b = 1.0 + th3 * (x2 + x4);
            let e = -th3 * r * (x2 + x3)
                + r * t1 * (1.0 - t4) * a
                + r * t2 * (1.0 - t3) * b
                + r * t3 * (t1 + th3 * (-x1 + x2 + (x1 + x3) * t1))
                + r * t4 * (t2 + th3 * (x3 - x4 + (x2 + x4) * t2));
            e.exp()
                * (t1 - t2 + th3 * (-x1 + x2 + (x1 + x3) * t1 - (x2 + x4) * t2))
                * (t1 - t2 + th3 * (-x3 + x4 + (x1 + x3) * t1 - (x2 + x4) * t2))
                * a
                * b
                * (1.0 - u).powi(3)
                * p.q(-th3 * x2 + t2 * (1.0 - t3) * b + t3 * (t1 + th3 * (-x1 + x2 + (x1 + x3) * t1)))
                * p.q(-th3 * x3 + t1 * (1.0 - t4) * a + t4 * (t2 + th3 * (x3 - x4 + (x2 + x4) * t2)))
                * p.p3(x1 + x2 + u)
                * p.p3(x3 + x4 + u)
        };
        richardson2(&f, &[2, 2, 2, 2], 0.2)
    };
    let (mean, se) = stratified_mc(5, m, reps, seed, &g);
    let pref = 1.0 / (12.0 * th3.powi(4));
    Oracle {
        value: pref * mean,
        std_err: pref * se,
    }
}

pub fn c23(cfg: &MollifierConfig, m: usize, reps: usize, seed: u64) -> Oracle {
    let p = Polys::of(cfg);
    let (th2, th3, r) = (cfg.theta2, cfg.theta3, cfg.r);
    let g = |t: &[f64]| {
        let (t1, t2, t3, t4, u) = (t[0], t[1], t[2], t[3], t[4]);
        let f = |x: &[f64]| {
            let (x1, x2, x3) = (x[0], x[1], x[2]);
            let d = th2 * (1.0 + x1) - th3 * (1.0 - u);
            let g1 = 1.0 + th2 * x1 + th3 * x2;
            let z = x1 + 1.0 - th3 / th2 * (1.0 - u);
            let e = -r * (th2 * x1 + th3 * x2)
                + r * t1 * t2 * (1.0 - t3 - t3 * t4) * d
                + r * t3 * (1.0 + t4) * g1
                + r * (1.0 - t4) * (th3 * (x2 - x3) - t1 * (2.0 * t2 - 1.0) * d);
            e.exp()
                * (-th3 * (x2 - x3) + t1 * (2.0 * t2 - 1.0) * d + t3 * (g1 - t1 * t2 * d))
                * (g1 - t1 * t2 * d)
                * t1
                * z
                * z
                * (1.0 - u).powi(3)
                * p.q(-th3 * x2
                    + t1 * t2 * (1.0 - t3 * t4) * d
                    + t3 * t4 * g1
                    + (1.0 - t4) * (th3 * (x2 - x3) - t1 * (2.0 * t2 - 1.0) * d))
                * p.q(-th2 * x1 + t3 * (g1 - t1 * t2 * d))
                * p.p2pp(z * (1.0 - t1))
                * p.p3(x2 + x3 + u)
        };
        richardson2(&f, &[2, 2, 2], 0.2)
    };
    let (mean, se) = stratified_mc(5, m, reps, seed, &g);
    let pref = 2.0 / (3.0 * th2 * th2);
    Oracle {
        value: pref * mean,
        std_err: pref * se,
    }
}

pub fn c31(cfg: &MollifierConfig, n: usize) -> Oracle {
    let p = Polys::of(cfg);
    let (th1, th3, r) = (cfg.theta1, cfg.theta3, cfg.r);
    let g = |t: &[f64]| {
        let (t1, t2, u) = (t[0], t[1], t[2]);
        let f = |x: &[f64]| {
            let (x1, x2, x3) = (x[0], x[1], x[2]);
            let h = 1.0 + th1 * x1 + th3 * x3;
            (-r * (th1 * x2 + th3 * x3) + r * t1 * (1.0 + t2) * h - th1 * r * t2 * (x1 - x2)).exp()
                * (-th1 * (x1 - x2) + t1 * h)
                * h
                * (1.0 - u)
                * p.q(-th1 * x2 + t1 * t2 * h - th1 * t2 * (x1 - x2))
                * p.q(-th3 * x3 + t1 * h)
                * p.p1(x1 + x2 + 1.0 - th3 / th1 * (1.0 - u))
                * p.p3(x3 + u)
        };
        richardson(&f, &[1, 1, 2], 0.05)
    };
    Oracle {
        value: simpson_cube(3, n, &g) / (th1 * th1),
        std_err: 0.0,
    }
}

/// `∂^orders f` at 0 by a tensor central stencil evaluated in double-double.
pub fn central_mixed_dd(f: &dyn Fn(&[Dd]) -> Dd, orders: &[usize], h: f64) -> f64 {
    let stencil = |o: usize| -> Vec<(f64, f64)> {
        match o {
            0 => vec![(0.0, 1.0)],
            1 => vec![(-1.0, -0.5 / h), (1.0, 0.5 / h)],
            2 => vec![(-1.0, 1.0 / (h * h)), (0.0, -2.0 / (h * h)), (1.0, 1.0 / (h * h))],
            _ => panic!("orders up to 2"),
        }
    };
    let sts: Vec<Vec<(f64, f64)>> = orders.iter().map(|&o| stencil(o)).collect();
    let n: usize = sts.iter().map(Vec::len).product();
    let mut x = vec![Dd::ZERO; orders.len()];
    let mut total = Dd::ZERO;
    for mut k in 0..n {
        let mut w = 1.0;
        for (v, st) in sts.iter().enumerate() {
            let (off, wt) = st[k % st.len()];
            k /= st.len();
            x[v] = Dd::from(off * h);
            w *= wt;
        }
        // h is a power of two, so the weights are exact
        total = total + f(&x) * Dd::from(w);
    }
    total.to_f64()
}

/// Steps `h, h/2, h/4` with two Richardson eliminations; `h` should be a
/// power of two.
pub fn richardson_dd(f: &dyn Fn(&[Dd]) -> Dd, orders: &[usize], h: f64) -> f64 {
    let a = central_mixed_dd(f, orders, h);
    let b = central_mixed_dd(f, orders, h / 2.0);
    let c = central_mixed_dd(f, orders, h / 4.0);
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}

/// `exp(c0 + a·x) · Π_k p_k(b_k0 + b_k·x)` with positive slopes and
/// coefficients, so every Taylor coefficient at 0 is strictly positive
/// and relative errors are meaningful.
/// `(b0, b, coefficients)` of one factor `p(b0 + b·x)`.
pub type PolyFactor = (f64, Vec<f64>, Vec<f64>);

#[derive(Debug, Clone)]
pub struct Factor {
    pub c0: f64,
    pub a: Vec<f64>,
    pub polys: Vec<PolyFactor>,
}

impl Factor {
    pub fn random(rng: &mut ChaCha8Rng, vars: usize) -> Self {
        let c0 = rng.gen_range(-0.5..0.5);
        let a = (0..vars).map(|_| rng.gen_range(0.2..1.5)).collect();
        let n_polys = rng.gen_range(0..=2);
        let polys = (0..n_polys)
            .map(|_| {
                let b0 = rng.gen_range(0.0..1.0);
                let b = (0..vars).map(|_| rng.gen_range(0.2..1.5)).collect();
                let deg = rng.gen_range(0..=4);
                let cs = (0..=deg).map(|_| rng.gen_range(0.1..1.0)).collect();
                (b0, b, cs)
            })
            .collect();
        Factor { c0, a, polys }
    }

    pub fn eval_dd(&self, x: &[Dd]) -> Dd {
        let affine = |c: f64, l: &[f64]| {
            l.iter()
                .zip(x)
                .fold(Dd::from(c), |acc, (&li, &xi)| acc + Dd::from(li) * xi)
        };
        let mut out = affine(self.c0, &self.a).exp();
        for (b0, b, cs) in &self.polys {
            let y = affine(*b0, b);
            let mut p = Dd::ZERO;
            for &c in cs.iter().rev() {
                p = p * y + Dd::from(c);
            }
            out = out * p;
        }
        out
    }

    /// The same function in jet arithmetic. `general` routes through the
    /// generic `exp`, `compose_poly` and full products instead of the
    /// affine shortcuts.
    pub fn jet(&self, shape: &Arc<JetShape>, general: bool) -> Jet {
        let affine = |c: f64, l: &[f64]| {
            let mut a = Affine::constant(c);
            a.linear[..l.len()].copy_from_slice(l);
            a
        };
        let e = affine(self.c0, &self.a);
        let mut out = if general {
            e.to_jet(shape).exp()
        } else {
            Jet::exp_affine(shape, &e)
        };
        for (b0, b, cs) in &self.polys {
            let arg = affine(*b0, b);
            let p = Poly::new(cs.clone());
            out = if general {
                out.try_mul(&Jet::compose_poly(&p, &arg.to_jet(shape))).unwrap()
            } else {
                out.mul_poly_affine(&p, &arg)
            };
        }
        out
    }
}
