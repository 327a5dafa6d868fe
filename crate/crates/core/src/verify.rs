//! Numerical checks of the identities linking the shifted expressions to
//! the main-term integrals.
//!
//! Shifts are scaled so that the large logarithm drops out: a shift `a`
//! contributes `e^{θ·a·x}` and the length factor `T^{-(a+c)t}` becomes
//! `e^{-(a+c)t}`. Everything is then an ordinary finite integral.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Affine, Jet, JetShape, MAX_ORDER};
use crate::mollifier::MollifierConfig;
use crate::quadrature::{tensor_sum, GaussLegendre, GridSpec};
use crate::terms::{self, Term};

/// Largest admissible scaled shift.
pub const SHIFT_LIMIT: f64 = 10.0;

/// Scaled shifts `(a, b, c)` and, for four-shift families, `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftVector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: Option<f64>,
}

impl ShiftVector {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::check(ShiftVector { a, b, c, d: None })
    }

    pub fn with_d(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::check(ShiftVector { a, b, c, d: Some(d) })
    }

    fn check(s: ShiftVector) -> Result<Self> {
        for (name, v) in [("a", s.a), ("b", s.b), ("c", s.c), ("d", s.d.unwrap_or(0.0))] {
            if !(v.is_finite() && v.abs() <= SHIFT_LIMIT) {
                return Err(Error::config(
                    "shift",
                    format!("{name} = {v} outside [-{SHIFT_LIMIT}, {SHIFT_LIMIT}]"),
                ));
            }
        }
        Ok(s)
    }
}

/// `|(1 - e^{-s z}) / s - z ∫_0^1 e^{-s z t} dt|` with `z = z_log`; the
/// closed form is taken as its limit `z` at `s = 0`.
pub fn check_int_identity(z_log: f64, s: f64, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    if !(z_log.is_finite() && s.is_finite()) {
        return Err(Error::NonFinite {
            coords: vec![z_log, s],
        });
    }
    let lhs = if s == 0.0 {
        z_log
    } else {
        -(-s * z_log).exp_m1() / s
    };
    let rule = GaussLegendre::new(grid.nodes_per_dim);
    let rhs = z_log * tensor_sum(1, &rule, |t: &[f64]| (-s * z_log * t[0]).exp())?;
    Ok((lhs - rhs).abs())
}

/// Denominators closer to zero than this are rejected.
pub const SINGULAR_EPS: f64 = 1e-6;

/// `|1/((a+c)(b+c)) - 1/((a+c)(b-a)) - 1/((a-b)(b+c))|`.
pub fn check_partial_fraction(a: f64, b: f64, c: f64) -> Result<f64> {
    let (ac, bc, ba) = (a + c, b + c, b - a);
    if [ac, bc, ba].iter().any(|d| d.is_nan() || d.abs() <= SINGULAR_EPS) {
        return Err(Error::NearSingular(format!(
            "denominators a+c = {ac}, b+c = {bc}, b-a = {ba}"
        )));
    }
    let lhs = 1.0 / (ac * bc);
    let rhs = 1.0 / (ac * ba) + 1.0 / (-ba * bc);
    Ok((lhs - rhs).abs())
}

/// The shifted `c31` expression with `Q(-∂_b) Q(-∂_c)` applied, at shift
/// `s` (its `b` and `c` are the expansion points).
///
/// The exponential is built as a general jet in `(x1, x2, x3, b, c)` and
/// expanded to order `deg Q` in the shifts; nothing is shared with the
/// evaluator in [`crate::terms`] beyond the polynomials.
pub fn eval_c31_shifted(cfg: &MollifierConfig, s: &ShiftVector, nodes: usize) -> Result<f64> {
    cfg.validate_structure()?;
    let q = cfg.polys.q();
    let (p1, p3) = (cfg.polys.p1(), cfg.polys.p3());
    if p1.is_zero() || p3.is_zero() {
        return Ok(0.0);
    }
    let deg = q.degree();
    if deg > MAX_ORDER as usize {
        return Err(Error::OrderExceedsShape {
            requested: vec![deg as u8],
            orders: vec![MAX_ORDER],
        });
    }
    let k = deg.max(1) as u8;
    let shape = JetShape::new(&[1, 1, 2, k, k])?;
    let (th1, th3) = (cfg.theta1, cfg.theta3);
    let x = |v: usize| Affine::var(v);
    let h = 1.0 + th1 * x(0) + th3 * x(2);
    let a = s.a;

    let integrand = |pt: &[f64]| -> Jet {
        let (t1, t2, u) = (pt[0], pt[1], pt[2]);
        let b = Jet::variable(&shape, 3, s.b).expect("in shape");
        let c = Jet::variable(&shape, 4, s.c).expect("in shape");
        let hj = h.to_jet(&shape);
        let x2 = x(1).to_jet(&shape);
        let x3 = x(2).to_jet(&shape);
        let drift = (th1 * (x(1) - x(0)) + t1 * h).to_jet(&shape);
        // θ1(a x1 + b x2) + θ3 c x3 - (a + c) t1 H - (b - a) t2 (θ1(x2 - x1) + t1 H)
        let mut e = (th1 * a * x(0) - a * t1 * h + a * t2 * (th1 * (x(1) - x(0)) + t1 * h))
            .to_jet(&shape);
        e = &e + &(&(&b * &x2) * th1);
        e = &e + &(&(&c * &x3) * th3);
        e = &e - &(&(&c * &hj) * t1);
        e = &e - &(&(&b * &drift) * t2);
        let lead = -th1 * (x(0) - x(1)) + t1 * h;
        e.exp()
            .mul_affine(&lead)
            .mul_affine(&h)
            .mul_poly_affine(&p1, &(x(0) + x(1) + (1.0 - th3 / th1 * (1.0 - u))))
            .mul_poly_affine(&p3, &(x(2) + u))
            .scale(1.0 - u)
    };
    let rule = GaussLegendre::new(nodes);
    let jet = tensor_sum(3, &rule, integrand)?;

    let qc = q.coeffs();
    let mut total = 0.0;
    for (i, &qi) in qc.iter().enumerate() {
        for (j, &qj) in qc.iter().enumerate() {
            if qi == 0.0 || qj == 0.0 {
                continue;
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * qi * qj * jet.extract(&[1, 1, 2, i as u8, j as u8])?;
        }
    }
    Ok(total / (th1 * th1))
}

/// Outcome of [`check_operator_reduction_c31`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorResidual {
    pub shifted: f64,
    pub direct: f64,
    pub residual: f64,
    /// False when `direct` vanishes and the residual is absolute.
    pub relative: bool,
}

/// Compares the operator form of `c31` at `a = 0, b = c = -R` with the
/// direct evaluator at the same node count.
pub fn check_operator_reduction_c31(
    cfg: &MollifierConfig,
    derivative_order_cap: usize,
) -> Result<OperatorResidual> {
    let deg = cfg.polys.q().degree();
    if deg > derivative_order_cap {
        return Err(Error::config(
            "q",
            format!("degree {deg} exceeds the derivative cap {derivative_order_cap}"),
        ));
    }
    let shift = ShiftVector::new(0.0, -cfg.r, -cfg.r)?;
    let nodes = Term::C31.grid(&cfg.grid).nodes_per_dim;
    let shifted = eval_c31_shifted(cfg, &shift, nodes)?;
    let direct = terms::eval_c31(cfg)?.value;
    let diff = (shifted - direct).abs();
    let relative = direct.abs() > 1e-14;
    Ok(OperatorResidual {
        shifted,
        direct,
        residual: if relative { diff / direct.abs() } else { diff },
        relative,
    })
}

/// One named check with its residual and threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            residual,
            tolerance,
            passed: residual < tolerance,
        }
    }
}

/// Draws `count` pairs `(s, z_log)` with `s ∈ [-2, 2]`, `z_log ∈ [0, 3]`
/// and returns the largest residual.
pub fn sweep_int_identity(count: usize, seed: u64, grid: &GridSpec) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let s = rng.gen_range(-2.0..=2.0);
        let z = rng.gen_range(0.0..=3.0);
        worst = worst.max(check_int_identity(z, s, grid)?);
    }
    Ok(worst)
}

/// Draws `count` triples with every denominator at least 0.1 in size and
/// returns the largest residual.
pub fn sweep_partial_fraction(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < count {
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(-5.0..=5.0),
            rng.gen_range(-5.0..=5.0),
            rng.gen_range(-5.0..=5.0),
        );
        if [a + c, b + c, b - a].iter().any(|d| d.abs() < 0.1) {
            continue;
        }
        worst = worst.max(check_partial_fraction(a, b, c)?);
        done += 1;
    }
    Ok(worst)
}

/// The full battery run by the `verify` command.
pub fn run_suite(cfg: &MollifierConfig, seed: u64) -> Result<Vec<CheckOutcome>> {
    let line = GridSpec::new(1, 24)?;
    let mut out = vec![
        CheckOutcome::new("int_identity s=0 z=2", check_int_identity(2.0, 0.0, &line)?, 1e-12),
        CheckOutcome::new("int_identity s=1 z=1", check_int_identity(1.0, 1.0, &line)?, 1e-12),
        CheckOutcome::new("int_identity sweep (100)", sweep_int_identity(100, seed, &line)?, 1e-11),
        CheckOutcome::new("partial_fraction (1,2,3)", check_partial_fraction(1.0, 2.0, 3.0)?, 1e-14),
        CheckOutcome::new(
            "partial_fraction (0.1,-0.2,0.5)",
            check_partial_fraction(0.1, -0.2, 0.5)?,
            1e-13,
        ),
        CheckOutcome::new("partial_fraction sweep (1000)", sweep_partial_fraction(1000, seed)?, 1e-12),
    ];
    let op = check_operator_reduction_c31(cfg, MAX_ORDER as usize)?;
    out.push(CheckOutcome::new("operator_reduction_c31", op.residual, 1e-6));
    Ok(out)
}
