//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients of a scalar function of the
//! variables `x_0 .. x_{n-1}` at the origin, densely indexed by multi-index
//! `α` with `α_v <= order_v`. Products drop every monomial whose exponent
//! exceeds the per-variable order, so arithmetic is exact for the retained
//! coefficients. [`Jet::extract`] turns a coefficient back into a mixed
//! partial derivative.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Largest supported number of variables.
pub const MAX_VARS: usize = 6;
/// Largest supported truncation order per variable.
pub const MAX_ORDER: u8 = 8;

/// Per-variable truncation orders plus the index tables derived from them.
pub struct JetShape {
    orders: Vec<u8>,
    strides: Vec<usize>,
    len: usize,
    digits: Vec<u8>,
    mul_pairs: Vec<(u16, u16)>,
    // shifts[v] lists (from, to) with `to = from + e_v`, both in range
    shifts: Vec<Vec<(u16, u16)>>,
}

impl fmt::Debug for JetShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetShape")
            .field("orders", &self.orders)
            .field("len", &self.len)
            .finish()
    }
}

impl PartialEq for JetShape {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
    }
}

impl JetShape {
    pub fn new(orders: &[u8]) -> Result<Arc<JetShape>> {
        if orders.is_empty() || orders.len() > MAX_VARS {
            return Err(Error::InvalidShape(format!(
                "need 1..={MAX_VARS} variables, got {}",
                orders.len()
            )));
        }
        if let Some(&bad) = orders.iter().find(|&&o| o == 0 || o > MAX_ORDER) {
            return Err(Error::InvalidShape(format!(
                "per-variable order must be in 1..={MAX_ORDER}, got {bad}"
            )));
        }
        let nv = orders.len();
        let mut strides = vec![0usize; nv];
        let mut len = 1usize;
        // first variable varies slowest
        for v in (0..nv).rev() {
            strides[v] = len;
            len *= orders[v] as usize + 1;
        }
        if len > u16::MAX as usize {
            return Err(Error::InvalidShape(format!("{len} coefficients is too many")));
        }
        let mut digits = vec![0u8; len * nv];
        for idx in 0..len {
            for v in 0..nv {
                digits[idx * nv + v] = ((idx / strides[v]) % (orders[v] as usize + 1)) as u8;
            }
        }
        let mut mul_pairs = Vec::new();
        for i in 0..len {
            let di = &digits[i * nv..(i + 1) * nv];
            for j in 0..len {
                let dj = &digits[j * nv..(j + 1) * nv];
                if (0..nv).all(|v| di[v] + dj[v] <= orders[v]) {
                    mul_pairs.push((i as u16, j as u16));
                }
            }
        }
        let shifts = (0..nv)
            .map(|v| {
                (0..len)
                    .filter(|&idx| digits[idx * nv + v] < orders[v])
                    .map(|idx| (idx as u16, (idx + strides[v]) as u16))
                    .collect()
            })
            .collect();
        Ok(Arc::new(JetShape {
            orders: orders.to_vec(),
            strides,
            len,
            digits,
            mul_pairs,
            shifts,
        }))
    }

    /// Same order for every variable.
    pub fn uniform(vars: usize, order: u8) -> Result<Arc<JetShape>> {
        JetShape::new(&vec![order; vars])
    }

    pub fn var_count(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[u8] {
        &self.orders
    }

    /// Number of stored coefficients, `Π (order_v + 1)`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Sum of the per-variable orders: the largest total degree kept.
    pub fn total_order(&self) -> usize {
        self.orders.iter().map(|&o| o as usize).sum()
    }

    pub fn index_of(&self, alpha: &[u8]) -> Result<usize> {
        if alpha.len() != self.orders.len()
            || alpha.iter().zip(&self.orders).any(|(a, o)| a > o)
        {
            return Err(Error::OrderExceedsShape {
                requested: alpha.to_vec(),
                orders: self.orders.clone(),
            });
        }
        Ok(alpha
            .iter()
            .zip(&self.strides)
            .map(|(&a, &s)| a as usize * s)
            .sum())
    }

    pub fn multi_index(&self, idx: usize) -> &[u8] {
        let nv = self.orders.len();
        &self.digits[idx * nv..(idx + 1) * nv]
    }

    /// Index of the coefficient carrying every variable at its full order.
    pub fn top_index(&self) -> usize {
        self.len - 1
    }
}

fn check_same(a: &Arc<JetShape>, b: &Arc<JetShape>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.orders == b.orders {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            left: a.orders.clone(),
            right: b.orders.clone(),
        })
    }
}

/// An affine form `c + Σ_v l_v x_v`.
///
/// Every argument of the main-term integrands is affine in the `x`
/// variables, so the hot loops build these and feed them to the cheap
/// `*_affine` jet kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub constant: f64,
    pub linear: [f64; MAX_VARS],
}

impl Affine {
    pub const fn constant(c: f64) -> Self {
        Affine {
            constant: c,
            linear: [0.0; MAX_VARS],
        }
    }

    /// The form `x_v`.
    pub fn var(v: usize) -> Self {
        let mut a = Affine::constant(0.0);
        a.linear[v] = 1.0;
        a
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + x.iter().zip(&self.linear).map(|(x, l)| x * l).sum::<f64>()
    }

    pub fn to_jet(&self, shape: &Arc<JetShape>) -> Jet {
        let mut j = Jet::constant(shape, self.constant);
        for v in 0..shape.var_count() {
            j.coeffs[shape.strides[v]] = self.linear[v];
        }
        j
    }
}

impl Add for Affine {
    type Output = Affine;
    fn add(mut self, rhs: Affine) -> Affine {
        self.constant += rhs.constant;
        for (l, r) in self.linear.iter_mut().zip(rhs.linear) {
            *l += r;
        }
        self
    }
}

impl Add<f64> for Affine {
    type Output = Affine;
    fn add(mut self, rhs: f64) -> Affine {
        self.constant += rhs;
        self
    }
}

impl Add<Affine> for f64 {
    type Output = Affine;
    fn add(self, rhs: Affine) -> Affine {
        rhs + self
    }
}

impl Sub for Affine {
    type Output = Affine;
    fn sub(self, rhs: Affine) -> Affine {
        self + rhs * -1.0
    }
}

impl Sub<f64> for Affine {
    type Output = Affine;
    fn sub(self, rhs: f64) -> Affine {
        self + -rhs
    }
}

impl Sub<Affine> for f64 {
    type Output = Affine;
    fn sub(self, rhs: Affine) -> Affine {
        rhs * -1.0 + self
    }
}

impl Mul<f64> for Affine {
    type Output = Affine;
    fn mul(mut self, rhs: f64) -> Affine {
        self.constant *= rhs;
        for l in &mut self.linear {
            *l *= rhs;
        }
        self
    }
}

impl Mul<Affine> for f64 {
    type Output = Affine;
    fn mul(self, rhs: Affine) -> Affine {
        rhs * self
    }
}

impl Neg for Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        self * -1.0
    }
}

/// Truncated Taylor expansion at the origin.
#[derive(Clone)]
pub struct Jet {
    shape: Arc<JetShape>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("orders", &self.shape.orders)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.shape.orders == other.shape.orders && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn constant(shape: &Arc<JetShape>, c: f64) -> Jet {
        let mut coeffs = vec![0.0; shape.len];
        coeffs[0] = c;
        Jet {
            shape: Arc::clone(shape),
            coeffs,
        }
    }

    pub fn zero(shape: &Arc<JetShape>) -> Jet {
        Jet::constant(shape, 0.0)
    }

    /// The jet of `base + x_v`.
    pub fn variable(shape: &Arc<JetShape>, v: usize, base: f64) -> Result<Jet> {
        if v >= shape.var_count() {
            return Err(Error::VariableOutOfRange {
                index: v,
                vars: shape.var_count(),
            });
        }
        let mut j = Jet::constant(shape, base);
        j.coeffs[shape.strides[v]] = 1.0;
        Ok(j)
    }

    /// Builds a jet from raw coefficients in the shape's index order.
    pub fn from_coeffs(shape: &Arc<JetShape>, coeffs: Vec<f64>) -> Result<Jet> {
        if coeffs.len() != shape.len {
            return Err(Error::InvalidShape(format!(
                "expected {} coefficients, got {}",
                shape.len,
                coeffs.len()
            )));
        }
        Ok(Jet {
            shape: Arc::clone(shape),
            coeffs,
        })
    }

    pub fn shape(&self) -> &Arc<JetShape> {
        &self.shape
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &[u8]) -> Result<f64> {
        Ok(self.coeffs[self.shape.index_of(alpha)?])
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        check_same(&self.shape, &other.shape)?;
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        check_same(&self.shape, &other.shape)?;
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        check_same(&self.shape, &other.shape)?;
        let mut out = vec![0.0; self.shape.len];
        let (a, b) = (&self.coeffs, &other.coeffs);
        for &(i, j) in &self.shape.mul_pairs {
            let (i, j) = (i as usize, j as usize);
            out[i + j] += a[i] * b[j];
        }
        Ok(Jet {
            shape: Arc::clone(&self.shape),
            coeffs: out,
        })
    }

    /// Coefficient of the full-order monomial in `self * other`, without
    /// forming the rest of the product.
    pub fn mul_top(&self, other: &Jet) -> Result<f64> {
        check_same(&self.shape, &other.shape)?;
        let top = self.shape.top_index();
        Ok((0..=top)
            .map(|i| self.coeffs[i] * other.coeffs[top - i])
            .sum())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            shape: Arc::clone(&self.shape),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `self += w * other`.
    pub fn axpy(&mut self, w: f64, other: &Jet) -> Result<()> {
        check_same(&self.shape, &other.shape)?;
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += w * b);
        Ok(())
    }

    /// Product with an affine form, `O(len · vars)`.
    pub fn mul_affine(&self, a: &Affine) -> Jet {
        let mut out: Vec<f64> = self.coeffs.iter().map(|c| c * a.constant).collect();
        for (v, pairs) in self.shape.shifts.iter().enumerate() {
            let l = a.linear[v];
            if l == 0.0 {
                continue;
            }
            for &(from, to) in pairs {
                out[to as usize] += l * self.coeffs[from as usize];
            }
        }
        Jet {
            shape: Arc::clone(&self.shape),
            coeffs: out,
        }
    }

    /// `exp` of a general jet: `e^{a0} Σ_{k≤K} (a - a0)^k / k!` with `K`
    /// the total order, which is exact after truncation.
    pub fn exp(&self) -> Jet {
        let a0 = self.coeffs[0];
        let mut d = self.clone();
        d.coeffs[0] = 0.0;
        let k_max = self.shape.total_order();
        // Horner: 1 + d(1 + d/2(1 + d/3(...)))
        let mut acc = Jet::constant(&self.shape, 1.0);
        for k in (1..=k_max).rev() {
            acc = d.try_mul(&acc).expect("same shape").scale(1.0 / k as f64);
            acc.coeffs[0] += 1.0;
        }
        acc.scale(a0.exp())
    }

    /// `exp` of an affine form. The exponential factors over the variables,
    /// so every coefficient is `e^c Π_v l_v^{α_v} / α_v!`.
    pub fn exp_affine(shape: &Arc<JetShape>, a: &Affine) -> Jet {
        let nv = shape.var_count();
        let mut per_var: [[f64; MAX_ORDER as usize + 1]; MAX_VARS] =
            [[0.0; MAX_ORDER as usize + 1]; MAX_VARS];
        for v in 0..nv {
            let mut term = 1.0;
            for k in 0..=shape.orders[v] as usize {
                per_var[v][k] = term;
                term *= a.linear[v] / (k + 1) as f64;
            }
        }
        let e0 = a.constant.exp();
        let coeffs = (0..shape.len)
            .map(|idx| {
                shape
                    .multi_index(idx)
                    .iter()
                    .enumerate()
                    .fold(e0, |acc, (v, &d)| acc * per_var[v][d as usize])
            })
            .collect();
        Jet {
            shape: Arc::clone(shape),
            coeffs,
        }
    }

    /// `p(a)` by Horner's rule over jet arithmetic.
    pub fn compose_poly(p: &Poly, a: &Jet) -> Jet {
        let mut acc = Jet::zero(&a.shape);
        for &c in p.coeffs().iter().rev() {
            acc = acc.try_mul(a).expect("same shape");
            acc.coeffs[0] += c;
        }
        acc
    }

    /// `p(a)` for an affine argument.
    pub fn compose_poly_affine(shape: &Arc<JetShape>, p: &Poly, a: &Affine) -> Jet {
        let mut acc = Jet::zero(shape);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul_affine(a);
            acc.coeffs[0] += c;
        }
        acc
    }

    /// `self · p(a)` for an affine argument, by Horner's rule on `self`.
    pub fn mul_poly_affine(&self, p: &Poly, a: &Affine) -> Jet {
        let mut acc = Jet::zero(&self.shape);
        for &c in p.coeffs().iter().rev() {
            acc = acc.mul_affine(a);
            if c != 0.0 {
                acc.axpy(c, self).expect("same shape");
            }
        }
        acc
    }

    /// Mixed partial derivative `∂^α f(0)`: the coefficient at `α` times
    /// `Π α_v!`.
    pub fn extract(&self, orders: &[u8]) -> Result<f64> {
        let idx = self.shape.index_of(orders)?;
        let fact: f64 = orders.iter().map(|&o| factorial(o as usize)).product();
        Ok(self.coeffs[idx] * fact)
    }

    /// Extracts the derivative carrying every variable at its full order.
    pub fn extract_top(&self) -> f64 {
        let fact: f64 = self
            .shape
            .orders
            .iter()
            .map(|&o| factorial(o as usize))
            .product();
        self.coeffs[self.shape.top_index()] * fact
    }

    /// Evaluates the truncated polynomial at `x`.
    pub fn eval_at(&self, x: &[f64]) -> f64 {
        (0..self.shape.len)
            .map(|idx| {
                self.shape
                    .multi_index(idx)
                    .iter()
                    .zip(x)
                    .fold(self.coeffs[idx], |acc, (&d, &xv)| acc * xv.powi(d as i32))
            })
            .sum()
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Add for &Jet {
    type Output = Jet;
    /// Panics on shape mismatch; use [`Jet::try_add`] to handle it.
    fn add(self, rhs: &Jet) -> Jet {
        self.try_add(rhs).unwrap()
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.try_sub(rhs).unwrap()
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.try_mul(rhs).unwrap()
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn shape_sizes() {
        assert_eq!(JetShape::uniform(4, 2).unwrap().len(), 81);
        assert_eq!(JetShape::new(&[1, 1, 2]).unwrap().len(), 12);
        assert!(JetShape::new(&[]).is_err());
        assert!(JetShape::new(&[0]).is_err());
        assert!(JetShape::new(&[2; 7]).is_err());
    }

    #[test]
    fn variable_examples() {
        let s = JetShape::uniform(1, 2).unwrap();
        assert_eq!(Jet::variable(&s, 0, 0.0).unwrap().coeffs(), &[0.0, 1.0, 0.0]);
        let s2 = JetShape::uniform(2, 1).unwrap();
        let j = Jet::variable(&s2, 1, 3.5).unwrap();
        assert_eq!(j.coeff(&[0, 0]).unwrap(), 3.5);
        assert_eq!(j.coeff(&[0, 1]).unwrap(), 1.0);
        assert_eq!(j.coeff(&[1, 0]).unwrap(), 0.0);
        assert_eq!(j.eval_at(&[0.0, 0.0]), 3.5);
        assert!(matches!(
            Jet::variable(&s2, 2, 0.0),
            Err(Error::VariableOutOfRange { index: 2, vars: 2 })
        ));
    }

    #[test]
    fn square_with_and_without_truncation() {
        let s2 = JetShape::uniform(1, 2).unwrap();
        let a = Jet::variable(&s2, 0, 1.0).unwrap();
        assert_eq!((&a * &a).coeffs(), &[1.0, 2.0, 1.0]);
        let s1 = JetShape::uniform(1, 1).unwrap();
        let b = Jet::variable(&s1, 0, 1.0).unwrap();
        assert_eq!((&b * &b).coeffs(), &[1.0, 2.0]);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = Jet::constant(&JetShape::uniform(1, 2).unwrap(), 1.0);
        let b = Jet::constant(&JetShape::uniform(1, 1).unwrap(), 1.0);
        assert!(matches!(a.try_mul(&b), Err(Error::ShapeMismatch { .. })));
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn exp_examples() {
        let s = JetShape::uniform(1, 2).unwrap();
        assert_eq!(Jet::zero(&s).exp().coeffs(), &[1.0, 0.0, 0.0]);
        let x = Jet::variable(&s, 0, 0.0).unwrap();
        let e = x.exp();
        assert!(close(e.coeffs()[1], 1.0, 1e-15) && close(e.coeffs()[2], 0.5, 1e-15));

        let s2 = JetShape::new(&[2, 1]).unwrap();
        let mut lin = Affine::constant(0.0);
        lin.linear[0] = 3.0;
        lin.linear[1] = 2.0;
        let e = lin.to_jet(&s2).exp();
        assert!(close(e.extract(&[2, 1]).unwrap(), 18.0, 1e-14));
        let ea = Jet::exp_affine(&s2, &lin);
        for (p, q) in e.coeffs().iter().zip(ea.coeffs()) {
            assert!(close(*p, *q, 1e-14));
        }
    }

    #[test]
    fn compose_examples() {
        let s = JetShape::uniform(1, 2).unwrap();
        let a = Jet::variable(&s, 0, 1.0).unwrap();
        let sq = Poly::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(Jet::compose_poly(&sq, &a).coeffs(), &[1.0, 2.0, 1.0]);
        let aff = Affine::constant(1.0) + Affine::var(0);
        assert_eq!(Jet::compose_poly_affine(&s, &sq, &aff).coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn extract_examples() {
        let s = JetShape::uniform(1, 2).unwrap();
        let x = Jet::variable(&s, 0, 0.0).unwrap();
        assert_eq!((&x * &x).extract(&[2]).unwrap(), 2.0);
        let s2 = JetShape::uniform(2, 1).unwrap();
        assert_eq!(Jet::constant(&s2, 7.0).extract(&[1, 1]).unwrap(), 0.0);
        assert!(matches!(
            Jet::constant(&s2, 7.0).extract(&[2, 0]),
            Err(Error::OrderExceedsShape { .. })
        ));
    }

    #[test]
    fn affine_kernels_agree_with_general_ones() {
        let s = JetShape::new(&[2, 1, 2]).unwrap();
        let mut a = Affine::constant(0.3);
        a.linear[..3].copy_from_slice(&[0.7, -1.1, 0.4]);
        let mut b = Affine::constant(-0.2);
        b.linear[..3].copy_from_slice(&[0.5, 0.25, -0.9]);
        let p = Poly::new(vec![0.1, -0.4, 0.0, 1.3, 0.2]);
        let base = Jet::exp_affine(&s, &b);
        let via_general = &base * &Jet::compose_poly(&p, &a.to_jet(&s));
        let via_affine = base.mul_poly_affine(&p, &a);
        for (x, y) in via_general.coeffs().iter().zip(via_affine.coeffs()) {
            assert!(close(*x, *y, 1e-14));
        }
        let top = base.mul_top(&a.to_jet(&s)).unwrap();
        let full = &base * &a.to_jet(&s);
        assert!(close(top, full.coeffs()[s.top_index()], 1e-15));
    }
}
