//! Fast surrogate of the aggregate used during the search.
//!
//! Coefficient tensors are built at Chebyshev points in `R` and combined
//! with barycentric weights, so a candidate costs a few contractions
//! instead of six quadratures.

use crate::error::{Error, Result};
use crate::mollifier::TermGrids;
use crate::terms::forms::{AggregateForm, MonomialRanges};
use crate::terms::{Params, ResolvedPolys, Term};

#[derive(Debug, Clone)]
pub struct SearchModel {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    forms: Vec<AggregateForm>,
}

/// Chebyshev points of the second kind on `[lo, hi]` and their
/// barycentric weights.
pub fn chebyshev_points(lo: f64, hi: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(count >= 2);
    let n = count - 1;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for j in 0..=n {
        let x = (std::f64::consts::PI * j as f64 / n as f64).cos();
        nodes.push(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        weights.push(if j == 0 || j == n { 0.5 * sign } else { sign });
    }
    (nodes, weights)
}

/// Barycentric interpolation of `values` given at `nodes`.
pub fn barycentric(nodes: &[f64], weights: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &wj), &fj) in nodes.iter().zip(weights).zip(values) {
        let d = x - xj;
        if d == 0.0 {
            return fj;
        }
        let c = wj / d;
        num += c * fj;
        den += c;
    }
    num / den
}

impl SearchModel {
    /// Builds tensors for exponents `theta` at `count` points of `[lo, hi]`.
    pub fn build(
        theta: [f64; 3],
        ranges: &MonomialRanges,
        grids: &TermGrids,
        (lo, hi): (f64, f64),
        count: usize,
    ) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::config("r_range", format!("invalid interval [{lo}, {hi}]")));
        }
        if count < 2 {
            return Err(Error::config("r_nodes", "need at least 2"));
        }
        let (nodes, weights) = chebyshev_points(lo, hi, count);
        let forms = nodes
            .iter()
            .map(|&r| {
                let params = Params {
                    theta1: theta[0],
                    theta2: theta[1],
                    theta3: theta[2],
                    r,
                };
                AggregateForm::build(&params, ranges, grids)
            })
            .collect::<Result<_>>()?;
        Ok(SearchModel {
            lo,
            hi,
            nodes,
            weights,
            forms,
        })
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Term values in [`Term::ALL`] order, or `None` outside the `R` range.
    pub fn term_values(&self, r: f64, polys: &ResolvedPolys) -> Option<[f64; 6]> {
        if !(self.lo..=self.hi).contains(&r) {
            return None;
        }
        let at_nodes: Vec<[f64; 6]> = self.forms.iter().map(|f| f.term_values(polys)).collect();
        let mut out = [0.0; 6];
        for (k, o) in out.iter_mut().enumerate() {
            let vals: Vec<f64> = at_nodes.iter().map(|v| v[k]).collect();
            *o = barycentric(&self.nodes, &self.weights, &vals, r);
        }
        Some(out)
    }

    pub fn c_total(&self, r: f64, polys: &ResolvedPolys) -> Option<f64> {
        self.term_values(r, polys).map(|v| aggregate(&v))
    }
}

/// `c1 + c2 + c3 + 2(c12 + c23 + c31)` from values in [`Term::ALL`] order.
pub fn aggregate(values: &[f64; 6]) -> f64 {
    values
        .iter()
        .zip(Term::ALL)
        .map(|(v, t)| t.multiplicity() * v)
        .sum()
}
