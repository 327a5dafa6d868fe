//! Tensor-product Gauss–Legendre integration over `[0,1]^d` and over the
//! region `{t1, t2 >= 0, t1 + t2 <= u <= 1}`.
//!
//! Summation order is fixed: nodes are visited lexicographically inside
//! blocks indexed by the two outermost coordinates, and block sums are
//! combined by a pairwise tree in block order. Results are therefore
//! bit-identical whatever the size of the rayon pool.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

pub const MAX_DIMS: usize = 5;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            // z is the i-th largest root on [-1, 1]
            nodes[i] = 0.5 * (1.0 - z);
            nodes[n - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Resolution of a tensor Gauss–Legendre grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: usize,
    pub nodes_per_dim: usize,
}

impl GridSpec {
    pub fn new(dims: usize, nodes_per_dim: usize) -> Result<Self> {
        let g = GridSpec {
            dims,
            nodes_per_dim,
        };
        g.validate()?;
        Ok(g)
    }

    /// 24 nodes per dimension up to three dimensions, 16 beyond.
    pub fn default_for(dims: usize) -> Self {
        GridSpec {
            dims,
            nodes_per_dim: if dims <= 3 { 24 } else { 16 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIMS).contains(&self.dims) {
            return Err(Error::InvalidGrid(format!(
                "dims must be in 1..={MAX_DIMS}, got {}",
                self.dims
            )));
        }
        if self.nodes_per_dim < 2 {
            return Err(Error::InvalidGrid(format!(
                "nodes_per_dim must be at least 2, got {}",
                self.nodes_per_dim
            )));
        }
        Ok(())
    }

    pub fn total_nodes(&self) -> usize {
        self.nodes_per_dim.pow(self.dims as u32)
    }

    /// The lower resolution used for the refinement estimate: three
    /// quarters of the nodes, rounded down, and at least one fewer.
    pub fn coarser(&self) -> GridSpec {
        let n = self.nodes_per_dim;
        let c = (3 * n / 4).clamp(1, n - 1);
        GridSpec {
            dims: self.dims,
            nodes_per_dim: c,
        }
    }

    pub fn with_nodes(&self, nodes_per_dim: usize) -> GridSpec {
        GridSpec {
            dims: self.dims,
            nodes_per_dim,
        }
    }
}

/// Values that can be accumulated by the quadrature driver.
pub trait QuadValue: Clone + Send {
    /// `self += w * other`.
    fn add_scaled(&mut self, w: f64, other: &Self);
    fn scaled(&self, w: f64) -> Self;
    fn all_finite(&self) -> bool;
    /// Largest absolute componentwise difference.
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl QuadValue for f64 {
    fn add_scaled(&mut self, w: f64, other: &f64) {
        *self += w * other;
    }
    fn scaled(&self, w: f64) -> f64 {
        self * w
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn max_abs_diff(&self, other: &f64) -> f64 {
        (self - other).abs()
    }
}

impl QuadValue for Vec<f64> {
    fn add_scaled(&mut self, w: f64, other: &Vec<f64>) {
        assert_eq!(self.len(), other.len());
        self.iter_mut().zip(other).for_each(|(a, b)| *a += w * b);
    }
    fn scaled(&self, w: f64) -> Vec<f64> {
        self.iter().map(|a| a * w).collect()
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|a| a.is_finite())
    }
    fn max_abs_diff(&self, other: &Vec<f64>) -> f64 {
        self.iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl QuadValue for Jet {
    fn add_scaled(&mut self, w: f64, other: &Jet) {
        self.axpy(w, other).expect("integrand returned jets of differing shapes");
    }
    fn scaled(&self, w: f64) -> Jet {
        self.scale(w)
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn max_abs_diff(&self, other: &Jet) -> f64 {
        self.coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Integral value at the requested resolution and at the next-lower one.
#[derive(Debug, Clone)]
pub struct QuadResult<V> {
    pub value: V,
    pub coarse: V,
    pub refinement_delta: f64,
}

fn pairwise<V: QuadValue>(mut items: Vec<V>) -> Option<V> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.add_scaled(1.0, &b);
            }
            next.push(a);
        }
        items = next;
    }
    items.pop()
}

/// Weighted sum of `f` over the `n^dims` tensor grid of `rule`.
pub fn tensor_sum<V, F>(dims: usize, rule: &GaussLegendre, f: F) -> Result<V>
where
    V: QuadValue,
    F: Fn(&[f64]) -> V + Sync,
{
    if !(1..=MAX_DIMS).contains(&dims) {
        return Err(Error::InvalidGrid(format!("dims must be in 1..={MAX_DIMS}")));
    }
    let n = rule.len();
    let outer_dims = dims.min(2);
    let blocks = n.pow(outer_dims as u32);
    let inner_dims = dims - outer_dims;
    let inner = n.pow(inner_dims as u32);

    let block_sums: Vec<V> = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<V> {
            let mut idx = [0usize; MAX_DIMS];
            let mut point = [0.0f64; MAX_DIMS];
            let mut rem = b;
            for d in (0..outer_dims).rev() {
                idx[d] = rem % n;
                rem /= n;
            }
            let mut acc: Option<V> = None;
            for k in 0..inner {
                let mut rem = k;
                for d in (outer_dims..dims).rev() {
                    idx[d] = rem % n;
                    rem /= n;
                }
                let mut w = 1.0;
                for d in 0..dims {
                    point[d] = rule.nodes[idx[d]];
                    w *= rule.weights[idx[d]];
                }
                let v = f(&point[..dims]);
                if !v.all_finite() {
                    return Err(Error::NonFinite {
                        coords: point[..dims].to_vec(),
                    });
                }
                match acc.as_mut() {
                    Some(a) => a.add_scaled(w, &v),
                    None => acc = Some(v.scaled(w)),
                }
            }
            Ok(acc.expect("blocks are non-empty"))
        })
        .collect::<Result<_>>()?;
    Ok(pairwise(block_sums).expect("at least one block"))
}

/// Integrates `f` over `[0,1]^dims`, with a refinement estimate from the
/// next-lower resolution.
pub fn integrate_cube<V, F>(f: F, spec: &GridSpec) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: Fn(&[f64]) -> V + Sync,
{
    spec.validate()?;
    let value = tensor_sum(spec.dims, &GaussLegendre::new(spec.nodes_per_dim), &f)?;
    let coarse_spec = spec.coarser();
    let coarse = tensor_sum(spec.dims, &GaussLegendre::new(coarse_spec.nodes_per_dim), &f)?;
    let refinement_delta = value.max_abs_diff(&coarse);
    Ok(QuadResult {
        value,
        coarse,
        refinement_delta,
    })
}

/// Maps unit-cube coordinates `(v1, v2, u)` onto the region
/// `t1, t2 >= 0, t1 + t2 <= u`, returning `(t1, t2, u, jacobian)`.
pub fn c12_region_map(v1: f64, v2: f64, u: f64) -> (f64, f64, f64, f64) {
    let t1 = u * v1;
    let t2 = u * v2 * (1.0 - v1);
    (t1, t2, u, u * u * (1.0 - v1))
}

/// Integrates `f(t1, t2, u)` over `{0 <= u <= 1, t1, t2 >= 0, t1 + t2 <= u}`
/// through the substitution `t1 = u v1`, `t2 = u v2 (1 - v1)`.
pub fn integrate_c12_region<V, F>(f: F, spec: &GridSpec) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: Fn(f64, f64, f64) -> V + Sync,
{
    if spec.dims != 3 {
        return Err(Error::InvalidGrid(format!(
            "the t1 + t2 <= u region is three-dimensional, got dims = {}",
            spec.dims
        )));
    }
    integrate_cube(
        |p: &[f64]| {
            let (t1, t2, u, jac) = c12_region_map(p[0], p[1], p[2]);
            f(t1, t2, u).scaled(jac)
        },
        spec,
    )
}
