//! Coefficient tensors of the aggregate constant.
//!
//! For fixed exponents and `R`, every jet-valued term is a sum over
//! monomials of its four slot polynomials:
//!
//! ```text
//! c = pref · Σ_{k,l,i,j} q_k q_l a_i b_j · T[k, l, i, j]
//! ```
//!
//! and `c1` is a quadratic form in the products `q_k · p1_i`. Building the
//! tensors costs a few direct evaluations; afterwards the aggregate for any
//! polynomial coefficients is a short contraction. The optimizer uses this
//! during its coarse search.

use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::error::Result;
use crate::jet::{factorial, Jet, JetShape};
use crate::mollifier::{FreeLayout, Mode, PolynomialSpec, TermGrids};
use crate::poly::Poly;
use crate::quadrature::{c12_region_map, tensor_sum, GaussLegendre, QuadValue};
use crate::terms::{Params, ResolvedPolys, Role, Term};

/// Monomial exponents carried by each slot polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRanges {
    pub q: RangeInclusive<usize>,
    pub p1: RangeInclusive<usize>,
    pub p2_second: RangeInclusive<usize>,
    pub p3: RangeInclusive<usize>,
}

impl MonomialRanges {
    pub fn for_layout(layout: &FreeLayout) -> Self {
        let q_deg = match layout.mode {
            Mode::Kappa => (2 * layout.q_odd_len).saturating_sub(1),
            Mode::KappaStar => 1,
        };
        MonomialRanges {
            q: 0..=q_deg,
            p1: PolynomialSpec::P1_OFFSET..=layout.p1_len.max(1),
            // P2'' of x^3..x^(2+len) spans x^1..x^len
            p2_second: 1..=layout.p2_len.max(1),
            p3: PolynomialSpec::P3_OFFSET..=PolynomialSpec::P3_OFFSET + layout.p3_len.max(1) - 1,
        }
    }

    fn get(&self, role: Role) -> RangeInclusive<usize> {
        match role {
            Role::Q => self.q.clone(),
            Role::P1 => self.p1.clone(),
            Role::P2SecondDerivative => self.p2_second.clone(),
            Role::P3 => self.p3.clone(),
        }
    }
}

fn coeff(p: &Poly, m: usize) -> f64 {
    p.coeffs().get(m).copied().unwrap_or(0.0)
}

fn covers(p: &Poly, range: &RangeInclusive<usize>) -> bool {
    p.coeffs()
        .iter()
        .enumerate()
        .all(|(m, &c)| c == 0.0 || range.contains(&m))
}

/// Tensor of one jet-valued term.
#[derive(Debug, Clone)]
pub struct TermForm {
    pub term: Term,
    ranges: [RangeInclusive<usize>; 4],
    /// Prefactor times the factorials of the extracted derivative.
    scale: f64,
    data: Vec<f64>,
}

impl TermForm {
    pub fn build(term: Term, params: &Params, ranges: &MonomialRanges, nodes: usize) -> Result<Self> {
        let node = term.node_fn().expect("jet-valued term");
        let roles = term.p_roles().expect("jet-valued term");
        let shape = JetShape::new(term.jet_orders())?;
        let slot_ranges = [
            ranges.q.clone(),
            ranges.q.clone(),
            ranges.get(roles[0]),
            ranges.get(roles[1]),
        ];
        let fact: f64 = term.jet_orders().iter().map(|&o| factorial(o as usize)).product();
        let scale = term.prefactor(params) * fact;
        let rule = GaussLegendre::new(nodes);
        let per_node = |pt: &[f64]| node_tensor(&node(params, &shape, pt), &shape, &slot_ranges);
        let data = if term.over_c12_region() {
            tensor_sum(3, &rule, |p: &[f64]| {
                let (t1, t2, u, jac) = c12_region_map(p[0], p[1], p[2]);
                per_node(&[t1, t2, u]).scaled(jac)
            })?
        } else {
            tensor_sum(term.dims(), &rule, per_node)?
        };
        Ok(TermForm {
            term,
            ranges: slot_ranges,
            scale,
            data,
        })
    }

    /// The term's value for the given polynomials.
    pub fn contract(&self, polys: &ResolvedPolys) -> f64 {
        let roles = self.term.p_roles().expect("jet-valued term");
        let slot_polys = [&polys.q, &polys.q, polys.get(roles[0]), polys.get(roles[1])];
        debug_assert!(slot_polys.iter().zip(&self.ranges).all(|(p, r)| covers(p, r)));
        let vecs: Vec<Vec<f64>> = slot_polys
            .iter()
            .zip(&self.ranges)
            .map(|(p, r)| r.clone().map(|m| coeff(p, m)).collect())
            .collect();
        let (n1, n2, n3) = (vecs[1].len(), vecs[2].len(), vecs[3].len());
        let mut total = 0.0;
        for (k, qk) in vecs[0].iter().enumerate() {
            for (l, ql) in vecs[1].iter().enumerate() {
                let base = ((k * n1 + l) * n2) * n3;
                let mut inner = 0.0;
                for (i, ai) in vecs[2].iter().enumerate() {
                    let row = &self.data[base + i * n3..base + (i + 1) * n3];
                    inner += ai * row.iter().zip(&vecs[3]).map(|(t, b)| t * b).sum::<f64>();
                }
                total += qk * ql * inner;
            }
        }
        self.scale * total
    }
}

fn powers(shape: &Arc<JetShape>, arg: &crate::jet::Affine, range: &RangeInclusive<usize>) -> Vec<Jet> {
    let mut out = Vec::new();
    let mut cur = Jet::constant(shape, 1.0);
    for m in 0..=*range.end() {
        if m > 0 {
            cur = cur.mul_affine(arg);
        }
        if range.contains(&m) {
            out.push(cur.clone());
        }
    }
    out
}

fn node_tensor(
    nf: &crate::terms::NodeFactors,
    shape: &Arc<JetShape>,
    ranges: &[RangeInclusive<usize>; 4],
) -> Vec<f64> {
    // kernel · qa^k · qb^l
    let mut left = Vec::new();
    let mut gk = nf.kernel.clone();
    for k in 0..=*ranges[0].end() {
        if k > 0 {
            gk = gk.mul_affine(&nf.q_args[0]);
        }
        if !ranges[0].contains(&k) {
            continue;
        }
        let mut g = gk.clone();
        for l in 0..=*ranges[1].end() {
            if l > 0 {
                g = g.mul_affine(&nf.q_args[1]);
            }
            if ranges[1].contains(&l) {
                left.push(g.clone());
            }
        }
    }
    let pa = powers(shape, &nf.p_args[0], &ranges[2]);
    let pb = powers(shape, &nf.p_args[1], &ranges[3]);
    let right: Vec<Jet> = pa
        .iter()
        .flat_map(|a| pb.iter().map(move |b| a * b))
        .collect();
    let mut out = Vec::with_capacity(left.len() * right.len());
    for g in &left {
        for h in &right {
            out.push(g.mul_top(h).expect("same shape"));
        }
    }
    out
}

/// Quadratic form of `c1` in the products `q_k p1_i`.
#[derive(Debug, Clone)]
pub struct C1Form {
    q: RangeInclusive<usize>,
    p1: RangeInclusive<usize>,
    scale: f64,
    data: Vec<f64>,
}

impl C1Form {
    pub fn build(params: &Params, ranges: &MonomialRanges, nodes: usize) -> Result<Self> {
        let (th1, r) = (params.theta1, params.r);
        let q = ranges.q.clone();
        let p1 = ranges.p1.clone();
        let basis = |t: f64, u: f64| -> Vec<f64> {
            let mut phi = Vec::new();
            for k in q.clone() {
                for i in p1.clone() {
                    let (kf, i_f) = (k as f64, i as f64);
                    let tk = t.powi(k as i32);
                    let dtk = if k == 0 { 0.0 } else { kf * t.powi(k as i32 - 1) };
                    let ui = u.powi(i as i32);
                    let dui = if i == 0 { 0.0 } else { i_f * u.powi(i as i32 - 1) };
                    phi.push(tk * dui + th1 * dtk * ui + th1 * r * tk * ui);
                }
            }
            phi
        };
        let rule = GaussLegendre::new(nodes);
        let data = tensor_sum(2, &rule, |pt: &[f64]| {
            let phi = basis(pt[0], pt[1]);
            let e = (2.0 * r * pt[0]).exp();
            let mut out = Vec::with_capacity(phi.len() * phi.len());
            for a in &phi {
                for b in &phi {
                    out.push(e * a * b);
                }
            }
            out
        })?;
        Ok(C1Form {
            q: ranges.q.clone(),
            p1: ranges.p1.clone(),
            scale: Term::C1.prefactor(params),
            data,
        })
    }

    pub fn contract(&self, polys: &ResolvedPolys) -> f64 {
        let v: Vec<f64> = self
            .q
            .clone()
            .flat_map(|k| self.p1.clone().map(move |i| (k, i)))
            .map(|(k, i)| coeff(&polys.q, k) * coeff(&polys.p1, i))
            .collect();
        let n = v.len();
        let quad: f64 = (0..n)
            .map(|a| v[a] * (0..n).map(|b| self.data[a * n + b] * v[b]).sum::<f64>())
            .sum();
        polys.p1.eval(1.0).powi(2) + self.scale * quad
    }
}

/// Tensors for all six terms at one `R`.
#[derive(Debug, Clone)]
pub struct AggregateForm {
    pub params: Params,
    pub ranges: MonomialRanges,
    c1: C1Form,
    terms: Vec<TermForm>,
}

impl AggregateForm {
    pub fn build(params: &Params, ranges: &MonomialRanges, grids: &TermGrids) -> Result<Self> {
        let c1 = C1Form::build(params, ranges, grids.c1)?;
        let terms = Term::ALL[1..]
            .iter()
            .map(|&t| TermForm::build(t, params, ranges, t.grid(grids).nodes_per_dim))
            .collect::<Result<_>>()?;
        Ok(AggregateForm {
            params: *params,
            ranges: ranges.clone(),
            c1,
            terms,
        })
    }

    /// Values in [`Term::ALL`] order.
    pub fn term_values(&self, polys: &ResolvedPolys) -> [f64; 6] {
        let mut out = [0.0; 6];
        out[0] = self.c1.contract(polys);
        for (o, f) in out[1..].iter_mut().zip(&self.terms) {
            *o = f.contract(polys);
        }
        out
    }

    pub fn c_total(&self, polys: &ResolvedPolys) -> f64 {
        self.term_values(polys)
            .iter()
            .zip(Term::ALL)
            .map(|(v, t)| t.multiplicity() * v)
            .sum()
    }
}
