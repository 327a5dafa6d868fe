//! The six main-term constants of the mollified second moment and their
//! aggregate `c = c1 + c2 + c3 + 2 c12 + 2 c23 + 2 c31`.
//!
//! Jet-valued terms are integrated as jets and differentiated once at the
//! end; [`Extraction::PerNode`] swaps that order and exists to check the
//! interchange.

pub mod forms;
pub mod integrands;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::jet::{Jet, JetShape};
use crate::mollifier::{MollifierConfig, TermGrids};
use crate::poly::Poly;
use crate::quadrature::{integrate_c12_region, integrate_cube, GridSpec, QuadResult, QuadValue};

pub use integrands::{NodeFactors, Params, Role};

/// One of the six main-term constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    C1,
    C12,
    C2,
    C3,
    C23,
    C31,
}

type NodeFn = fn(&Params, &Arc<JetShape>, &[f64]) -> NodeFactors;

impl Term {
    pub const ALL: [Term; 6] = [Term::C1, Term::C12, Term::C2, Term::C3, Term::C23, Term::C31];

    pub fn name(&self) -> &'static str {
        match self {
            Term::C1 => "c1",
            Term::C12 => "c12",
            Term::C2 => "c2",
            Term::C3 => "c3",
            Term::C23 => "c23",
            Term::C31 => "c31",
        }
    }

    /// Multiplicity in the aggregate: 1 on the diagonal, 2 for cross terms.
    pub fn multiplicity(&self) -> f64 {
        match self {
            Term::C1 | Term::C2 | Term::C3 => 1.0,
            Term::C12 | Term::C23 | Term::C31 => 2.0,
        }
    }

    /// Number of integration variables.
    pub fn dims(&self) -> usize {
        match self {
            Term::C1 => 2,
            Term::C12 | Term::C31 => 3,
            Term::C2 => 4,
            Term::C3 | Term::C23 => 5,
        }
    }

    /// Differentiation orders in the `x` variables (empty for `c1`).
    pub fn jet_orders(&self) -> &'static [u8] {
        match self {
            Term::C1 => &[],
            Term::C12 => &[1, 1],
            Term::C2 => &[2, 2],
            Term::C3 => &[2, 2, 2, 2],
            Term::C23 => &[2, 2, 2],
            Term::C31 => &[1, 1, 2],
        }
    }

    pub fn grid(&self, grids: &TermGrids) -> GridSpec {
        let n = match self {
            Term::C1 => grids.c1,
            Term::C12 => grids.c12,
            Term::C2 => grids.c2,
            Term::C3 => grids.c3,
            Term::C23 => grids.c23,
            Term::C31 => grids.c31,
        };
        GridSpec {
            dims: self.dims(),
            nodes_per_dim: n,
        }
    }

    /// The polynomials in the two non-`Q` slots.
    pub fn p_roles(&self) -> Option<[Role; 2]> {
        match self {
            Term::C1 => None,
            Term::C12 => Some([Role::P1, Role::P2SecondDerivative]),
            Term::C2 => Some([Role::P2SecondDerivative, Role::P2SecondDerivative]),
            Term::C3 => Some([Role::P3, Role::P3]),
            Term::C23 => Some([Role::P2SecondDerivative, Role::P3]),
            Term::C31 => Some([Role::P1, Role::P3]),
        }
    }

    pub(crate) fn node_fn(&self) -> Option<NodeFn> {
        match self {
            Term::C1 => None,
            Term::C12 => Some(integrands::c12_node),
            Term::C2 => Some(integrands::c2_node),
            Term::C3 => Some(integrands::c3_node),
            Term::C23 => Some(integrands::c23_node),
            Term::C31 => Some(integrands::c31_node),
        }
    }

    /// Constant in front of the derivative (`1/θ1` for `c1`).
    pub fn prefactor(&self, p: &Params) -> f64 {
        match self {
            Term::C1 => 1.0 / p.theta1,
            Term::C12 => 4.0 * p.theta2 * p.theta2 / (p.theta1 * p.theta1),
            Term::C2 => 2.0 / (3.0 * p.theta2),
            Term::C3 => 1.0 / (12.0 * p.theta3.powi(4)),
            Term::C23 => 2.0 / (3.0 * p.theta2 * p.theta2),
            Term::C31 => 1.0 / (p.theta1 * p.theta1),
        }
    }

    /// Whether the `t` variables range over `t1 + t2 <= u` instead of the cube.
    pub fn over_c12_region(&self) -> bool {
        matches!(self, Term::C12)
    }
}

impl Params {
    pub fn of(cfg: &MollifierConfig) -> Self {
        Params {
            theta1: cfg.theta1,
            theta2: cfg.theta2,
            theta3: cfg.theta3,
            r: cfg.r,
        }
    }
}

/// The polynomials of a configuration in monomial form.
#[derive(Debug, Clone)]
pub struct ResolvedPolys {
    pub q: Poly,
    pub p1: Poly,
    pub p2_second: Poly,
    pub p3: Poly,
}

impl ResolvedPolys {
    pub fn of(cfg: &MollifierConfig) -> Self {
        ResolvedPolys {
            q: cfg.polys.q(),
            p1: cfg.polys.p1(),
            p2_second: cfg.polys.p2_second_derivative(),
            p3: cfg.polys.p3(),
        }
    }

    pub fn get(&self, role: Role) -> &Poly {
        match role {
            Role::Q => &self.q,
            Role::P1 => &self.p1,
            Role::P2SecondDerivative => &self.p2_second,
            Role::P3 => &self.p3,
        }
    }
}

/// Value of one constant with its quadrature refinement estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermValue {
    pub value: f64,
    pub refinement_delta: f64,
}

impl TermValue {
    pub const ZERO: TermValue = TermValue {
        value: 0.0,
        refinement_delta: 0.0,
    };
}

/// All six constants and the aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermBreakdown {
    pub c1: TermValue,
    pub c12: TermValue,
    pub c2: TermValue,
    pub c3: TermValue,
    pub c23: TermValue,
    pub c31: TermValue,
    pub c_total: f64,
    /// Monitored properties that failed (e.g. a negative diagonal term).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl TermBreakdown {
    pub fn from_values(values: [TermValue; 6]) -> Self {
        let [c1, c12, c2, c3, c23, c31] = values;
        let c_total =
            c1.value + c2.value + c3.value + 2.0 * c12.value + 2.0 * c23.value + 2.0 * c31.value;
        let mut warnings = Vec::new();
        for (name, v) in [("c2", c2.value), ("c3", c3.value)] {
            if v < 0.0 {
                warnings.push(format!("{name} = {v:e} is negative"));
            }
        }
        TermBreakdown {
            c1,
            c12,
            c2,
            c3,
            c23,
            c31,
            c_total,
            warnings,
        }
    }

    pub fn get(&self, term: Term) -> TermValue {
        match term {
            Term::C1 => self.c1,
            Term::C12 => self.c12,
            Term::C2 => self.c2,
            Term::C3 => self.c3,
            Term::C23 => self.c23,
            Term::C31 => self.c31,
        }
    }
}

/// Where the derivative is taken relative to the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extraction {
    /// Integrate the jet, then extract once.
    #[default]
    AfterIntegration,
    /// Extract at every node and integrate the scalars.
    PerNode,
}

/// Applies the four slot polynomials to the node kernel.
pub fn assemble_node(nf: &NodeFactors, polys: &ResolvedPolys, p_roles: [Role; 2]) -> Jet {
    let mut j = nf.kernel.mul_poly_affine(&polys.q, &nf.q_args[0]);
    j = j.mul_poly_affine(&polys.q, &nf.q_args[1]);
    for (role, arg) in p_roles.iter().zip(&nf.p_args) {
        debug_assert!(
            (-1e-12..=1.0 + 1e-12).contains(&arg.constant),
            "polynomial argument {} outside [0, 1] at x = 0",
            arg.constant
        );
        j = j.mul_poly_affine(polys.get(*role), arg);
    }
    j
}

fn integrate_over<V, F>(term: Term, grid: &GridSpec, f: F) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: Fn(&[f64]) -> V + Sync,
{
    if term.over_c12_region() {
        integrate_c12_region(|t1, t2, u| f(&[t1, t2, u]), grid)
    } else {
        integrate_cube(f, grid)
    }
}

/// `c1`, a two-dimensional integral with no derivatives.
pub fn eval_c1(cfg: &MollifierConfig) -> Result<TermValue> {
    cfg.validate_structure()?;
    let p = Params::of(cfg);
    let q = cfg.polys.q();
    let dq = q.derivative();
    let p1 = cfg.polys.p1();
    let dp1 = p1.derivative();
    let boundary = p1.eval(1.0).powi(2);
    if p1.is_zero() {
        return Ok(TermValue::ZERO);
    }
    let th1 = p.theta1;
    let r = p.r;
    let res = integrate_cube(
        |pt: &[f64]| {
            let (t, u) = (pt[0], pt[1]);
            let (qt, p1u) = (q.eval(t), p1.eval(u));
            let inner = qt * dp1.eval(u) + th1 * dq.eval(t) * p1u + th1 * r * qt * p1u;
            (2.0 * r * t).exp() * inner * inner
        },
        &Term::C1.grid(&cfg.grid),
    )?;
    let pre = Term::C1.prefactor(&p);
    Ok(TermValue {
        value: boundary + pre * res.value,
        refinement_delta: pre * res.refinement_delta,
    })
}

/// Evaluates one constant at the configuration's grid for that term.
pub fn eval_term(cfg: &MollifierConfig, term: Term) -> Result<TermValue> {
    eval_term_with(cfg, term, &Term::grid(&term, &cfg.grid), Extraction::default())
}

/// Evaluates one constant on an explicit grid.
pub fn eval_term_with(
    cfg: &MollifierConfig,
    term: Term,
    grid: &GridSpec,
    extraction: Extraction,
) -> Result<TermValue> {
    cfg.validate_structure()?;
    let (Some(node), Some(roles)) = (term.node_fn(), term.p_roles()) else {
        let mut c = cfg.clone();
        c.grid.c1 = grid.nodes_per_dim;
        return eval_c1(&c);
    };
    let polys = ResolvedPolys::of(cfg);
    if roles.iter().any(|&r| polys.get(r).is_zero()) {
        return Ok(TermValue::ZERO);
    }
    let params = Params::of(cfg);
    let shape = JetShape::new(term.jet_orders())?;
    let pre = term.prefactor(&params);
    let integrand = |pt: &[f64]| assemble_node(&node(&params, &shape, pt), &polys, roles);
    let (fine, coarse) = match extraction {
        Extraction::AfterIntegration => {
            let res = integrate_over(term, grid, integrand)?;
            (res.value.extract_top(), res.coarse.extract_top())
        }
        Extraction::PerNode => {
            let res = integrate_over(term, grid, |pt: &[f64]| integrand(pt).extract_top())?;
            (res.value, res.coarse)
        }
    };
    Ok(TermValue {
        value: pre * fine,
        refinement_delta: (pre * (fine - coarse)).abs(),
    })
}

pub fn eval_c12(cfg: &MollifierConfig) -> Result<TermValue> {
    eval_term(cfg, Term::C12)
}

pub fn eval_c2(cfg: &MollifierConfig) -> Result<TermValue> {
    eval_term(cfg, Term::C2)
}

pub fn eval_c3(cfg: &MollifierConfig) -> Result<TermValue> {
    eval_term(cfg, Term::C3)
}

pub fn eval_c23(cfg: &MollifierConfig) -> Result<TermValue> {
    eval_term(cfg, Term::C23)
}

pub fn eval_c31(cfg: &MollifierConfig) -> Result<TermValue> {
    eval_term(cfg, Term::C31)
}

/// All six constants and the aggregate.
pub fn eval_all(cfg: &MollifierConfig) -> Result<TermBreakdown> {
    let mut values = [TermValue::ZERO; 6];
    for (slot, term) in values.iter_mut().zip(Term::ALL) {
        *slot = eval_term(cfg, term)?;
    }
    Ok(TermBreakdown::from_values(values))
}
