//! Mollifier data: the length exponents, the offset `R`, and the
//! polynomials `P1`, `P2`, `P3`, `Q` with their constraints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::GridSpec;

/// Suprema of the admissible length exponents.
pub const THETA1_MAX: f64 = 4.0 / 7.0;
pub const THETA2_MAX: f64 = 0.5;
pub const THETA3_MAX: f64 = 0.25;

/// Allowed range for `R` in configurations accepted from users and the optimizer.
pub const R_GUARD: (f64, f64) = (0.5, 2.5);

const CONSTRAINT_TOL: f64 = 1e-12;
/// Deviations of `P1(1) + P3(1)` from 1 beyond this are larger than the
/// rounding of five-decimal coefficient tables.
pub const PRINT_PRECISION_TOL: f64 = 5e-6;

/// Which bound is being computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// All critical zeros.
    Kappa,
    /// Simple critical zeros; requires a linear `Q`.
    KappaStar,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Kappa => "kappa",
            Mode::KappaStar => "kappa_star",
        }
    }
}

/// The polynomial `Q`, in the basis its mode is parametrized by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case", deny_unknown_fields)]
pub enum QSpec {
    /// `Q(x) = constant + Σ_k odd[k] (1 - 2x)^(2k+1)`.
    Shifted { constant: f64, odd: Vec<f64> },
    /// `Q(x) = 1 - slope x`.
    Linear { slope: f64 },
}

impl QSpec {
    pub fn to_poly(&self) -> Poly {
        match self {
            QSpec::Shifted { constant, odd } => {
                let mut terms = vec![(0, *constant)];
                terms.extend(odd.iter().enumerate().map(|(k, &w)| (2 * k + 1, w)));
                Poly::from_shifted_basis(&terms)
            }
            QSpec::Linear { slope } => Poly::new(vec![1.0, -slope]),
        }
    }

    /// `Q ≡ 1` in the shifted basis.
    pub fn one() -> Self {
        QSpec::Shifted {
            constant: 1.0,
            odd: Vec::new(),
        }
    }
}

/// Coefficients of the four polynomials.
///
/// The vanishing conditions at 0 are structural: `p1[j]` multiplies
/// `x^(j+1)`, `p2[j]` multiplies `x^(j+3)` and `p3[j]` multiplies `x^(j+4)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub p3: Vec<f64>,
    pub q: QSpec,
}

impl PolynomialSpec {
    pub const P1_OFFSET: usize = 1;
    pub const P2_OFFSET: usize = 3;
    pub const P3_OFFSET: usize = 4;

    pub fn p1(&self) -> Poly {
        Poly::from_offset(Self::P1_OFFSET, &self.p1)
    }

    pub fn p2(&self) -> Poly {
        Poly::from_offset(Self::P2_OFFSET, &self.p2)
    }

    /// `P2''`, differentiated on the coefficients.
    pub fn p2_second_derivative(&self) -> Poly {
        self.p2().derivative().derivative()
    }

    pub fn p3(&self) -> Poly {
        Poly::from_offset(Self::P3_OFFSET, &self.p3)
    }

    pub fn q(&self) -> Poly {
        self.q.to_poly()
    }

    /// `P1(1) + P3(1)`.
    pub fn normalization(&self) -> f64 {
        self.p1.iter().sum::<f64>() + self.p3.iter().sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, cs) in [("p1", &self.p1), ("p2", &self.p2), ("p3", &self.p3)] {
            if let Some(i) = cs.iter().position(|c| !c.is_finite()) {
                return Err(Error::config(format!("{name}[{i}]"), "coefficient is not finite"));
            }
        }
        let norm = self.normalization();
        if (norm - 1.0).abs() > CONSTRAINT_TOL {
            return Err(Error::config(
                "p1, p3",
                format!("P1(1) + P3(1) must equal 1, got {norm:.15}"),
            ));
        }
        let q0 = self.q().eval(0.0);
        if !q0.is_finite() || (q0 - 1.0).abs() > CONSTRAINT_TOL {
            return Err(Error::config("q", format!("Q(0) must equal 1, got {q0:.15}")));
        }
        Ok(())
    }

    /// Restores `P1(1) + P3(1) = 1` by moving the deficit onto the linear
    /// coefficient of `P1`. Returns the adjustment applied, if any.
    pub fn renormalize(&mut self) -> Option<f64> {
        let deficit = 1.0 - self.normalization();
        if deficit.abs() <= CONSTRAINT_TOL || self.p1.is_empty() {
            return None;
        }
        self.p1[0] += deficit;
        Some(deficit)
    }
}

/// Quadrature resolution for each main-term constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TermGrids {
    pub c1: usize,
    pub c12: usize,
    pub c2: usize,
    pub c3: usize,
    pub c23: usize,
    pub c31: usize,
}

impl Default for TermGrids {
    fn default() -> Self {
        TermGrids {
            c1: GridSpec::default_for(2).nodes_per_dim,
            c12: GridSpec::default_for(3).nodes_per_dim,
            c2: GridSpec::default_for(4).nodes_per_dim,
            c3: GridSpec::default_for(5).nodes_per_dim,
            c23: GridSpec::default_for(5).nodes_per_dim,
            c31: GridSpec::default_for(3).nodes_per_dim,
        }
    }
}

impl TermGrids {
    /// The coarse resolution used while searching.
    pub fn search() -> Self {
        TermGrids {
            c1: 12,
            c12: 12,
            c2: 10,
            c3: 10,
            c23: 10,
            c31: 12,
        }
    }

    /// Same resolution for every term.
    pub fn uniform(n: usize) -> Self {
        TermGrids {
            c1: n,
            c12: n,
            c2: n,
            c3: n,
            c23: n,
            c31: n,
        }
    }

    /// Multiplies every node count by `num / den`.
    pub fn scaled(&self, num: usize, den: usize) -> Self {
        let f = |n: usize| (n * num).div_ceil(den);
        TermGrids {
            c1: f(self.c1),
            c12: f(self.c12),
            c2: f(self.c2),
            c3: f(self.c3),
            c23: f(self.c23),
            c31: f(self.c31),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("c1", self.c1),
            ("c12", self.c12),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c23", self.c23),
            ("c31", self.c31),
        ] {
            if n < 2 {
                return Err(Error::config(format!("grid.{name}"), "need at least 2 nodes per dimension"));
            }
        }
        Ok(())
    }
}

/// Everything the main-term constants depend on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierConfig {
    pub mode: Mode,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub polys: PolynomialSpec,
    #[serde(default)]
    pub grid: TermGrids,
}

impl MollifierConfig {
    /// The published optimum for critical zeros: `R = 1.26`.
    pub fn paper_kappa() -> Self {
        MollifierConfig {
            mode: Mode::Kappa,
            theta1: THETA1_MAX,
            theta2: THETA2_MAX,
            theta3: THETA3_MAX,
            r: 1.26,
            polys: PolynomialSpec {
                p1: vec![0.83651, 0.09758, -0.29393, 0.73372, -0.3753],
                p2: vec![0.0237, -0.00744, 0.00174],
                p3: vec![0.00155, -0.00013],
                q: QSpec::Shifted {
                    constant: 0.49068,
                    odd: vec![0.61077, -0.14199, 0.04054],
                },
            },
            grid: TermGrids::default(),
        }
    }

    /// The published optimum for simple critical zeros: `R = 1.12`,
    /// `Q(x) = 1 - 1.03232 x`.
    pub fn paper_kappa_star() -> Self {
        MollifierConfig {
            mode: Mode::KappaStar,
            theta1: THETA1_MAX,
            theta2: THETA2_MAX,
            theta3: THETA3_MAX,
            r: 1.12,
            polys: PolynomialSpec {
                p1: vec![0.82653, 0.02626, -0.00774, 0.34803, -0.19371],
                p2: vec![0.0324, -0.00759, 0.00742],
                p3: vec![0.00094, -0.00031],
                q: QSpec::Linear { slope: 1.03232 },
            },
            grid: TermGrids::default(),
        }
    }

    /// `P1(x) = x`, `P2 = P3 = 0`, `Q ≡ 1`: the one-piece mollifier.
    pub fn one_piece(r: f64) -> Self {
        MollifierConfig {
            mode: Mode::Kappa,
            theta1: THETA1_MAX,
            theta2: THETA2_MAX,
            theta3: THETA3_MAX,
            r,
            polys: PolynomialSpec {
                p1: vec![1.0],
                p2: Vec::new(),
                p3: Vec::new(),
                q: QSpec::one(),
            },
            grid: TermGrids::default(),
        }
    }

    /// Checks everything the evaluators rely on: exponent ordering and caps,
    /// `R > 0`, the polynomial constraints, and a linear `Q` in
    /// [`Mode::KappaStar`].
    pub fn validate_structure(&self) -> Result<()> {
        let (t1, t2, t3) = (self.theta1, self.theta2, self.theta3);
        for (name, t) in [("theta1", t1), ("theta2", t2), ("theta3", t3)] {
            if !t.is_finite() {
                return Err(Error::config(name, "must be finite"));
            }
        }
        if !(0.0 < t3 && t3 < t2 && t2 < t1 && t1 < 1.0) {
            return Err(Error::config(
                "theta",
                format!("need 0 < theta3 < theta2 < theta1 < 1, got ({t1}, {t2}, {t3})"),
            ));
        }
        let slack = 1e-15;
        if t1 > THETA1_MAX + slack {
            return Err(Error::config("theta1", format!("must not exceed 4/7, got {t1}")));
        }
        if t2 > THETA2_MAX + slack {
            return Err(Error::config("theta2", format!("must not exceed 1/2, got {t2}")));
        }
        if t3 > THETA3_MAX + slack {
            return Err(Error::config("theta3", format!("must not exceed 1/4, got {t3}")));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::config("R", format!("must be non-negative, got {}", self.r)));
        }
        self.polys.validate()?;
        if self.mode == Mode::KappaStar && self.polys.q().degree() != 1 {
            return Err(Error::config(
                "q",
                "the simple-zero bound needs a linear Q",
            ));
        }
        self.grid.validate()
    }

    /// [`validate_structure`](Self::validate_structure) plus the `R` guard.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        if !(R_GUARD.0..=R_GUARD.1).contains(&self.r) {
            return Err(Error::config(
                "R",
                format!("must lie in [{}, {}], got {}", R_GUARD.0, R_GUARD.1, self.r),
            ));
        }
        Ok(())
    }
}

/// Lengths of the coefficient blocks in a free-parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeLayout {
    pub mode: Mode,
    pub p1_len: usize,
    pub p2_len: usize,
    pub p3_len: usize,
    /// Odd shifted-basis weights of `Q` (ignored in [`Mode::KappaStar`]).
    pub q_odd_len: usize,
}

impl FreeLayout {
    /// Degree 5 for every polynomial.
    pub fn default_for(mode: Mode) -> Self {
        FreeLayout {
            mode,
            p1_len: 5,
            p2_len: 3,
            p3_len: 2,
            q_odd_len: match mode {
                Mode::Kappa => 3,
                Mode::KappaStar => 0,
            },
        }
    }

    pub fn of(cfg: &MollifierConfig) -> Self {
        let q_odd_len = match &cfg.polys.q {
            QSpec::Shifted { odd, .. } => odd.len(),
            QSpec::Linear { .. } => 0,
        };
        FreeLayout {
            mode: cfg.mode,
            p1_len: cfg.polys.p1.len().max(1),
            p2_len: cfg.polys.p2.len(),
            p3_len: cfg.polys.p3.len(),
            q_odd_len,
        }
    }

    pub fn len(&self) -> usize {
        let q = match self.mode {
            Mode::Kappa => self.q_odd_len,
            Mode::KappaStar => 1,
        };
        (self.p1_len - 1) + self.p2_len + self.p3_len + q
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Maps a free vector onto the constraint surface. The linear coefficient
/// of `P1` and the constant of `Q` are eliminated; the exponents sit at
/// their suprema.
pub fn from_free_params(v: &[f64], layout: &FreeLayout, r: f64) -> Result<MollifierConfig> {
    if v.len() != layout.len() {
        return Err(Error::FreeParams(format!(
            "expected {} entries, got {}",
            layout.len(),
            v.len()
        )));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::FreeParams(format!("entry {i} is not finite")));
    }
    let (p1_rest, rest) = v.split_at(layout.p1_len - 1);
    let (p2, rest) = rest.split_at(layout.p2_len);
    let (p3, q_free) = rest.split_at(layout.p3_len);
    let a1 = 1.0 - p1_rest.iter().sum::<f64>() - p3.iter().sum::<f64>();
    let mut p1 = vec![a1];
    p1.extend_from_slice(p1_rest);
    let q = match layout.mode {
        Mode::Kappa => QSpec::Shifted {
            constant: 1.0 - q_free.iter().sum::<f64>(),
            odd: q_free.to_vec(),
        },
        Mode::KappaStar => QSpec::Linear { slope: q_free[0] },
    };
    Ok(MollifierConfig {
        mode: layout.mode,
        theta1: THETA1_MAX,
        theta2: THETA2_MAX,
        theta3: THETA3_MAX,
        r,
        polys: PolynomialSpec {
            p1,
            p2: p2.to_vec(),
            p3: p3.to_vec(),
            q,
        },
        grid: TermGrids::default(),
    })
}

/// Inverse of [`from_free_params`] on configurations of matching layout.
pub fn to_free_params(cfg: &MollifierConfig) -> Result<(Vec<f64>, FreeLayout)> {
    let layout = FreeLayout::of(cfg);
    let mut v = Vec::with_capacity(layout.len());
    v.extend(cfg.polys.p1.iter().skip(1));
    if cfg.polys.p1.is_empty() {
        return Err(Error::FreeParams("P1 has no linear coefficient".into()));
    }
    v.extend(&cfg.polys.p2);
    v.extend(&cfg.polys.p3);
    match (&cfg.polys.q, cfg.mode) {
        (QSpec::Shifted { odd, .. }, Mode::Kappa) => v.extend(odd),
        (QSpec::Linear { slope }, Mode::KappaStar) => v.push(*slope),
        _ => {
            return Err(Error::FreeParams(
                "Q basis does not match the mode's parametrization".into(),
            ))
        }
    }
    Ok((v, layout))
}
