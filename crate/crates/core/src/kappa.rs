//! From the aggregate constant to the zero-proportion bound
//! `1 - ln(c) / R`.
//!
//! The `o(1)` correction vanishes as `T → ∞` and is dropped, so every
//! number produced here is an asymptotic lower bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mollifier::{MollifierConfig, Mode};
use crate::terms::{self, TermBreakdown};

pub const BOUND_LABEL: &str = "asymptotic lower bound";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mode: Mode,
    pub label: String,
    #[serde(rename = "R")]
    pub r: f64,
    pub c_total: f64,
    pub bound: f64,
    pub terms: TermBreakdown,
}

/// `1 - ln(c) / R`.
pub fn bound_value(c_total: f64, r: f64) -> Result<f64> {
    if !(c_total > 0.0 && c_total.is_finite()) {
        return Err(Error::InvalidAggregate(c_total));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::config("R", format!("must be positive, got {r}")));
    }
    Ok(1.0 - c_total.ln() / r)
}

pub fn bound_from_terms(tb: &TermBreakdown, r: f64, mode: Mode) -> Result<BoundReport> {
    let bound = bound_value(tb.c_total, r)?;
    Ok(BoundReport {
        mode,
        label: BOUND_LABEL.to_string(),
        r,
        c_total: tb.c_total,
        bound,
        terms: tb.clone(),
    })
}

/// Evaluates every term of `cfg` and converts to a bound.
pub fn evaluate(cfg: &MollifierConfig) -> Result<BoundReport> {
    let tb = terms::eval_all(cfg)?;
    bound_from_terms(&tb, cfg.r, cfg.mode)
}
