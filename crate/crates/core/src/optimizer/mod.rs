//! Maximizes the bound over the free polynomial coefficients and `R`.
//!
//! The search runs Nelder–Mead with jittered restarts on a coarse
//! [`SearchModel`]; the winner is then re-evaluated with the direct term
//! evaluators at the fine grid. The fine bound of the result is never below
//! that of the start.

pub mod model;
pub mod nelder_mead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kappa::{self, BoundReport};
use crate::mollifier::{
    from_free_params, to_free_params, FreeLayout, Mode, MollifierConfig, QSpec, TermGrids,
};
use crate::terms::forms::MonomialRanges;
use crate::terms::ResolvedPolys;

pub use model::SearchModel;
pub use nelder_mead::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    /// Objective evaluations available to the search.
    pub budget: usize,
    /// Simplex runs after the first one.
    pub restarts: usize,
    /// Relative jitter applied to each coordinate on restart.
    pub jitter: f64,
    pub seed: u64,
    /// Interval searched for `R`; widened to contain the start.
    pub r_range: (f64, f64),
    /// Chebyshev points used to interpolate in `R`.
    pub r_nodes: usize,
    pub search_grid: TermGrids,
    /// Grid of the final evaluation; `None` uses the start's grid.
    pub fine_grid: Option<TermGrids>,
    /// Coefficient blocks searched; `None` uses the default layout, grown
    /// to fit the start.
    pub layout: Option<FreeLayout>,
    pub tolerances: Tolerances,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            budget: 2000,
            restarts: 3,
            jitter: 1e-2,
            seed: 0,
            r_range: (0.9, 1.6),
            r_nodes: 10,
            search_grid: TermGrids::search(),
            fine_grid: None,
            layout: None,
            tolerances: Tolerances::default(),
        }
    }
}

/// A point of the search trace: best search-grid bound after `evaluation`
/// objective calls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluation: usize,
    pub bound: f64,
}

/// Emitted whenever the search finds a better candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub evaluation: usize,
    pub iteration: usize,
    pub r: f64,
    pub bound: f64,
    /// Search-grid values in [`crate::terms::Term::ALL`] order.
    pub terms: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_config: MollifierConfig,
    /// Fine-grid bound of `best_config`.
    pub best_bound: f64,
    /// Fine-grid bound of the start.
    pub start_bound: f64,
    /// Search-grid bound of `best_config` as seen by the simplex.
    pub search_bound: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub trace: Vec<TracePoint>,
    pub converged: bool,
    pub report: BoundReport,
}

/// Pads the coefficient blocks of `cfg` with zeros up to `layout`.
pub fn pad_to_layout(cfg: &MollifierConfig, layout: &FreeLayout) -> Result<MollifierConfig> {
    let mut out = cfg.clone();
    let pad = |v: &mut Vec<f64>, len: usize| {
        if v.len() < len {
            v.resize(len, 0.0);
        }
    };
    pad(&mut out.polys.p1, layout.p1_len);
    pad(&mut out.polys.p2, layout.p2_len);
    pad(&mut out.polys.p3, layout.p3_len);
    match (&mut out.polys.q, layout.mode) {
        (QSpec::Shifted { odd, .. }, Mode::Kappa) => pad(odd, layout.q_odd_len),
        (QSpec::Linear { .. }, Mode::KappaStar) => {}
        _ => {
            return Err(Error::FreeParams(
                "Q basis does not match the mode's parametrization".into(),
            ))
        }
    }
    Ok(out)
}

fn merged_layout(cfg: &MollifierConfig, requested: Option<FreeLayout>) -> FreeLayout {
    let own = FreeLayout::of(cfg);
    let base = requested.unwrap_or_else(|| FreeLayout::default_for(cfg.mode));
    FreeLayout {
        mode: cfg.mode,
        p1_len: base.p1_len.max(own.p1_len),
        p2_len: base.p2_len.max(own.p2_len),
        p3_len: base.p3_len.max(own.p3_len),
        q_odd_len: base.q_odd_len.max(own.q_odd_len),
    }
}

/// Maximizes the bound starting from `start`.
pub fn optimize(start: &MollifierConfig, settings: &OptimizerSettings) -> Result<OptimizationResult> {
    optimize_with_progress(start, settings, |_| {})
}

pub fn optimize_with_progress<P>(
    start: &MollifierConfig,
    settings: &OptimizerSettings,
    mut progress: P,
) -> Result<OptimizationResult>
where
    P: FnMut(&Progress),
{
    start.validate()?;
    settings.search_grid.validate()?;
    if !(settings.jitter >= 0.0 && settings.jitter.is_finite()) {
        return Err(Error::config("jitter", "must be a non-negative number"));
    }
    let fine_grid = settings.fine_grid.unwrap_or(start.grid);
    fine_grid.validate()?;

    let mut start_fine = start.clone();
    start_fine.grid = fine_grid;
    let start_report = kappa::evaluate(&start_fine)?;
    let start_bound = start_report.bound;
    let keep_start = |evaluations, iterations, trace, search_bound| OptimizationResult {
        best_config: start_fine.clone(),
        best_bound: start_bound,
        start_bound,
        search_bound,
        iterations,
        evaluations,
        trace,
        converged: false,
        report: start_report.clone(),
    };
    if settings.budget == 0 {
        let trace = vec![TracePoint {
            evaluation: 0,
            bound: start_bound,
        }];
        return Ok(keep_start(0, 0, trace, start_bound));
    }

    let layout = merged_layout(start, settings.layout);
    let padded = pad_to_layout(start, &layout)?;
    let (v0, _) = to_free_params(&padded)?;
    let theta = [start.theta1, start.theta2, start.theta3];
    let r_range = (
        settings.r_range.0.min(start.r),
        settings.r_range.1.max(start.r),
    );
    let model = SearchModel::build(
        theta,
        &MonomialRanges::for_layout(&layout),
        &settings.search_grid,
        r_range,
        settings.r_nodes,
    )?;

    let candidate = |z: &[f64]| -> Result<MollifierConfig> {
        let (v, r) = z.split_at(z.len() - 1);
        let mut cfg = from_free_params(v, &layout, r[0])?;
        cfg.theta1 = theta[0];
        cfg.theta2 = theta[1];
        cfg.theta3 = theta[2];
        cfg.grid = fine_grid;
        Ok(cfg)
    };
    // Search-grid bound and terms, or None for infeasible points.
    let score = |z: &[f64]| -> Result<Option<(f64, [f64; 6])>> {
        let cfg = candidate(z)?;
        cfg.polys.validate()?;
        let Some(vals) = model.term_values(cfg.r, &ResolvedPolys::of(&cfg)) else {
            return Ok(None);
        };
        let c = model::aggregate(&vals);
        Ok(kappa::bound_value(c, cfg.r).ok().map(|b| (b, vals)))
    };

    let mut z0 = v0.clone();
    z0.push(start.r);
    let Some((b0, _)) = score(&z0)? else {
        return Err(Error::InvalidAggregate(f64::NAN));
    };

    let mut best_z = z0.clone();
    let mut best_b = b0;
    let mut trace = vec![TracePoint {
        evaluation: 0,
        bound: b0,
    }];
    let mut evaluations = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;
    let mut failure: Option<Error> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    for run in 0..=settings.restarts {
        let remaining = settings.budget.saturating_sub(evaluations);
        if remaining == 0 {
            break;
        }
        let x0: Vec<f64> = if run == 0 {
            z0.clone()
        } else {
            best_z
                .iter()
                .map(|&z| z + settings.jitter * z.abs().max(1e-2) * rng.gen_range(-1.0..=1.0))
                .collect()
        };
        let steps: Vec<f64> = x0
            .iter()
            .map(|&z| if z.abs() > 1e-8 { 0.05 * z.abs() } else { 1e-2 })
            .collect();
        let base = evaluations;
        let mut local = 0usize;
        let out = nelder_mead::minimize(
            |z| {
                local += 1;
                if failure.is_some() {
                    return f64::INFINITY;
                }
                match score(z) {
                    Ok(Some((b, terms))) => {
                        if b > best_b {
                            best_b = b;
                            best_z = z.to_vec();
                            trace.push(TracePoint {
                                evaluation: base + local,
                                bound: b,
                            });
                            progress(&Progress {
                                evaluation: base + local,
                                iteration: iterations,
                                r: z[z.len() - 1],
                                bound: b,
                                terms,
                            });
                        }
                        -b
                    }
                    Ok(None) => f64::INFINITY,
                    Err(e) => {
                        failure = Some(e);
                        f64::INFINITY
                    }
                }
            },
            &x0,
            &steps,
            remaining,
            settings.tolerances,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        evaluations += out.evaluations;
        iterations += out.iterations;
        converged = out.converged;
    }

    if best_z == z0 {
        return Ok(keep_start(evaluations, iterations, trace, b0));
    }
    let best = candidate(&best_z)?;
    best.validate()?;
    let report = kappa::evaluate(&best)?;
    if report.bound < start_bound {
        return Ok(keep_start(evaluations, iterations, trace, b0));
    }
    Ok(OptimizationResult {
        best_bound: report.bound,
        best_config: best,
        start_bound,
        search_bound: best_b,
        iterations,
        evaluations,
        trace,
        converged,
        report,
    })
}
