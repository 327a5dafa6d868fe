//! Nelder–Mead simplex minimization with dimension-adaptive coefficients.

/// Stopping rules for one simplex run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Spread of function values across the simplex.
    pub f_tol: f64,
    /// Largest vertex distance from the best vertex, per coordinate.
    pub x_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            f_tol: 1e-12,
            x_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from the simplex spanned by `x0` and `x0 + steps[i] e_i`.
///
/// At most `budget` calls of `f` are made. Non-finite values are treated as
/// `+∞`, so infeasible points are simply never accepted.
pub fn minimize<F>(mut f: F, x0: &[f64], steps: &[f64], budget: usize, tol: Tolerances) -> Outcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(steps.len(), n);
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    if budget == 0 {
        return Outcome {
            x: x0.to_vec(),
            f: f64::INFINITY,
            evaluations: 0,
            iterations: 0,
            converged: false,
        };
    }
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        if evals >= budget {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }
    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    sort(&mut simplex);
    if simplex.len() < n + 1 {
        let (x, fx) = simplex.swap_remove(0);
        return Outcome {
            x,
            f: fx,
            evaluations: evals,
            iterations: 0,
            converged: false,
        };
    }

    let mut iterations = 0;
    let mut converged = false;
    while evals < budget {
        let best = &simplex[0];
        let spread = simplex[n].1 - best.1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= tol.f_tol && size <= tol.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / nf;
            }
        }
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = toward(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            if evals >= budget {
                simplex[n] = (xr, fr);
            } else {
                let xe = toward(gamma);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            }
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            if evals >= budget {
                break;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = toward(alpha * rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = toward(-rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for v in simplex[1..].iter_mut() {
                    if evals >= budget {
                        break;
                    }
                    let xs: Vec<f64> = x_best
                        .iter()
                        .zip(&v.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    let fs = eval(&xs, &mut evals);
                    *v = (xs, fs);
                }
            }
        }
        sort(&mut simplex);
    }
    let (x, fx) = simplex.swap_remove(0);
    Outcome {
        x,
        f: fx,
        evaluations: evals,
        iterations,
        converged,
    }
}
