//! Damped Gauss-Newton driver shared by the nonlinear fitters.
//!
//! The caller supplies analytic residual/Jacobian rows and a parameter
//! validity predicate; the driver iterates full Gauss-Newton steps with
//! halving backtracks until the relative step drops below tolerance or the
//! iteration budget runs out. Everything is deterministic: fixed iteration
//! schedule, no randomized restarts.

use crate::fitting::linalg::solve;
use crate::scalar::Real;

/// Iteration controls. The defaults match the fitters' documented
/// schedule: at most 200 iterations, convergence at relative step 1e-8.
#[derive(Debug, Clone, Copy)]
pub struct GnConfig {
    pub max_iters: usize,
    pub rel_step_tol: f64,
    pub max_backtracks: usize,
}

impl Default for GnConfig {
    fn default() -> Self {
        Self { max_iters: 200, rel_step_tol: 1e-8, max_backtracks: 40 }
    }
}

/// Outcome of a Gauss-Newton run: best parameters seen, their sum of
/// squared residuals, and whether the step-size criterion was met.
#[derive(Debug, Clone, Copy)]
pub struct GnResult<S, const P: usize> {
    pub params: [S; P],
    pub sse: S,
    pub iterations: usize,
    pub converged: bool,
}

fn sse_of<S: Real, const P: usize>(
    params: &[S; P],
    n: usize,
    row: &impl Fn(&[S; P], usize) -> (S, [S; P]),
) -> S {
    let mut acc = S::zero();
    for i in 0..n {
        let (r, _) = row(params, i);
        acc = acc + r * r;
    }
    acc
}

/// Minimizes the sum of squared residuals over `n` data rows.
///
/// `row(params, i)` returns the i-th residual (model minus data) and its
/// gradient with respect to the parameters. `is_valid` rejects candidate
/// parameter vectors outside the model's domain; invalid candidates are
/// backtracked past without evaluating residuals. Returns the best-so-far
/// parameters with `converged = false` when the budget is exhausted, so
/// callers can surface partial fits instead of discarding them.
pub fn damped_gauss_newton<S: Real, const P: usize>(
    init: [S; P],
    n: usize,
    row: impl Fn(&[S; P], usize) -> (S, [S; P]),
    is_valid: impl Fn(&[S; P]) -> bool,
    cfg: &GnConfig,
) -> GnResult<S, P> {
    debug_assert!(is_valid(&init), "initial guess must be valid");
    let mut params = init;
    let mut sse = sse_of(&params, n, &row);
    let tol = S::of(cfg.rel_step_tol);
    let tiny = S::of(1e-300);

    for iter in 0..cfg.max_iters {
        let mut jtj = [[S::zero(); P]; P];
        let mut jtr = [S::zero(); P];
        for i in 0..n {
            let (r, grad) = row(&params, i);
            for a in 0..P {
                jtr[a] = jtr[a] + grad[a] * r;
                for b in a..P {
                    jtj[a][b] = jtj[a][b] + grad[a] * grad[b];
                }
            }
        }
        for a in 0..P {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }
        let delta = match solve(jtj, jtr) {
            Some(d) => d,
            None => {
                return GnResult { params, sse, iterations: iter, converged: false };
            }
        };

        let mut step = S::one();
        let mut accepted = false;
        for _ in 0..=cfg.max_backtracks {
            let mut cand = params;
            for a in 0..P {
                cand[a] = cand[a] - step * delta[a];
            }
            if is_valid(&cand) {
                let cand_sse = sse_of(&cand, n, &row);
                if cand_sse.is_finite() && cand_sse <= sse {
                    let mut rel = S::zero();
                    for a in 0..P {
                        let r = (step * delta[a]).abs() / (params[a].abs() + tiny);
                        if r > rel {
                            rel = r;
                        }
                    }
                    params = cand;
                    sse = cand_sse;
                    accepted = true;
                    if rel < tol {
                        return GnResult { params, sse, iterations: iter + 1, converged: true };
                    }
                    break;
                }
            }
            step = step / S::of(2.0);
        }
        if !accepted {
            // No descent direction even at the smallest damping: the
            // iterate is a numerical stationary point.
            return GnResult { params, sse, iterations: iter, converged: true };
        }
    }
    GnResult { params, sse, iterations: cfg.max_iters, converged: false }
}
