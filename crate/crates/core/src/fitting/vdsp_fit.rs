//! Plasticity-surface fit: separable recovery of the voltage and weight
//! factors of the update rule from sampled weight changes.

use crate::fitting::gauss_newton::{damped_gauss_newton, GnConfig, GnResult};
use crate::fitting::{FitError, FitReport};
use crate::scalar::Real;
use crate::vdsp::VdspParams;

/// Extracts the six plasticity constants from `(v, w_initial, delta_w)`
/// samples.
///
/// Samples are assigned to a branch by the sign of `delta_w` (zero-change
/// samples carry no information and are skipped), then each branch's
/// three constants are fitted on its own samples: a deterministic coarse
/// grid over threshold and window exponent with the curvature solved in
/// closed form seeds a damped Gauss-Newton polish. `residual_rms` is in
/// weight units over every assigned sample.
///
/// `deadband`, when given, drops samples with `|delta_w|` below that
/// fraction of the largest observed magnitude before branch assignment.
/// On noisy measurements the sign of a near-zero update is dominated by
/// read noise, and the misassigned samples land on the wrong side of the
/// fitted thresholds; a deadband of a few percent restores them. `None`
/// assigns every nonzero sample.
pub fn fit_vdsp<S: Real>(
    samples: &[(S, S, S)],
    deadband: Option<S>,
) -> Result<FitReport<VdspParams<S>, S>, FitError> {
    for &(_, w, _) in samples {
        if !(w > S::zero()) || !(w < S::one()) {
            return Err(FitError::InvalidArgument(format!(
                "initial weights must lie strictly inside (0, 1), got {}",
                w.as_f64()
            )));
        }
    }
    let floor = match deadband {
        Some(f) => {
            if !(f >= S::zero()) || !(f < S::one()) {
                return Err(FitError::InvalidArgument(
                    "deadband must lie in [0, 1)".into(),
                ));
            }
            let max_mag = samples
                .iter()
                .map(|&(_, _, dw)| dw.abs())
                .fold(S::zero(), |a, b| if b > a { b } else { a });
            f * max_mag
        }
        None => S::zero(),
    };
    let mut pot: Vec<(S, S, S)> = Vec::new();
    let mut dep: Vec<(S, S, S)> = Vec::new();
    for &(v, w, dw) in samples {
        if dw.abs() <= floor {
            continue;
        }
        if dw > S::zero() {
            pot.push((v, w, dw));
        } else if dw < S::zero() {
            dep.push((v, w, -dw));
        }
    }
    if pot.len() < MIN_PER_BRANCH || dep.len() < MIN_PER_BRANCH {
        return Err(FitError::InsufficientData(format!(
            "need >= {MIN_PER_BRANCH} switching samples per polarity, got {} potentiation / {} depression",
            pot.len(),
            dep.len()
        )));
    }

    let p_fit = fit_branch(&pot, Branch::Potentiation);
    let d_fit = fit_branch(&dep, Branch::Depression);
    let n_points = pot.len() + dep.len();
    let residual_rms = ((p_fit.sse + d_fit.sse) / S::of(n_points as f64)).sqrt();
    Ok(FitReport {
        parameters: VdspParams {
            alpha_p: p_fit.params[0],
            theta_p: p_fit.params[1],
            gamma_p: p_fit.params[2],
            alpha_d: d_fit.params[0],
            theta_d: d_fit.params[1],
            gamma_d: d_fit.params[2],
        },
        residual_rms,
        n_points,
        converged: p_fit.converged && d_fit.converged,
    })
}

const MIN_PER_BRANCH: usize = 4;

#[derive(Clone, Copy, PartialEq)]
enum Branch {
    Potentiation,
    Depression,
}

/// Fits `|delta_w| = (exp(|alpha (v - theta)|) - 1) * window(w)^gamma` on
/// one branch's samples, stored as `(v, w, |delta_w|)`.
fn fit_branch<S: Real>(pts: &[(S, S, S)], branch: Branch) -> GnResult<S, 3> {
    // Window base: distance to the bound the branch saturates at.
    let base = |w: S| match branch {
        Branch::Potentiation => S::one() - w,
        Branch::Depression => w,
    };
    // Signed voltage distance that makes the exponent positive on this
    // branch's side of the threshold.
    let dist = |v: S, theta: S| match branch {
        Branch::Potentiation => theta - v,
        Branch::Depression => v - theta,
    };
    let v_edge = pts
        .iter()
        .map(|&(v, _, _)| v)
        .fold(
            match branch {
                Branch::Potentiation => S::neg_infinity(),
                Branch::Depression => S::infinity(),
            },
            |a, b| match branch {
                Branch::Potentiation => {
                    if b > a {
                        b
                    } else {
                        a
                    }
                }
                Branch::Depression => {
                    if b < a {
                        b
                    } else {
                        a
                    }
                }
            },
        );

    let sse_at = |p: &[S; 3]| -> S {
        let mut acc = S::zero();
        for &(v, w, dw) in pts {
            let m = ((p[0] * dist(v, p[1])).exp() - S::one()) * base(w).powf(p[2]);
            let r = m - dw;
            acc = acc + r * r;
        }
        acc
    };

    // Coarse deterministic seed: threshold offsets beyond the data edge
    // and window exponents on a fixed grid, curvature in closed form by
    // a through-origin regression in log space.
    let mut best: Option<([S; 3], S)> = None;
    for k_theta in 0..=20 {
        let offset = S::of(1e-3 + 0.05 * k_theta as f64);
        let theta = match branch {
            Branch::Potentiation => v_edge + offset,
            Branch::Depression => v_edge - offset,
        };
        for k_gamma in 1..=16 {
            let gamma = S::of(0.25 * k_gamma as f64);
            let mut sxy = S::zero();
            let mut sxx = S::zero();
            let mut usable = true;
            for &(v, w, dw) in pts {
                let g = base(w).powf(gamma);
                let arg = S::one() + dw / g;
                if !(arg > S::zero()) || !arg.is_finite() {
                    usable = false;
                    break;
                }
                let x = dist(v, theta);
                let y = arg.ln();
                sxy = sxy + x * y;
                sxx = sxx + x * x;
            }
            if !usable || !(sxx > S::zero()) {
                continue;
            }
            let alpha = sxy / sxx;
            if !(alpha > S::zero()) {
                continue;
            }
            let cand = [alpha, theta, gamma];
            let sse = sse_at(&cand);
            if sse.is_finite() && best.map_or(true, |(_, b)| sse < b) {
                best = Some((cand, sse));
            }
        }
    }
    let init = match best {
        Some((p, _)) => p,
        // All grid cells degenerate; fall back to a unit guess.
        None => [
            S::one(),
            match branch {
                Branch::Potentiation => v_edge + S::of(0.1),
                Branch::Depression => v_edge - S::of(0.1),
            },
            S::one(),
        ],
    };

    let row = |p: &[S; 3], i: usize| {
        let (v, w, dw) = pts[i];
        let x = dist(v, p[1]);
        let e = (p[0] * x).exp();
        let g = base(w).powf(p[2]);
        let m = (e - S::one()) * g;
        // d dist / d theta is +1 on the potentiation branch, -1 on the
        // depression branch.
        let dtheta_sign = match branch {
            Branch::Potentiation => S::one(),
            Branch::Depression => -S::one(),
        };
        let grad = [
            x * e * g,
            p[0] * e * g * dtheta_sign,
            m * base(w).ln(),
        ];
        (m - dw, grad)
    };
    let is_valid =
        |p: &[S; 3]| p[0] > S::zero() && p[2] > S::of(1e-3) && p[2] < S::of(50.0);
    damped_gauss_newton(init, pts.len(), row, is_valid, &GnConfig::default())
}
