//! Joint two-branch tanh envelope fit on pulse switching data.

use crate::device_model::{DeviceRule, EnvelopeParams};
use crate::fitting::gauss_newton::{damped_gauss_newton, GnConfig};
use crate::fitting::{FitError, FitReport, PulseTrace};
use crate::scalar::Real;

/// Extracts a hysteresis rule from a write-read pulse trace.
///
/// Records whose resistance change exceeds `delta_threshold` (default: 1%
/// of the trace's resistance dynamic range, matching the no-change
/// deadband of the measurements) are switching events; their final
/// resistances sample the envelope of the pulse polarity. Both branches
/// are fitted jointly by damped Gauss-Newton with the resistance bounds
/// shared across branches, initialized from the data extrema, the
/// midpoint-crossing voltage, and the 25-75% rise width. `residual_rms`
/// is in ohms. A budget-exhausted fit still returns its best parameters
/// with `converged = false`.
pub fn fit_envelopes<S: Real>(
    trace: &PulseTrace<S>,
    delta_threshold: Option<S>,
) -> Result<FitReport<DeviceRule<S>, S>, FitError> {
    trace.validate()?;
    let range = trace.dynamic_range();
    if !(range > S::zero()) {
        return Err(FitError::InsufficientSwitchingEvents {
            positive: 0,
            negative: 0,
            needed: MIN_EVENTS,
        });
    }
    let threshold = delta_threshold.unwrap_or(S::of(0.01) * range);

    let mut upper: Vec<(S, S)> = Vec::new();
    let mut lower: Vec<(S, S)> = Vec::new();
    let mut v_abs_max = S::zero();
    for rec in &trace.records {
        if rec.v_write.abs() > v_abs_max {
            v_abs_max = rec.v_write.abs();
        }
        if (rec.r_final - rec.r_initial).abs() <= threshold {
            continue;
        }
        if rec.v_write < S::zero() {
            upper.push((rec.v_write, rec.r_final));
        } else if rec.v_write > S::zero() {
            lower.push((rec.v_write, rec.r_final));
        }
    }
    if upper.len() < MIN_EVENTS || lower.len() < MIN_EVENTS {
        return Err(FitError::InsufficientSwitchingEvents {
            positive: lower.len(),
            negative: upper.len(),
            needed: MIN_EVENTS,
        });
    }

    // Scale resistances to order 1 so the normal equations mix resistance
    // and voltage parameters without conditioning trouble.
    let r_scale = upper
        .iter()
        .chain(&lower)
        .map(|&(_, r)| r)
        .fold(S::zero(), |a, b| if b > a { b } else { a });
    let scaled =
        |pts: &[(S, S)]| -> Vec<(S, S)> { pts.iter().map(|&(v, r)| (v, r / r_scale)).collect() };
    let upper_s = scaled(&upper);
    let lower_s = scaled(&lower);

    let r_lo_0 = upper_s
        .iter()
        .chain(&lower_s)
        .map(|&(_, r)| r)
        .fold(S::infinity(), |a, b| if b < a { b } else { a });
    let (v0_up_0, voff_up_0) = branch_shape_guess(&upper_s, r_lo_0, S::one());
    let (v0_lo_0, voff_lo_0) = branch_shape_guess(&lower_s, r_lo_0, S::one());
    // Parameter order: r_min, r_max, upper v0, upper v_off, lower v0,
    // lower v_off (scaled resistance units).
    let init = [r_lo_0, S::one(), v0_up_0, voff_up_0, v0_lo_0, voff_lo_0];

    let n_up = upper_s.len();
    let n_total = n_up + lower_s.len();
    let row = |p: &[S; 6], i: usize| {
        let (v, r, shape) = if i < n_up {
            (upper_s[i].0, upper_s[i].1, 0)
        } else {
            (lower_s[i - n_up].0, lower_s[i - n_up].1, 1)
        };
        let (v0, voff) = if shape == 0 { (p[2], p[3]) } else { (p[4], p[5]) };
        let half = S::of(0.5);
        let c = (p[0] + p[1]) * half;
        let s = (p[1] - p[0]) * half;
        let u = (v - voff) / v0;
        let t = u.tanh();
        let sech2 = S::one() - t * t;
        let mut grad = [S::zero(); 6];
        grad[0] = (S::one() - t) * half;
        grad[1] = (S::one() + t) * half;
        let dv0 = -(s * sech2 * u / v0);
        let dvoff = -(s * sech2 / v0);
        if shape == 0 {
            grad[2] = dv0;
            grad[3] = dvoff;
        } else {
            grad[4] = dv0;
            grad[5] = dvoff;
        }
        (c + s * t - r, grad)
    };
    let hundred = S::of(100.0);
    let is_valid = |p: &[S; 6]| {
        p[0] > S::zero()
            && p[1] > p[0]
            && p[2] > S::of(1e-6)
            && p[4] > S::of(1e-6)
            && p[3].abs() < hundred
            && p[5].abs() < hundred
    };
    let out = damped_gauss_newton(init, n_total, row, is_valid, &GnConfig::default());

    let p = out.params;
    let rule = DeviceRule {
        upper: EnvelopeParams {
            r_min: p[0] * r_scale,
            r_max: p[1] * r_scale,
            v0: p[2],
            v_off: p[3],
        },
        lower: EnvelopeParams {
            r_min: p[0] * r_scale,
            r_max: p[1] * r_scale,
            v0: p[4],
            v_off: p[5],
        },
        validity_range: v_abs_max,
        min_pulse_width: S::zero(),
    };
    let residual_rms = (out.sse / S::of(n_total as f64)).sqrt() * r_scale;
    Ok(FitReport { parameters: rule, residual_rms, n_points: n_total, converged: out.converged })
}

const MIN_EVENTS: usize = 10;

/// Shape guesses for one branch from its `(v, r)` samples sorted by
/// voltage: offset from the voltage where the data crosses the midpoint
/// resistance, slope scale from the 25-75% rise width of the tanh.
fn branch_shape_guess<S: Real>(points: &[(S, S)], r_lo: S, r_hi: S) -> (S, S) {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite voltages"));
    let level = |f: f64| r_lo + S::of(f) * (r_hi - r_lo);
    let v_min = sorted.first().expect("nonempty branch").0;
    let v_max = sorted.last().expect("nonempty branch").0;
    let span = v_max - v_min;
    let cross = |target: S| -> Option<S> {
        for w in sorted.windows(2) {
            let (v_a, r_a) = w[0];
            let (v_b, r_b) = w[1];
            if (r_a - target) * (r_b - target) <= S::zero() && r_a != r_b {
                return Some(v_a + (target - r_a) / (r_b - r_a) * (v_b - v_a));
            }
        }
        None
    };
    let half = S::of(0.5);
    let v_off = cross(level(0.5)).unwrap_or(v_min + span * half);
    // Between the 25% and 75% levels the tanh argument spans
    // 2 atanh(0.5), so the rise width divides by that to give the slope
    // scale.
    let v0 = match (cross(level(0.25)), cross(level(0.75))) {
        (Some(a), Some(b)) if b > a => (b - a) / S::of(2.0 * 0.5_f64.atanh()),
        _ => span * S::of(0.25),
    };
    (v0.max(S::of(1e-3)), v_off)
}
