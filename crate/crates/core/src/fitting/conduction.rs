//! Conduction-branch fitters: trap-filled-limit regression on the positive
//! sweep and barrier-lowering regression on the negative sweep.

use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, ELEMENTARY_CHARGE, VACUUM_PERMITTIVITY};
use crate::device_physics::{SchottkyParams, TflParams};
use crate::fitting::{linreg, FitError, FitReport, IvTrace};
use crate::scalar::Real;

/// Trap-filled-limit fit output: the extracted parameter record plus the
/// freely fitted voltage exponent, which the quadratic law predicts to be
/// 2 and which drives the report's `converged` flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TflFit<S = f64> {
    pub params: TflParams<S>,
    pub exponent: S,
}

/// Fits the quadratic current-density law on points at `V >= v_min` by
/// log-log regression of density against voltage.
///
/// The exponent is left free; `converged` is true when it lands in
/// `[1.8, 2.2]`, flagging traces that are not actually in the
/// trap-filled regime (an ohmic trace fits exponent 1 and is rejected).
/// `v_min` is reported back as the regime onset `v_tr`. `residual_rms` is
/// in log-density units.
pub fn fit_tfl<S: Real>(
    trace: &IvTrace<S>,
    v_min: S,
) -> Result<FitReport<TflFit<S>, S>, FitError> {
    trace.validate()?;
    if !(v_min > S::zero()) {
        return Err(FitError::InvalidArgument("v_min must be > 0".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, &(v, _)) in trace.points.iter().enumerate() {
        if v < v_min {
            continue;
        }
        let j = trace.density(row);
        if !(j > S::zero()) {
            return Err(FitError::NonPositiveCurrent { row, voltage: v.as_f64() });
        }
        xs.push(v.ln());
        ys.push(j.ln());
    }
    if xs.len() < 5 {
        return Err(FitError::InsufficientData(format!(
            "need >= 5 points at V >= {}, got {}",
            v_min.as_f64(),
            xs.len()
        )));
    }
    let (exponent, intercept, residual_rms) =
        linreg(&xs, &ys).ok_or(FitError::DegenerateFit("all voltages equal".into()))?;
    let low = S::of(1.8);
    let high = S::of(2.2);
    Ok(FitReport {
        parameters: TflFit {
            params: TflParams { k_tfl: intercept.exp(), v_tr: v_min },
            exponent,
        },
        residual_rms,
        n_points: xs.len(),
        converged: exponent >= low && exponent <= high,
    })
}

/// Fits the thermionic-emission branch on the negative-polarity points.
///
/// Regresses `ln(|J|/T^2)` against `sqrt(|V|/d)`: the slope fixes the
/// barrier-lowering coefficient and hence the optical permittivity, the
/// intercept fixes the barrier height once the effective Richardson
/// constant `a_eff` is supplied (it is degenerate with the barrier and
/// must come from the assumed effective mass). Requires the negative
/// sweep to span at least a 3x voltage ratio so slope and intercept
/// separate. `residual_rms` is in `ln(|J|/T^2)` units.
pub fn fit_schottky<S: Real>(
    trace: &IvTrace<S>,
    d: S,
    temperature: S,
    a_eff: S,
) -> Result<FitReport<SchottkyParams<S>, S>, FitError> {
    trace.validate()?;
    if !(d > S::zero()) || !(temperature > S::zero()) || !(a_eff > S::zero()) {
        return Err(FitError::InvalidArgument(
            "d, temperature, and a_eff must be > 0".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut v_lo = S::infinity();
    let mut v_hi = S::zero();
    let t2 = temperature * temperature;
    for (row, &(v, _)) in trace.points.iter().enumerate() {
        if !(v < S::zero()) {
            continue;
        }
        let j = trace.density(row);
        if !(j < S::zero()) {
            return Err(FitError::NonPositiveCurrent { row, voltage: v.as_f64() });
        }
        let mag = v.abs();
        if mag < v_lo {
            v_lo = mag;
        }
        if mag > v_hi {
            v_hi = mag;
        }
        xs.push((mag / d).sqrt());
        ys.push((j.abs() / t2).ln());
    }
    if xs.len() < 2 {
        return Err(FitError::InsufficientData(format!(
            "need >= 2 negative-polarity points, got {}",
            xs.len()
        )));
    }
    if v_hi < S::of(3.0) * v_lo {
        return Err(FitError::InsufficientData(format!(
            "negative sweep spans {:.2}x, need >= 3x",
            (v_hi / v_lo).as_f64()
        )));
    }
    let (slope, intercept, residual_rms) =
        linreg(&xs, &ys).ok_or(FitError::DegenerateFit("all voltages equal".into()))?;
    if !(slope > S::zero()) {
        return Err(FitError::NegativeDiscriminant);
    }
    let q = S::of(ELEMENTARY_CHARGE);
    let kt = S::of(BOLTZMANN) * temperature;
    // slope = (q/kT) sqrt(q / (4 pi eps_r eps_0))
    let root = slope * kt / q;
    let eps_r = q / (S::of(4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY) * root * root);
    let phi_b = (a_eff.ln() - intercept) * kt / q;
    Ok(FitReport {
        parameters: SchottkyParams { a_eff, temperature, phi_b, eps_r },
        residual_rms,
        n_points: xs.len(),
        converged: phi_b > S::zero(),
    })
}
