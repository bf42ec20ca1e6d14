//! Parameter extraction from measurement traces.
//!
//! Four families of fitters, one per model component: log-log regression
//! for the trap-filled-limit branch, barrier-lowering regression for the
//! thermionic branch, log-linear regression for the field-activated
//! switching-time law, and damped Gauss-Newton fits for the hysteresis
//! envelopes and the plasticity surface. All fitters are deterministic
//! given their inputs: fixed iteration schedules, no randomized restarts.

mod conduction;
mod envelopes;
mod gauss_newton;
mod linalg;
mod merz;
mod vdsp_fit;

pub use conduction::{fit_schottky, fit_tfl, TflFit};
pub use envelopes::fit_envelopes;
pub use gauss_newton::{damped_gauss_newton, GnConfig, GnResult};
pub use merz::fit_merz;
pub use vdsp_fit::fit_vdsp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::device_model::PulseRecord;
use crate::scalar::Real;

/// Errors shared by the fitters.
#[derive(Debug, Error)]
pub enum FitError {
    /// Not enough usable points for the requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// A selected current sample is zero or has the wrong sign for the
    /// branch being fitted.
    #[error("unusable current at row {row} (V = {voltage}): zero or wrong sign")]
    NonPositiveCurrent { row: usize, voltage: f64 },
    /// A scalar argument is outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Regression slope sign is inconsistent with barrier lowering.
    #[error("fitted slope sign inconsistent with barrier lowering")]
    NegativeDiscriminant,
    /// The abscissa carries no information (all values equal).
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    /// Too few |delta R| events above threshold in one or both polarities.
    #[error("insufficient switching events: {positive} positive / {negative} negative, need {needed} each")]
    InsufficientSwitchingEvents { positive: usize, negative: usize, needed: usize },
    /// Structural problem with the input trace.
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
}

/// Which stable state a DC sweep was measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateLabel {
    Hrs,
    Lrs,
    Unknown,
}

/// A DC current-voltage sweep over a device of known area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct IvTrace<S = f64> {
    /// `(voltage V, current A)`, voltages strictly monotone.
    pub points: Vec<(S, S)>,
    /// Device area, m^2; divides currents into densities.
    pub area: S,
    pub state_label: StateLabel,
}

impl<S: Real> IvTrace<S> {
    /// Checks the structural invariants: at least 8 points, strictly
    /// monotone voltages, positive area.
    pub fn validate(&self) -> Result<(), FitError> {
        if self.points.len() < 8 {
            return Err(FitError::InvalidTrace(format!(
                "need >= 8 points, got {}",
                self.points.len()
            )));
        }
        if !(self.area > S::zero()) {
            return Err(FitError::InvalidTrace("area must be > 0".into()));
        }
        let increasing = self.points[1].0 > self.points[0].0;
        for w in self.points.windows(2) {
            let ok = if increasing { w[1].0 > w[0].0 } else { w[1].0 < w[0].0 };
            if !ok {
                return Err(FitError::InvalidTrace(
                    "voltages must be strictly monotone".into(),
                ));
            }
        }
        Ok(())
    }

    /// Current density at point `i`, A/m^2.
    pub fn density(&self, i: usize) -> S {
        self.points[i].1 / self.area
    }
}

/// A write-read pulse sequence: one record per applied pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct PulseTrace<S = f64> {
    pub records: Vec<PulseRecord<S>>,
}

impl<S: Real> PulseTrace<S> {
    /// Checks that every resistance reading is positive.
    pub fn validate(&self) -> Result<(), FitError> {
        for (i, rec) in self.records.iter().enumerate() {
            if !(rec.r_initial > S::zero()) || !(rec.r_final > S::zero()) {
                return Err(FitError::InvalidTrace(format!(
                    "non-positive resistance at record {i}"
                )));
            }
        }
        Ok(())
    }

    /// Largest minus smallest resistance reading over the whole trace.
    pub fn dynamic_range(&self) -> S {
        let mut lo = S::infinity();
        let mut hi = S::neg_infinity();
        for rec in &self.records {
            for r in [rec.r_initial, rec.r_final] {
                if r < lo {
                    lo = r;
                }
                if r > hi {
                    hi = r;
                }
            }
        }
        hi - lo
    }
}

/// Outcome of a fit: the extracted parameter record plus quality metadata.
///
/// `residual_rms` is in the units of the regression target, which each
/// fitter documents (ohms for the envelope fit, weight units for the
/// plasticity fit, log units for the regressions that fit in log space).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport<P, S = f64> {
    pub parameters: P,
    pub residual_rms: S,
    pub n_points: usize,
    pub converged: bool,
}

/// Ordinary least squares for `y = slope * x + intercept`.
///
/// Returns `(slope, intercept, rms_residual)`; `None` when the abscissa is
/// degenerate (all `x` equal) or fewer than two points are given.
pub(crate) fn linreg<S: Real>(xs: &[S], ys: &[S]) -> Option<(S, S, S)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = S::of(n as f64);
    let sx: S = xs.iter().copied().sum();
    let sy: S = ys.iter().copied().sum();
    let mx = sx / nf;
    let my = sy / nf;
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if sxx <= S::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut sse = S::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let r = slope * x + intercept - y;
        sse = sse + r * r;
    }
    Some((slope, intercept, (sse / nf).sqrt()))
}
