//! Voltage-driven synaptic plasticity rule.
//!
//! A weight update is the product of a switching-rate term that depends
//! only on the programming voltage and a window term that depends only on
//! the current weight: voltages below the potentiation threshold increase
//! the weight, voltages above the depression threshold decrease it, and
//! the window shrinks updates near the weight bounds so `[0, 1]` is
//! preserved under clipped iteration.
//!
//! With the fitted constants shipped in the reference card the two
//! threshold conditions overlap on `(theta_d, theta_p)`. The depression
//! branch takes precedence there: both branch magnitudes are within a few
//! percent of zero on the overlap, so the choice is numerically minor,
//! but it is centralized in [`switching_rate`] and nowhere else.
//!
//! In the spiking-network simulator the voltage fed to this rule is not
//! the raw membrane potential: it is first scaled per polarity by
//! [`map_voltage`], and [`membrane_update`] bundles the full
//! membrane-to-weight-change pipeline.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Errors produced by the plasticity rule.
#[derive(Debug, Error)]
pub enum VdspError {
    /// Weight outside `[0, 1]`.
    #[error("weight {w} outside [0, 1]")]
    OutOfRange { w: f64 },
    /// Parameter record violates a structural invariant.
    #[error("invalid plasticity parameters: {0}")]
    InvalidParams(String),
}

/// Fitted constants of the plasticity rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdspParams<S = f64> {
    /// Potentiation curvature, 1/V.
    pub alpha_p: S,
    /// Depression curvature, 1/V.
    pub alpha_d: S,
    /// Potentiation threshold, V.
    pub theta_p: S,
    /// Depression threshold, V.
    pub theta_d: S,
    /// Potentiation window exponent.
    pub gamma_p: S,
    /// Depression window exponent.
    pub gamma_d: S,
}

impl<S: Real> VdspParams<S> {
    /// Checks that every field is strictly positive. `theta_d <= theta_p`
    /// is allowed; see the module notes on the overlap.
    pub fn validate(&self) -> Result<(), VdspError> {
        let ok = self.alpha_p > S::zero()
            && self.alpha_d > S::zero()
            && self.theta_p > S::zero()
            && self.theta_d > S::zero()
            && self.gamma_p > S::zero()
            && self.gamma_d > S::zero();
        if !ok {
            return Err(VdspError::InvalidParams(
                "plasticity constants must all be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-polarity gains mapping membrane potential to programming voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactors<S = f64> {
    /// Potentiation gain.
    pub sf_p: S,
    /// Depression gain.
    pub sf_d: S,
}

impl<S: Real> ScalingFactors<S> {
    /// Checks positivity.
    pub fn validate(&self) -> Result<(), VdspError> {
        if !(self.sf_p > S::zero()) || !(self.sf_d > S::zero()) {
            return Err(VdspError::InvalidParams(
                "scaling factors must be strictly positive".into(),
            ));
        }
        Ok(())
    }

    /// Gains tuned per output-population size (grid-searched once per
    /// size on the reference task): 1.014/1.30 for 10 outputs, 1.04/1.30
    /// for 50 and 100, 1.0725/1.375 for 200. Other sizes get the nearest
    /// tuned row.
    pub fn for_output_count(n: usize) -> Self {
        let (sf_p, sf_d) = if n < 30 {
            (1.014, 1.30)
        } else if n <= 150 {
            (1.04, 1.30)
        } else {
            (1.0725, 1.375)
        };
        Self { sf_p: S::of(sf_p), sf_d: S::of(sf_d) }
    }
}

/// Update polarity selected by the switching-rate branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Potentiate,
    Depress,
    None,
}

/// Voltage-dependent switching rate: nonnegative magnitude plus polarity.
///
/// Potentiation branch `exp(-alpha_p (v - theta_p)) - 1` for voltages
/// below `theta_p`; depression branch `exp(alpha_d (v - theta_d)) - 1`
/// above `theta_d`. When the thresholds overlap (`theta_d < theta_p`)
/// depression takes the overlap; when they do not, voltages between the
/// thresholds (including `v == theta_p`, where the potentiation magnitude
/// is exactly zero) produce no update.
pub fn switching_rate<S: Real>(v: S, p: &VdspParams<S>) -> (S, Polarity) {
    if p.theta_d < p.theta_p {
        if v > p.theta_d {
            ((p.alpha_d * (v - p.theta_d)).exp() - S::one(), Polarity::Depress)
        } else {
            ((-p.alpha_p * (v - p.theta_p)).exp() - S::one(), Polarity::Potentiate)
        }
    } else if v > p.theta_d {
        ((p.alpha_d * (v - p.theta_d)).exp() - S::one(), Polarity::Depress)
    } else if v <= p.theta_p {
        ((-p.alpha_p * (v - p.theta_p)).exp() - S::one(), Polarity::Potentiate)
    } else {
        (S::zero(), Polarity::None)
    }
}

/// Weight-dependent window: `(1 - w)^gamma_p` when potentiating,
/// `w^gamma_d` when depressing, zero when no branch is active.
pub fn window<S: Real>(w: S, polarity: Polarity, p: &VdspParams<S>) -> Result<S, VdspError> {
    if w < S::zero() || w > S::one() {
        return Err(VdspError::OutOfRange { w: w.as_f64() });
    }
    Ok(match polarity {
        Polarity::Potentiate => (S::one() - w).powf(p.gamma_p),
        Polarity::Depress => w.powf(p.gamma_d),
        Polarity::None => S::zero(),
    })
}

/// Signed weight change at programming voltage `v` and current weight
/// `w`: magnitude times window, negative on the depression branch.
///
/// The caller owns clipping `w + delta` back to `[0, 1]`.
pub fn delta_w<S: Real>(v: S, w: S, p: &VdspParams<S>) -> Result<S, VdspError> {
    let (magnitude, polarity) = switching_rate(v, p);
    let g = window(w, polarity, p)?;
    Ok(match polarity {
        Polarity::Potentiate => magnitude * g,
        Polarity::Depress => -(magnitude * g),
        Polarity::None => S::zero(),
    })
}

/// Maps a normalized membrane potential to a programming voltage:
/// `v_prog = v_mem * sf * theta`.
pub fn map_voltage<S: Real>(v_mem: S, sf: S, theta: S) -> S {
    v_mem * sf * theta
}

/// Full membrane-to-weight-change pipeline used at a post-synaptic spike.
///
/// The membrane potential is first mapped with the depression gain; if the
/// mapped voltage clears the depression threshold the synapse is
/// depressed at that voltage. Otherwise it is mapped with the potentiation
/// gain, which by construction lands below the potentiation threshold.
/// Checking depression first keeps the two per-polarity mappings from
/// routing one membrane reading into the wrong branch.
pub fn membrane_update<S: Real>(
    v_mem: S,
    w: S,
    sf: &ScalingFactors<S>,
    p: &VdspParams<S>,
) -> Result<S, VdspError> {
    let v_d = map_voltage(v_mem, sf.sf_d, p.theta_d);
    if v_d > p.theta_d {
        return delta_w(v_d, w, p);
    }
    delta_w(map_voltage(v_mem, sf.sf_p, p.theta_p), w, p)
}
