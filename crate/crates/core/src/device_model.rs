//! Hysteretic resistive-synapse device model.
//!
//! The device exposes a read resistance bounded by two voltage-dependent
//! tanh envelopes. A write pulse of amplitude `v` moves the state onto the
//! upper envelope (negative polarity, resistance can only drop) or the
//! lower envelope (positive polarity, resistance can only rise); a pulse
//! whose envelope value would move the state the wrong way leaves it
//! untouched. The resulting final state depends only on the largest
//! amplitude applied since the last polarity reversal, not on the state
//! the device started from, which is what makes amplitude-addressed
//! programming possible without read-verify loops.
//!
//! All operations are pure value-to-value functions; sequences driven from
//! a fixed seed are bit-reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Errors produced by device-model operations.
#[derive(Debug, Error)]
pub enum DeviceError {
    /// Parameter record violates a structural invariant.
    #[error("invalid device parameters: {0}")]
    InvalidParams(String),
    /// Pulse amplitude outside the range the rule was calibrated on.
    #[error("pulse amplitude {amplitude} V outside calibrated range +/-{limit} V")]
    OutOfCalibratedRange { amplitude: f64, limit: f64 },
    /// Pulse width below the configured self-loading limit.
    #[error("pulse width {width} s below minimum programmable width {min} s")]
    PulseTooShort { width: f64, min: f64 },
    /// Resistance outside the representable device bounds.
    #[error("resistance {resistance} ohm outside bounds [{lo}, {hi}] ohm")]
    OutOfRange { resistance: f64, lo: f64, hi: f64 },
    /// Pulse schedule was empty.
    #[error("empty pulse schedule")]
    EmptySchedule,
    /// A pulse inside a schedule failed; carries the offending index.
    #[error("pulse {index} in schedule: {source}")]
    ScheduleFailed {
        index: usize,
        #[source]
        source: Box<DeviceError>,
    },
}

/// One tanh switching envelope: resistance the device lands on when a
/// pulse of a given amplitude actually switches it.
///
/// `eval_envelope` computes `r_off + r_s * tanh((v - v_off) / v0)` with
/// `r_off = (r_max + r_min) / 2` and `r_s = (r_max - r_min) / 2`, so the
/// curve rises from `r_min` to `r_max` around the transition center
/// `v_off` with steepness `v0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams<S = f64> {
    /// Lower resistance bound, ohm.
    pub r_min: S,
    /// Upper resistance bound, ohm.
    pub r_max: S,
    /// Transition steepness, V.
    pub v0: S,
    /// Transition center, V.
    pub v_off: S,
}

impl<S: Real> EnvelopeParams<S> {
    /// Validated constructor; see [`EnvelopeParams::validate`].
    pub fn new(r_min: S, r_max: S, v0: S, v_off: S) -> Result<Self, DeviceError> {
        let p = Self { r_min, r_max, v0, v_off };
        p.validate()?;
        Ok(p)
    }

    /// Checks `r_max > r_min > 0` and `v0 > 0`.
    pub fn validate(&self) -> Result<(), DeviceError> {
        if !(self.r_min > S::zero()) || !(self.r_max > self.r_min) {
            return Err(DeviceError::InvalidParams(format!(
                "need r_max > r_min > 0, got r_min={} r_max={}",
                self.r_min, self.r_max
            )));
        }
        if !(self.v0 > S::zero()) {
            return Err(DeviceError::InvalidParams(format!(
                "need v0 > 0, got {}",
                self.v0
            )));
        }
        Ok(())
    }

    /// Midpoint resistance `(r_max + r_min) / 2`.
    pub fn r_off(&self) -> S {
        (self.r_max + self.r_min) / S::of(2.0)
    }

    /// Half swing `(r_max - r_min) / 2`.
    pub fn r_s(&self) -> S {
        (self.r_max - self.r_min) / S::of(2.0)
    }
}

/// Evaluates a switching envelope at amplitude `v`.
///
/// Total, strictly increasing in `v`, bounded in `(r_min, r_max)`.
pub fn eval_envelope<S: Real>(p: &EnvelopeParams<S>, v: S) -> S {
    p.r_off() + p.r_s() * ((v - p.v_off) / p.v0).tanh()
}

/// The full amplitude-controlled update rule: one envelope per polarity
/// plus the amplitude range the pair was calibrated on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct DeviceRule<S = f64> {
    /// Envelope targeted by negative pulses; dominates `lower` pointwise.
    pub upper: EnvelopeParams<S>,
    /// Envelope targeted by positive pulses.
    pub lower: EnvelopeParams<S>,
    /// Largest |amplitude| the rule is valid for, V.
    #[serde(rename = "validity_range_volts")]
    pub validity_range: S,
    /// Pulses narrower than this are rejected as unable to charge the
    /// stack; zero disables the check. Seconds.
    #[serde(rename = "min_pulse_width_seconds", default = "S::zero")]
    pub min_pulse_width: S,
}

impl<S: Real> DeviceRule<S> {
    /// Validated constructor; see [`DeviceRule::validate`].
    pub fn new(
        upper: EnvelopeParams<S>,
        lower: EnvelopeParams<S>,
        validity_range: S,
    ) -> Result<Self, DeviceError> {
        let rule = Self {
            upper,
            lower,
            validity_range,
            min_pulse_width: S::zero(),
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Checks both envelopes, `upper.v_off < lower.v_off`, positive
    /// validity range, and pointwise envelope dominance
    /// `f_upper(v) >= f_lower(v)` on a 1001-point grid spanning the
    /// validity range.
    pub fn validate(&self) -> Result<(), DeviceError> {
        self.upper.validate()?;
        self.lower.validate()?;
        if !(self.upper.v_off < self.lower.v_off) {
            return Err(DeviceError::InvalidParams(format!(
                "need upper.v_off < lower.v_off, got {} vs {}",
                self.upper.v_off, self.lower.v_off
            )));
        }
        if !(self.validity_range > S::zero()) {
            return Err(DeviceError::InvalidParams(
                "validity range must be positive".into(),
            ));
        }
        if self.min_pulse_width < S::zero() {
            return Err(DeviceError::InvalidParams(
                "minimum pulse width must be >= 0".into(),
            ));
        }
        let n = 1000;
        for k in 0..=n {
            let t = S::from_usize(k).unwrap() / S::from_usize(n).unwrap();
            let v = self.validity_range * (S::of(2.0) * t - S::one());
            if eval_envelope(&self.upper, v) < eval_envelope(&self.lower, v) {
                return Err(DeviceError::InvalidParams(format!(
                    "upper envelope falls below lower envelope at {} V",
                    v
                )));
            }
        }
        Ok(())
    }

    /// Most depressed state reachable within the validity range (the
    /// default starting point for experiments).
    pub fn hrs(&self) -> DeviceState<S> {
        DeviceState {
            resistance: eval_envelope(&self.lower, self.validity_range),
        }
    }

    /// Most potentiated state reachable within the validity range.
    pub fn lrs(&self) -> DeviceState<S> {
        DeviceState {
            resistance: eval_envelope(&self.upper, -self.validity_range),
        }
    }

    fn check_pulse(&self, pulse: &PulseSpec<S>) -> Result<(), DeviceError> {
        if pulse.amplitude.abs() > self.validity_range {
            return Err(DeviceError::OutOfCalibratedRange {
                amplitude: pulse.amplitude.as_f64(),
                limit: self.validity_range.as_f64(),
            });
        }
        if !(pulse.width > S::zero()) || pulse.width < self.min_pulse_width {
            return Err(DeviceError::PulseTooShort {
                width: pulse.width.as_f64(),
                min: self.min_pulse_width.as_f64(),
            });
        }
        Ok(())
    }
}

/// Read resistance of one device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceState<S = f64> {
    /// Ohm.
    pub resistance: S,
}

/// One write pulse: signed amplitude applied to the top electrode, and
/// duration. Width is carried for energy/timing accounting and the
/// minimum-width check; it does not otherwise alter the update, which is
/// calibrated at a fixed write width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec<S = f64> {
    /// V, signed.
    pub amplitude: S,
    /// Seconds, > 0.
    pub width: S,
}

/// One row of a write-read experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord<S = f64> {
    /// Write amplitude, V.
    pub v_write: S,
    /// Resistance before the pulse, ohm.
    pub r_initial: S,
    /// Resistance after the pulse, ohm.
    pub r_final: S,
    /// `r_final - r_initial`, ohm.
    pub delta_r: S,
}

/// Applies one pulse to a state and returns the new state.
///
/// Negative amplitude pulls the resistance down onto the upper envelope if
/// the state sits above it; positive amplitude pushes it up onto the lower
/// envelope if the state sits below it; otherwise the state is unchanged.
/// The input state is never mutated.
pub fn apply_pulse<S: Real>(
    state: DeviceState<S>,
    rule: &DeviceRule<S>,
    pulse: PulseSpec<S>,
) -> Result<DeviceState<S>, DeviceError> {
    rule.check_pulse(&pulse)?;
    let v = pulse.amplitude;
    let r = state.resistance;
    let resistance = if v < S::zero() {
        let target = eval_envelope(&rule.upper, v);
        if r > target {
            target
        } else {
            r
        }
    } else if v > S::zero() {
        let target = eval_envelope(&rule.lower, v);
        if r < target {
            target
        } else {
            r
        }
    } else {
        r
    };
    Ok(DeviceState { resistance })
}

/// Maps a read resistance to a synaptic weight in `[0, 1]`.
///
/// The weight is the normalized conductance
/// `(1/r - 1/r_max) / (1/r_min - 1/r_max)`, so the low-resistive state
/// maps to 1 and the high-resistive state to 0; strictly decreasing in
/// `r`. Bounds are taken from the rule's shared `r_min`/`r_max`.
pub fn resistance_to_weight<S: Real>(r: S, rule: &DeviceRule<S>) -> Result<S, DeviceError> {
    let (lo, hi) = (rule.lower.r_min, rule.lower.r_max);
    if r < lo || r > hi {
        return Err(DeviceError::OutOfRange {
            resistance: r.as_f64(),
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let g_min = hi.recip();
    let g_max = lo.recip();
    Ok((r.recip() - g_min) / (g_max - g_min))
}

/// Inverse of [`resistance_to_weight`].
pub fn weight_to_resistance<S: Real>(w: S, rule: &DeviceRule<S>) -> Result<S, DeviceError> {
    if w < S::zero() || w > S::one() {
        return Err(DeviceError::OutOfRange {
            resistance: w.as_f64(),
            lo: 0.0,
            hi: 1.0,
        });
    }
    let g_min = rule.lower.r_max.recip();
    let g_max = rule.lower.r_min.recip();
    // The exact inverse maps [0, 1] onto [r_min, r_max]; clamp away the
    // last-ULP rounding so endpoints convert back without a range error.
    Ok((g_min + w * (g_max - g_min))
        .recip()
        .max(rule.lower.r_min)
        .min(rule.lower.r_max))
}

/// Folds [`apply_pulse`] over a pulse schedule, recording the post-pulse
/// read resistance after each step.
pub fn simulate_staircase<S: Real>(
    rule: &DeviceRule<S>,
    initial: DeviceState<S>,
    schedule: &[PulseSpec<S>],
) -> Result<Vec<(PulseSpec<S>, S)>, DeviceError> {
    if schedule.is_empty() {
        return Err(DeviceError::EmptySchedule);
    }
    let mut state = initial;
    let mut trace = Vec::with_capacity(schedule.len());
    for (index, &pulse) in schedule.iter().enumerate() {
        state = apply_pulse(state, rule, pulse).map_err(|source| DeviceError::ScheduleFailed {
            index,
            source: Box::new(source),
        })?;
        trace.push((pulse, state.resistance));
    }
    Ok(trace)
}

/// Runs a write-read sequence with uniformly random amplitudes from
/// `v_range`, all at the given width, and records each transition.
///
/// Amplitudes come from a counter-based generator seeded with `seed`;
/// the output is bit-identical across runs and platforms for a fixed
/// seed.
pub fn simulate_random_pulses<S: Real>(
    rule: &DeviceRule<S>,
    initial: DeviceState<S>,
    n: usize,
    v_range: (S, S),
    width: S,
    seed: u64,
) -> Result<Vec<PulseRecord<S>>, DeviceError> {
    if n == 0 {
        return Err(DeviceError::InvalidParams("need n >= 1".into()));
    }
    let (lo, hi) = (v_range.0.as_f64(), v_range.1.as_f64());
    if !(lo < hi) {
        return Err(DeviceError::InvalidParams(format!(
            "need v_lo < v_hi, got ({lo}, {hi})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = initial;
    let mut records = Vec::with_capacity(n);
    for _ in 0..n {
        // Drawn in f64 regardless of S so that f32 and f64 instantiations
        // see the same amplitude sequence.
        let v = S::of(rng.random_range(lo..hi));
        let next = apply_pulse(state, rule, PulseSpec { amplitude: v, width })?;
        records.push(PulseRecord {
            v_write: v,
            r_initial: state.resistance,
            r_final: next.resistance,
            delta_r: next.resistance - state.resistance,
        });
        state = next;
    }
    Ok(records)
}

/// Tests whether a recorded `(v, r)` point lies in the region reachable by
/// the update rule from start resistance `r_start` with amplitudes drawn
/// from `v_range`, up to relative tolerance `rel_tol`.
///
/// The region is bounded above by the lower envelope at the most positive
/// drawable amplitude (or the start state if it began higher), below by
/// the upper envelope at the most negative amplitude, and additionally by
/// the per-polarity envelope at the recorded amplitude itself.
pub fn in_reachable_region<S: Real>(
    rule: &DeviceRule<S>,
    v_range: (S, S),
    r_start: S,
    v: S,
    r: S,
    rel_tol: S,
) -> bool {
    let one = S::one();
    let lo_bound = eval_envelope(&rule.upper, v_range.0).min(r_start);
    let hi_bound = eval_envelope(&rule.lower, v_range.1).max(r_start);
    if r < lo_bound * (one - rel_tol) || r > hi_bound * (one + rel_tol) {
        return false;
    }
    if v < S::zero() && r > eval_envelope(&rule.upper, v) * (one + rel_tol) {
        return false;
    }
    if v > S::zero() && r < eval_envelope(&rule.lower, v) * (one - rel_tol) {
        return false;
    }
    true
}

/// Tests whether `r` sits exactly on one of the two envelopes at `v`, up
/// to relative tolerance `rel_tol`.
pub fn on_envelope<S: Real>(rule: &DeviceRule<S>, v: S, r: S, rel_tol: S) -> bool {
    let up = eval_envelope(&rule.upper, v);
    let lo = eval_envelope(&rule.lower, v);
    (r - up).abs() <= up.abs() * rel_tol || (r - lo).abs() <= lo.abs() * rel_tol
}
