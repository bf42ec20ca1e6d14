//! Leaky integrate-and-fire neuron parameters and per-step update constants.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::snn::SnnError;

/// Leaky integrate-and-fire neuron parameters.
///
/// The membrane relaxes toward its drive with time constant `tau_mem`
/// (exponential-Euler update, exact for constant input). Crossing `v_thresh`
/// emits a spike, snaps the membrane to `v_reset` and silences the neuron
/// for `refractory` seconds. All potentials are in threshold-normalized
/// units; the defaults put the threshold at 1 and the reset at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct LifConfig<S = f64> {
    /// Membrane time constant in seconds.
    pub tau_mem: S,
    /// Firing threshold.
    pub v_thresh: S,
    /// Post-spike reset potential.
    pub v_reset: S,
    /// Silent period after a spike, in seconds.
    pub refractory: S,
    /// Simulation step in seconds.
    pub dt: S,
}

impl<S: Real> LifConfig<S> {
    /// Default input-layer neuron: 100 ms membrane, 5 ms refractory, 1 ms step.
    pub fn input_default() -> Self {
        Self {
            tau_mem: S::of(0.1),
            v_thresh: S::one(),
            v_reset: S::zero(),
            refractory: S::of(5e-3),
            dt: S::of(1e-3),
        }
    }

    /// Default output-layer neuron: slower 150 ms membrane, same step.
    pub fn output_default() -> Self {
        Self {
            tau_mem: S::of(0.15),
            ..Self::input_default()
        }
    }

    /// Checks positivity, step resolution (`dt <= tau_mem / 10`) and the
    /// reset/threshold ordering.
    pub fn validate(&self) -> Result<(), SnnError> {
        let fields = [
            ("tau_mem", self.tau_mem),
            ("v_thresh", self.v_thresh),
            ("v_reset", self.v_reset),
            ("refractory", self.refractory),
            ("dt", self.dt),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(SnnError::InvalidConfig(format!("{name} must be finite")));
            }
        }
        if self.tau_mem <= S::zero() || self.dt <= S::zero() {
            return Err(SnnError::InvalidConfig("tau_mem and dt must be positive".into()));
        }
        if self.dt > self.tau_mem / S::of(10.0) {
            return Err(SnnError::InvalidConfig(format!(
                "dt = {} too coarse for tau_mem = {} (need dt <= tau_mem / 10)",
                self.dt, self.tau_mem
            )));
        }
        if self.v_reset >= self.v_thresh {
            return Err(SnnError::InvalidConfig("v_reset must lie below v_thresh".into()));
        }
        if self.refractory < S::zero() {
            return Err(SnnError::InvalidConfig("refractory must be non-negative".into()));
        }
        Ok(())
    }

    /// Per-step constants used by the inner simulation loops.
    pub(crate) fn step_params(&self) -> StepParams<S> {
        StepParams {
            decay: (-self.dt / self.tau_mem).exp(),
            v_thresh: self.v_thresh,
            v_reset: self.v_reset,
            refractory_steps: steps_for(self.refractory, self.dt),
        }
    }
}

/// Precomputed per-step update constants for one neuron layer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepParams<S> {
    pub decay: S,
    pub v_thresh: S,
    pub v_reset: S,
    pub refractory_steps: u32,
}

/// Converts a duration to a whole number of simulation steps (nearest).
pub(crate) fn steps_for<S: Real>(duration: S, dt: S) -> u32 {
    (duration / dt).as_f64().round().max(0.0) as u32
}
