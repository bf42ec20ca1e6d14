//! Intensity-to-spike-train encoding through a layer of LIF neurons.
//!
//! Every input channel is a LIF neuron driven by the constant current
//! `gain * intensity`. Because the drive only takes 256 values, the full
//! membrane trajectory of each intensity is simulated once per
//! configuration and shared by all pixels ([`EncodingTable`]); image
//! encoding and the plasticity rule's membrane reads then reduce to table
//! lookups.

use crate::scalar::Real;
use crate::snn::lif::{steps_for, LifConfig};
use crate::snn::{SnnError, MNIST_PIXELS};

/// Deterministic spike trains for one image, one train per input channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrains {
    /// Number of simulation steps covered.
    pub steps: usize,
    /// Ascending spike step indices per channel.
    pub trains: Vec<Vec<u32>>,
}

/// Membrane trajectory and spike times for every pixel intensity.
#[derive(Debug, Clone)]
pub(crate) struct EncodingTable<S> {
    steps: usize,
    rows: Vec<IntensityRow<S>>,
}

#[derive(Debug, Clone)]
struct IntensityRow<S> {
    /// Membrane potential at each step, recorded before reset handling, so
    /// a step in which the neuron fires holds its super-threshold value.
    membrane: Vec<S>,
    /// Steps at which the neuron fires.
    spikes: Vec<u32>,
}

impl<S: Real> EncodingTable<S> {
    /// Simulates all 256 intensities for `steps` steps, each channel
    /// starting the presentation at membrane potential `v_init`.
    pub(crate) fn new(cfg: &LifConfig<S>, gain: S, steps: usize, v_init: S) -> Self {
        let p = cfg.step_params();
        let rows = (0..=255u32)
            .map(|intensity| {
                let drive = gain * S::of(f64::from(intensity));
                let mut membrane = Vec::with_capacity(steps);
                let mut spikes = Vec::new();
                let mut v = v_init;
                let mut silent = 0u32;
                for step in 0..steps {
                    if silent > 0 {
                        silent -= 1;
                        membrane.push(v);
                        continue;
                    }
                    v = v * p.decay + drive * (S::one() - p.decay);
                    membrane.push(v);
                    if v >= p.v_thresh {
                        spikes.push(step as u32);
                        v = p.v_reset;
                        silent = p.refractory_steps;
                    }
                }
                IntensityRow { membrane, spikes }
            })
            .collect();
        Self { steps, rows }
    }

    pub(crate) fn steps(&self) -> usize {
        self.steps
    }

    /// Membrane potential of a channel at `intensity` during `step`.
    pub(crate) fn membrane(&self, intensity: u8, step: usize) -> S {
        self.rows[intensity as usize].membrane[step]
    }

    pub(crate) fn spike_steps(&self, intensity: u8) -> &[u32] {
        &self.rows[intensity as usize].spikes
    }
}

/// Encodes one 784-pixel image into deterministic spike trains.
///
/// Each channel is an independent LIF neuron under `cfg`, starting from its
/// reset potential and driven by the constant current `gain * intensity`
/// for `duration` seconds. Zero intensity yields an empty train; the firing
/// rate grows with the drive until the refractory period saturates it.
pub fn encode_image<S: Real>(
    pixels: &[u8],
    cfg: &LifConfig<S>,
    gain: S,
    duration: S,
) -> Result<SpikeTrains, SnnError> {
    if pixels.len() != MNIST_PIXELS {
        return Err(SnnError::BadShape { expected: MNIST_PIXELS, found: pixels.len() });
    }
    cfg.validate()?;
    if !gain.is_finite() || gain < S::zero() {
        return Err(SnnError::InvalidConfig("gain must be finite and non-negative".into()));
    }
    let steps = steps_for(duration, cfg.dt) as usize;
    if !duration.is_finite() || steps == 0 {
        return Err(SnnError::InvalidConfig("duration must cover at least one step".into()));
    }
    let table = EncodingTable::new(cfg, gain, steps, cfg.v_reset);
    Ok(SpikeTrains {
        steps,
        trains: pixels.iter().map(|&px| table.spike_steps(px).to_vec()).collect(),
    })
}
