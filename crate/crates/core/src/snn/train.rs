//! Online unsupervised training over an image set.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cards::reference_vdsp;
use crate::scalar::Real;
use crate::snn::encode::EncodingTable;
use crate::snn::lif::steps_for;
use crate::snn::network::{Network, OutputDynamics};
use crate::snn::{LabeledImages, SnnError};
use crate::vdsp::{ScalingFactors, VdspParams};

/// Learning-schedule parameters.
///
/// `seed` orders the image presentations (reshuffled every epoch); it is
/// independent of the seed that initialized the network weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct TrainConfig<S = f64> {
    /// Plasticity-rule constants.
    pub vdsp: VdspParams<S>,
    /// Membrane-to-programming-voltage gains (selected by network size).
    pub sf: ScalingFactors<S>,
    /// Seconds each image drives the network.
    pub presentation_time: S,
    /// Quiet seconds between images while the state decays.
    pub rest_time: S,
    /// Input drive per pixel-intensity unit.
    pub input_gain: S,
    /// Passes over the dataset.
    pub epochs: u32,
    /// Presentation-order seed.
    pub seed: u64,
}

impl<S: Real> TrainConfig<S> {
    /// Published plasticity constants and the gain pair matched to a network
    /// of `outputs` neurons, with the default schedule.
    pub fn for_outputs(outputs: usize) -> Self {
        Self {
            vdsp: reference_vdsp(),
            sf: ScalingFactors::for_output_count(outputs),
            presentation_time: S::of(super::network::DEFAULT_PRESENTATION_TIME),
            rest_time: S::of(0.1),
            input_gain: S::of(super::network::DEFAULT_INPUT_GAIN),
            epochs: 1,
            seed: 7,
        }
    }

    /// Schedule matched to [`NetworkConfig::template_learning`]: a stronger
    /// input drive so driven channels cycle through spike and reset within a
    /// presentation, and a depression gain high enough that channels still
    /// near their onset potential always depress. The potentiation gain is
    /// left neutral; contrast comes from the onset split.
    pub fn template_learning(outputs: usize) -> Self {
        let mut cfg = Self::for_outputs(outputs);
        cfg.input_gain = S::of(0.2);
        cfg.sf = ScalingFactors { sf_p: S::one(), sf_d: S::of(1.75) };
        cfg
    }

    /// Checks the plasticity constants, gains, durations and epoch count.
    pub fn validate(&self) -> Result<(), SnnError> {
        self.vdsp
            .validate()
            .map_err(|e| SnnError::InvalidConfig(e.to_string()))?;
        self.sf
            .validate()
            .map_err(|e| SnnError::InvalidConfig(e.to_string()))?;
        for (name, value) in [
            ("presentation_time", self.presentation_time),
            ("rest_time", self.rest_time),
            ("input_gain", self.input_gain),
        ] {
            if !value.is_finite() || value <= S::zero() {
                return Err(SnnError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.epochs == 0 {
            return Err(SnnError::InvalidConfig("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Training-progress snapshot, reported every 1000 presentations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressRow {
    /// Presentations completed so far (across epochs).
    pub images_seen: usize,
    /// Mean synaptic weight.
    pub mean_weight: f64,
    /// Smallest weight in the matrix at report time.
    pub min_weight: f64,
    /// Largest weight in the matrix at report time.
    pub max_weight: f64,
    /// Output spikes during the last reporting window.
    pub post_spikes: u64,
}

/// Per-step spiking inputs of one image, bucketed step by step.
///
/// Compressed-row layout over the presentation steps: `spiking(s)` yields
/// the channels that fire at step `s`. Rebuilt per image from the encoding
/// table at the cost of one pass over each channel's spike list.
pub(crate) struct SpikePlan {
    offsets: Vec<u32>,
    channels: Vec<u32>,
}

impl SpikePlan {
    pub(crate) fn new() -> Self {
        Self { offsets: Vec::new(), channels: Vec::new() }
    }

    pub(crate) fn build<S: Real>(&mut self, table: &EncodingTable<S>, pixels: &[u8]) {
        let steps = table.steps();
        self.offsets.clear();
        self.offsets.resize(steps + 1, 0);
        for &px in pixels {
            for &s in table.spike_steps(px) {
                self.offsets[s as usize + 1] += 1;
            }
        }
        for s in 0..steps {
            self.offsets[s + 1] += self.offsets[s];
        }
        self.channels.resize(self.offsets[steps] as usize, 0);
        let mut cursor: Vec<u32> = self.offsets[..steps].to_vec();
        for (i, &px) in pixels.iter().enumerate() {
            for &s in table.spike_steps(px) {
                let at = &mut cursor[s as usize];
                self.channels[*at as usize] = i as u32;
                *at += 1;
            }
        }
    }

    pub(crate) fn spiking(&self, step: usize) -> &[u32] {
        &self.channels[self.offsets[step] as usize..self.offsets[step + 1] as usize]
    }
}

/// Drives one image through the network for `steps` steps, learning when
/// `plasticity` is set. Returns the number of output spikes.
pub(crate) fn present_image<S: Real>(
    net: &mut Network<S>,
    table: &EncodingTable<S>,
    pixels: &[u8],
    dynamics: &OutputDynamics<S>,
    plan: &mut SpikePlan,
    kick: &mut [S],
    plasticity: Option<(&VdspParams<S>, &ScalingFactors<S>)>,
) -> u64 {
    plan.build(table, pixels);
    let inv_thresh = S::one() / net.config().input.v_thresh;
    let mut post_spikes = 0;
    for step in 0..table.steps() {
        net.kick_from_spiking(plan.spiking(step).iter().map(|&i| i as usize), kick);
        let winner = net.advance_training(kick, dynamics);
        if let Some(j) = winner {
            post_spikes += 1;
            if let Some((vdsp, sf)) = plasticity {
                net.apply_vdsp(j, |i| table.membrane(pixels[i], step) * inv_thresh, vdsp, sf);
            }
        }
    }
    post_spikes
}

/// Lets the network state decay quietly between images.
fn rest<S: Real>(net: &mut Network<S>, steps: u32, dynamics: &OutputDynamics<S>, kick: &mut [S]) {
    kick.fill(S::zero());
    for _ in 0..steps {
        net.advance_training(kick, dynamics);
    }
}

/// Unsupervised training: presents every image for `presentation_time`
/// followed by `rest_time` of quiet decay, programming the winner's
/// synapses at each output spike. Labels are never consulted. Returns the
/// trained network.
pub fn train<S: Real>(
    net: Network<S>,
    dataset: &LabeledImages,
    cfg: &TrainConfig<S>,
) -> Result<Network<S>, SnnError> {
    train_with_progress(net, dataset, cfg, |_| {})
}

/// [`train`] with a callback invoked every 1000 presentations.
pub fn train_with_progress<S: Real>(
    mut net: Network<S>,
    dataset: &LabeledImages,
    cfg: &TrainConfig<S>,
    mut progress: impl FnMut(ProgressRow),
) -> Result<Network<S>, SnnError> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(SnnError::EmptyDataset);
    }
    if dataset.image_len() != net.inputs() {
        return Err(SnnError::DimensionMismatch(format!(
            "{}-pixel images for {} inputs",
            dataset.image_len(),
            net.inputs()
        )));
    }

    net.set_encoding(cfg.input_gain, cfg.presentation_time)?;
    let dt = net.config().input.dt;
    let presentation_steps = steps_for(cfg.presentation_time, dt) as usize;
    if presentation_steps == 0 {
        return Err(SnnError::InvalidConfig("presentation_time shorter than one step".into()));
    }
    let rest_steps = steps_for(cfg.rest_time, dt);
    let table = EncodingTable::new(
        &net.config().input,
        cfg.input_gain,
        presentation_steps,
        net.config().input_v_init,
    );
    let dynamics = net.dynamics();

    // Decorrelated from the weight-init stream, which hashes the raw seed.
    let mut order_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut order: Vec<usize> = (0..dataset.len()).collect();

    let mut plan = SpikePlan::new();
    let mut kick = vec![S::zero(); net.outputs()];
    let mut images_seen = 0usize;
    let mut window_spikes = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut order_rng);
        for &index in &order {
            window_spikes += present_image(
                &mut net,
                &table,
                dataset.image(index),
                &dynamics,
                &mut plan,
                &mut kick,
                Some((&cfg.vdsp, &cfg.sf)),
            );
            rest(&mut net, rest_steps, &dynamics, &mut kick);
            images_seen += 1;
            if images_seen % 1000 == 0 {
                let (lo, hi) = net.weights().iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), w| (lo.min(w.as_f64()), hi.max(w.as_f64())),
                );
                progress(ProgressRow {
                    images_seen,
                    mean_weight: net.mean_weight().as_f64(),
                    min_weight: lo,
                    max_weight: hi,
                    post_spikes: window_spikes,
                });
                window_spikes = 0;
            }
        }
    }
    Ok(net)
}
