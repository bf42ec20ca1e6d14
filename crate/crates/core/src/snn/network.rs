//! Output-layer state and the single-step network update.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::snn::lif::{LifConfig, StepParams};
use crate::snn::train::TrainConfig;
use crate::snn::{SnnError, CLASSES};
use crate::vdsp::{membrane_update, ScalingFactors, VdspParams};

/// Uniform weight-initialization bounds.
const WEIGHT_INIT_LO: f64 = 0.3;
const WEIGHT_INIT_HI: f64 = 0.7;

/// Default drive per pixel-intensity unit; 0 maps to silence, 255 to a
/// roughly 60 Hz input under the default input neuron.
pub(crate) const DEFAULT_INPUT_GAIN: f64 = 0.035;

/// Default per-image presentation window in seconds.
pub(crate) const DEFAULT_PRESENTATION_TIME: f64 = 0.35;

/// Neuron and coupling parameters of the output layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct NetworkConfig<S = f64> {
    /// Input-layer neuron parameters (shared by every pixel channel).
    pub input: LifConfig<S>,
    /// Output-layer neuron parameters.
    pub output: LifConfig<S>,
    /// Membrane increment per unit weight per pre-synaptic spike.
    pub syn_gain: S,
    /// Threshold offset added to a neuron each time it wins.
    pub theta_plus: S,
    /// Decay time constant of the adaptive threshold offsets, in seconds.
    pub tau_theta: S,
    /// Input membrane potential at presentation onset. Undriven channels
    /// decay from here toward zero without firing, so a high onset value
    /// keeps them in the plasticity rule's depression range for most of a
    /// presentation while driven channels fall into their spiking cycle.
    pub input_v_init: S,
}

impl<S: Real> Default for NetworkConfig<S> {
    fn default() -> Self {
        Self {
            input: LifConfig::input_default(),
            output: LifConfig::output_default(),
            syn_gain: S::of(0.02),
            theta_plus: S::of(0.05),
            tau_theta: S::of(10.0),
            input_v_init: S::zero(),
        }
    }
}

impl<S: Real> NetworkConfig<S> {
    /// Operating point tuned for digit-template learning.
    ///
    /// Raises the input onset potential close to threshold and slows the
    /// input membrane so undriven (background) channels stay in the
    /// plasticity rule's depression range for most of a presentation, while
    /// driven channels spike, reset, and are read low, which potentiates
    /// them. Each neuron's receptive field then converges toward the digits
    /// it wins instead of toward their complement. The threshold offsets
    /// decay slowly enough (`tau_theta`) to spread wins across neurons over
    /// hundreds of presentations.
    pub fn template_learning() -> Self {
        let mut cfg = Self::default();
        cfg.input.tau_mem = S::of(0.7);
        cfg.input_v_init = S::of(0.99);
        cfg.tau_theta = S::of(20.0);
        cfg
    }

    /// Validates both neuron layers and the coupling constants. The two
    /// layers must share one simulation step.
    pub fn validate(&self) -> Result<(), SnnError> {
        self.input.validate()?;
        self.output.validate()?;
        if self.input.dt != self.output.dt {
            return Err(SnnError::InvalidConfig(
                "input and output layers must use the same dt".into(),
            ));
        }
        if !self.syn_gain.is_finite() || self.syn_gain <= S::zero() {
            return Err(SnnError::InvalidConfig("syn_gain must be positive".into()));
        }
        if !self.theta_plus.is_finite() || self.theta_plus < S::zero() {
            return Err(SnnError::InvalidConfig("theta_plus must be non-negative".into()));
        }
        if !self.tau_theta.is_finite() || self.tau_theta <= S::zero() {
            return Err(SnnError::InvalidConfig("tau_theta must be positive".into()));
        }
        if !self.input_v_init.is_finite() || self.input_v_init >= self.input.v_thresh {
            return Err(SnnError::InvalidConfig(
                "input_v_init must be finite and below the input threshold".into(),
            ));
        }
        Ok(())
    }
}

/// Input-layer activity for one simulation step.
///
/// `spikes` marks the channels that fired this step; `membranes` holds every
/// channel's potential at the same instant, recorded before any reset
/// handling (a firing channel reports its super-threshold value), in the
/// units of the input [`LifConfig`].
#[derive(Debug, Clone, Copy)]
pub struct InputActivity<'a, S> {
    pub spikes: &'a [bool],
    pub membranes: &'a [S],
}

/// Single-layer spiking network with plastic input-to-output synapses.
///
/// Holds the weight matrix (input-major, `weights[i * outputs + j]`), the
/// output neurons' membrane state, their adaptive threshold offsets, the
/// per-neuron class labels, and the encoding operating point (input gain and
/// presentation window) that labeling and evaluation reuse so they always
/// see images the way training did.
#[derive(Debug, Clone)]
pub struct Network<S = f64> {
    cfg: NetworkConfig<S>,
    input_gain: S,
    presentation_time: S,
    inputs: usize,
    outputs: usize,
    weights: Vec<S>,
    labels: Vec<Option<u8>>,
    vote_weights: Vec<S>,
    theta: Vec<S>,
    v: Vec<S>,
    refractory_left: Vec<u32>,
}

impl<S: Real> Network<S> {
    /// Creates a network with seeded uniform(0.3, 0.7) weights, zero
    /// threshold offsets and unassigned labels.
    pub fn new(inputs: usize, outputs: usize, cfg: NetworkConfig<S>, seed: u64) -> Result<Self, SnnError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..inputs.saturating_mul(outputs))
            .map(|_| S::of(rng.random_range(WEIGHT_INIT_LO..WEIGHT_INIT_HI)))
            .collect();
        Self::with_weights(inputs, outputs, cfg, weights)
    }

    /// Creates a network around an explicit weight matrix (input-major,
    /// `inputs * outputs` entries in `[0, 1]`).
    pub fn with_weights(
        inputs: usize,
        outputs: usize,
        cfg: NetworkConfig<S>,
        weights: Vec<S>,
    ) -> Result<Self, SnnError> {
        cfg.validate()?;
        if inputs == 0 || outputs == 0 {
            return Err(SnnError::InvalidConfig("network needs at least one input and one output".into()));
        }
        if weights.len() != inputs * outputs {
            return Err(SnnError::BadShape { expected: inputs * outputs, found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < S::zero() || *w > S::one()) {
            return Err(SnnError::InvalidConfig("weights must lie in [0, 1]".into()));
        }
        let v_reset = cfg.output.v_reset;
        Ok(Self {
            cfg,
            input_gain: S::of(DEFAULT_INPUT_GAIN),
            presentation_time: S::of(DEFAULT_PRESENTATION_TIME),
            inputs,
            outputs,
            weights,
            labels: vec![None; outputs],
            vote_weights: vec![S::one(); outputs],
            theta: vec![S::zero(); outputs],
            v: vec![v_reset; outputs],
            refractory_left: vec![0; outputs],
        })
    }

    /// Rehydrates a network from checkpoint fields; simulation state starts
    /// fresh.
    pub(crate) fn from_checkpoint_parts(
        cfg: NetworkConfig<S>,
        input_gain: S,
        presentation_time: S,
        inputs: usize,
        outputs: usize,
        weights: Vec<S>,
        theta: Vec<S>,
        labels: Vec<Option<u8>>,
        vote_weights: Vec<S>,
    ) -> Result<Self, SnnError> {
        let mut net = Self::with_weights(inputs, outputs, cfg, weights)?;
        net.set_encoding(input_gain, presentation_time)?;
        if theta.len() != outputs || labels.len() != outputs || vote_weights.len() != outputs {
            return Err(SnnError::BadShape {
                expected: outputs,
                found: theta.len().min(labels.len()).min(vote_weights.len()),
            });
        }
        if theta.iter().any(|t| !t.is_finite() || *t < S::zero()) {
            return Err(SnnError::InvalidConfig("threshold offsets must be finite and non-negative".into()));
        }
        if labels.iter().flatten().any(|&l| l as usize >= CLASSES) {
            return Err(SnnError::InvalidConfig("labels must be digits 0-9".into()));
        }
        if vote_weights.iter().any(|w| !w.is_finite() || *w <= S::zero()) {
            return Err(SnnError::InvalidConfig("vote weights must be finite and positive".into()));
        }
        net.theta = theta;
        net.labels = labels;
        net.vote_weights = vote_weights;
        Ok(net)
    }

    /// Number of input channels.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Number of output neurons.
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// Full weight matrix, input-major.
    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// One synapse weight.
    pub fn weight(&self, input: usize, output: usize) -> S {
        self.weights[input * self.outputs + output]
    }

    /// Incoming weight vector of one output neuron.
    pub fn receptive_field(&self, output: usize) -> Vec<S> {
        (0..self.inputs).map(|i| self.weight(i, output)).collect()
    }

    /// Mean of all weights.
    pub fn mean_weight(&self) -> S {
        self.weights.iter().copied().sum::<S>() / S::of(self.weights.len() as f64)
    }

    /// Per-neuron class labels; `None` marks an unassigned neuron.
    pub fn labels(&self) -> &[Option<u8>] {
        &self.labels
    }

    pub(crate) fn set_labels(&mut self, labels: Vec<Option<u8>>) {
        debug_assert_eq!(labels.len(), self.outputs);
        self.labels = labels;
    }

    /// Per-neuron vote weights applied to spike counts during evaluation.
    /// All ones until labeling assigns evidence weights.
    pub fn vote_weights(&self) -> &[S] {
        &self.vote_weights
    }

    pub(crate) fn set_vote_weights(&mut self, weights: Vec<S>) {
        debug_assert_eq!(weights.len(), self.outputs);
        self.vote_weights = weights;
    }

    /// Adaptive threshold offsets.
    pub fn theta(&self) -> &[S] {
        &self.theta
    }

    /// Layer and coupling parameters.
    pub fn config(&self) -> &NetworkConfig<S> {
        &self.cfg
    }

    /// Drive per pixel-intensity unit used when encoding images.
    pub fn input_gain(&self) -> S {
        self.input_gain
    }

    /// Per-image presentation window in seconds.
    pub fn presentation_time(&self) -> S {
        self.presentation_time
    }

    /// Sets the encoding operating point that labeling and evaluation use.
    /// [`train`](crate::snn::train) records its own values here.
    pub fn set_encoding(&mut self, input_gain: S, presentation_time: S) -> Result<(), SnnError> {
        if !input_gain.is_finite() || input_gain <= S::zero() {
            return Err(SnnError::InvalidConfig("input_gain must be positive".into()));
        }
        if !presentation_time.is_finite() || presentation_time <= S::zero() {
            return Err(SnnError::InvalidConfig("presentation_time must be positive".into()));
        }
        self.input_gain = input_gain;
        self.presentation_time = presentation_time;
        Ok(())
    }

    /// Clears membranes and refractory counters (threshold offsets persist).
    pub fn reset_dynamics(&mut self) {
        self.v.fill(self.cfg.output.v_reset);
        self.refractory_left.fill(0);
    }

    pub(crate) fn dynamics(&self) -> OutputDynamics<S> {
        OutputDynamics {
            out: self.cfg.output.step_params(),
            theta_decay: (-self.cfg.output.dt / self.cfg.tau_theta).exp(),
            theta_plus: self.cfg.theta_plus,
        }
    }

    /// Advances the output layer one step with adaptive thresholds: offsets
    /// decay every step and the winner's offset grows by `theta_plus`.
    pub(crate) fn advance_training(&mut self, kick: &[S], dynamics: &OutputDynamics<S>) -> Option<usize> {
        for t in &mut self.theta {
            *t = *t * dynamics.theta_decay;
        }
        let winner = advance_core(&mut self.v, &mut self.refractory_left, &self.theta, kick, &dynamics.out);
        if let Some(j) = winner {
            self.theta[j] = self.theta[j] + dynamics.theta_plus;
        }
        winner
    }

    /// Programs every synapse into `winner` from the pre-synaptic membrane
    /// potentials (threshold-normalized), clipping weights to `[0, 1]`.
    pub(crate) fn apply_vdsp(
        &mut self,
        winner: usize,
        membrane_norm: impl Fn(usize) -> S,
        vdsp: &VdspParams<S>,
        sf: &ScalingFactors<S>,
    ) {
        for i in 0..self.inputs {
            let idx = i * self.outputs + winner;
            let w = self.weights[idx];
            let dw = membrane_update(membrane_norm(i), w, sf, vdsp)
                .expect("clipped weights stay inside [0, 1]");
            self.weights[idx] = (w + dw).max(S::zero()).min(S::one());
        }
    }

    /// Accumulates `syn_gain`-scaled drive from a set of spiking inputs.
    pub(crate) fn kick_from_spiking<I: IntoIterator<Item = usize>>(&self, spiking: I, kick: &mut [S]) {
        kick.fill(S::zero());
        for i in spiking {
            let row = &self.weights[i * self.outputs..(i + 1) * self.outputs];
            for (k, w) in kick.iter_mut().zip(row) {
                *k = *k + *w;
            }
        }
        for k in kick.iter_mut() {
            *k = *k * self.cfg.syn_gain;
        }
    }
}

/// Per-step output-layer constants.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OutputDynamics<S> {
    pub out: StepParams<S>,
    pub theta_decay: S,
    pub theta_plus: S,
}

/// One leaky-integrate step plus hard winner-take-all over a neuron layer.
///
/// Non-refractory neurons decay and receive their kick; among those at or
/// above `v_thresh + theta`, the one that crossed by the largest margin is
/// deemed first past the threshold (ties fall to the lowest index). A win
/// resets every membrane, so at most one output spike occurs per step.
pub(crate) fn advance_core<S: Real>(
    v: &mut [S],
    refractory_left: &mut [u32],
    theta: &[S],
    kick: &[S],
    p: &StepParams<S>,
) -> Option<usize> {
    let mut winner: Option<(usize, S)> = None;
    for j in 0..v.len() {
        if refractory_left[j] > 0 {
            refractory_left[j] -= 1;
            v[j] = p.v_reset;
            continue;
        }
        v[j] = v[j] * p.decay + kick[j];
        let margin = v[j] - (p.v_thresh + theta[j]);
        if margin >= S::zero() && winner.map_or(true, |(_, best)| margin > best) {
            winner = Some((j, margin));
        }
    }
    winner.map(|(j, _)| {
        for x in v.iter_mut() {
            *x = p.v_reset;
        }
        refractory_left[j] = p.refractory_steps;
        j
    })
}

/// Advances the network one simulation step.
///
/// Accumulates the weighted drive of the spiking inputs, updates every
/// output neuron, and applies winner-take-all inhibition and adaptive
/// thresholds. When `train` is given and an output spiked, each of the
/// winner's incoming synapses is programmed from its pre-synaptic membrane
/// potential; without `train` the weights never change. Returns the index
/// of the spiking output, if any.
pub fn step_network<S: Real>(
    net: &mut Network<S>,
    input: InputActivity<'_, S>,
    train: Option<&TrainConfig<S>>,
) -> Result<Option<usize>, SnnError> {
    if input.spikes.len() != net.inputs {
        return Err(SnnError::DimensionMismatch(format!(
            "{} spike flags for {} inputs",
            input.spikes.len(),
            net.inputs
        )));
    }
    if input.membranes.len() != net.inputs {
        return Err(SnnError::DimensionMismatch(format!(
            "{} membrane values for {} inputs",
            input.membranes.len(),
            net.inputs
        )));
    }
    if let Some(tc) = train {
        tc.validate()?;
    }

    let dynamics = net.dynamics();
    let mut kick = vec![S::zero(); net.outputs];
    let spiking = input.spikes.iter().enumerate().filter_map(|(i, &s)| s.then_some(i));
    net.kick_from_spiking(spiking, &mut kick);

    let winner = net.advance_training(&kick, &dynamics);
    if let (Some(j), Some(tc)) = (winner, train) {
        let inv_thresh = S::one() / net.cfg.input.v_thresh;
        net.apply_vdsp(j, |i| input.membranes[i] * inv_thresh, &tc.vdsp, &tc.sf);
    }
    Ok(winner)
}
