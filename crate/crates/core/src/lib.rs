//! Simulation and analysis library for ferroelectric hafnia resistive
//! synapses: a hysteretic device model with deterministic
//! amplitude-controlled updates, conduction/timing/energy estimators,
//! parameter-extraction fitters, a voltage-driven plasticity rule, and an
//! unsupervised spiking-network trainer for MNIST.
//!
//! Numeric code is generic over the scalar type through [`scalar::Real`]
//! (implemented for `f32` and `f64`); all shipped calibrations and default
//! type parameters use `f64`.

pub mod cards;
pub mod constants;
pub mod device_model;
pub mod device_physics;
pub mod fitting;
pub mod io;
pub mod scalar;
pub mod snn;
pub mod vdsp;

pub use cards::{load_card, reference_card, save_card, CardError, ModelCard};
pub use device_model::{
    apply_pulse, eval_envelope, resistance_to_weight, weight_to_resistance, DeviceError,
    DeviceRule, DeviceState, EnvelopeParams, PulseRecord, PulseSpec,
};
pub use device_physics::{
    current_density, merz_switching_time, programming_energy, tau_area, tau_rc, ConductionModel,
    MerzParams, PhysicsError, RcParams, SchottkyParams, TflParams,
};
pub use scalar::Real;
pub use snn::{
    assign_labels, encode_image, evaluate, load_checkpoint, save_checkpoint, step_network, train,
    EvalReport, LabeledImages, LifConfig, Network, NetworkConfig, SnnError, TrainConfig,
};
pub use vdsp::{delta_w, map_voltage, membrane_update, Polarity, ScalingFactors, VdspParams};
