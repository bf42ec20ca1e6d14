//! Versioned JSON network checkpoints.
//!
//! A checkpoint stores the learned state (weights, threshold offsets,
//! labels) together with the full configuration and its SHA-256 hash, so a
//! reloaded network always evaluates images exactly the way it was trained.
//! Simulation transients (membranes, refractory counters) are not persisted.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scalar::Real;
use crate::snn::network::{Network, NetworkConfig};
use crate::snn::SnnError;

/// Current checkpoint layout version.
pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
struct CheckpointFile<S> {
    schema_version: u32,
    /// SHA-256 over the canonical serialization of `config`.
    config_hash: String,
    config: CheckpointConfig<S>,
    weights: Vec<S>,
    theta: Vec<S>,
    labels: Vec<Option<u8>>,
    vote_weights: Vec<S>,
}

/// Everything needed to rebuild and drive the network, hashed as a unit.
#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
struct CheckpointConfig<S> {
    network: NetworkConfig<S>,
    input_gain: S,
    presentation_time: S,
    inputs: usize,
    outputs: usize,
}

fn config_hash<S: Real>(config: &CheckpointConfig<S>) -> Result<String, SnnError> {
    let canonical = serde_json::to_string(config)?;
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

/// Writes the network to `path` as versioned, hashed JSON.
pub fn save_checkpoint<S: Real>(net: &Network<S>, path: impl AsRef<Path>) -> Result<(), SnnError> {
    let config = CheckpointConfig {
        network: *net.config(),
        input_gain: net.input_gain(),
        presentation_time: net.presentation_time(),
        inputs: net.inputs(),
        outputs: net.outputs(),
    };
    let file = CheckpointFile {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        config_hash: config_hash(&config)?,
        config,
        weights: net.weights().to_vec(),
        theta: net.theta().to_vec(),
        labels: net.labels().to_vec(),
        vote_weights: net.vote_weights().to_vec(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Reads a checkpoint, verifying the schema version and the config hash.
pub fn load_checkpoint<S: Real>(path: impl AsRef<Path>) -> Result<Network<S>, SnnError> {
    let file: CheckpointFile<S> = serde_json::from_str(&fs::read_to_string(path)?)?;
    if file.schema_version != CHECKPOINT_SCHEMA_VERSION {
        return Err(SnnError::Checkpoint(format!(
            "schema version {} (this build reads {})",
            file.schema_version, CHECKPOINT_SCHEMA_VERSION
        )));
    }
    let expected = config_hash(&file.config)?;
    if file.config_hash != expected {
        return Err(SnnError::Checkpoint("config hash mismatch".into()));
    }
    Network::from_checkpoint_parts(
        file.config.network,
        file.config.input_gain,
        file.config.presentation_time,
        file.config.inputs,
        file.config.outputs,
        file.weights,
        file.theta,
        file.labels,
        file.vote_weights,
    )
}
