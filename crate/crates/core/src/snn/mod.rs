//! Unsupervised spiking network: 784 input channels densely connected to N
//! leaky integrate-and-fire output neurons with plastic synapses.
//!
//! The input layer turns pixel intensities into deterministic spike trains
//! ([`encode_image`]). Output neurons compete through hard winner-take-all
//! inhibition with adaptive thresholds ([`step_network`]), and each output
//! spike programs the winner's incoming synapses from the pre-synaptic
//! membrane potentials ([`crate::vdsp::membrane_update`]). [`train`] runs the
//! presentation/rest schedule over a labeled image set, [`assign_labels`]
//! names neurons after the class they respond to most, and [`evaluate`]
//! scores the labeled network. Training is sequential (online learning);
//! labeling and evaluation parallelize over images.

mod checkpoint;
mod encode;
mod eval;
mod lif;
mod network;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_SCHEMA_VERSION};
pub use encode::{encode_image, SpikeTrains};
pub use eval::{assign_labels, class_responses, evaluate, EvalReport};
pub use lif::LifConfig;
pub use network::{step_network, InputActivity, Network, NetworkConfig};
pub use train::{train, train_with_progress, ProgressRow, TrainConfig};

use thiserror::Error;

use crate::io::{IdxImages, IdxLabels};

/// Pixel count of the images the network front end is shaped for.
pub const MNIST_PIXELS: usize = 784;

/// Number of digit classes.
pub const CLASSES: usize = 10;

/// Errors from network construction, simulation, training and evaluation.
#[derive(Debug, Error)]
pub enum SnnError {
    /// An image or pixel buffer has the wrong length.
    #[error("bad shape: expected {expected} values, found {found}")]
    BadShape { expected: usize, found: usize },
    /// Two runtime objects disagree about their dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Training, labeling or evaluation was asked to run over zero images.
    #[error("dataset is empty")]
    EmptyDataset,
    /// A configuration value violates its documented invariant.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    /// Checkpoint file I/O failed.
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    /// Checkpoint (de)serialization failed.
    #[error("checkpoint encoding: {0}")]
    Json(#[from] serde_json::Error),
    /// A checkpoint file is internally inconsistent.
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
}

/// An in-memory set of equally sized images with one class label each.
#[derive(Debug, Clone)]
pub struct LabeledImages {
    image_len: usize,
    pixels: Vec<u8>,
    labels: Vec<u8>,
}

impl LabeledImages {
    /// Builds a dataset from a flat row-major pixel buffer and one label per
    /// image. Labels must be digits 0-9.
    pub fn from_parts(pixels: Vec<u8>, labels: Vec<u8>, image_len: usize) -> Result<Self, SnnError> {
        if image_len == 0 {
            return Err(SnnError::InvalidConfig("image length must be positive".into()));
        }
        if pixels.len() != labels.len() * image_len {
            return Err(SnnError::BadShape {
                expected: labels.len() * image_len,
                found: pixels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= CLASSES) {
            return Err(SnnError::InvalidConfig(format!("label {bad} out of range 0-9")));
        }
        Ok(Self { image_len, pixels, labels })
    }

    /// Pairs decoded IDX images with their label file.
    pub fn from_idx(images: &IdxImages, labels: &IdxLabels) -> Result<Self, SnnError> {
        if images.count != labels.count {
            return Err(SnnError::DimensionMismatch(format!(
                "{} images but {} labels",
                images.count, labels.count
            )));
        }
        Self::from_parts(
            images.pixels.clone(),
            labels.labels.clone(),
            images.rows * images.cols,
        )
    }

    /// Number of images.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when the set holds no images.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Pixels per image.
    pub fn image_len(&self) -> usize {
        self.image_len
    }

    /// Pixel row of one image.
    pub fn image(&self, index: usize) -> &[u8] {
        &self.pixels[index * self.image_len..(index + 1) * self.image_len]
    }

    /// Class label of one image.
    pub fn label(&self, index: usize) -> u8 {
        self.labels[index]
    }

    /// Copies out the images `start..start + count`, clamped to the end.
    pub fn subset(&self, start: usize, count: usize) -> Self {
        let lo = start.min(self.len());
        let hi = (start + count).min(self.len());
        Self {
            image_len: self.image_len,
            pixels: self.pixels[lo * self.image_len..hi * self.image_len].to_vec(),
            labels: self.labels[lo..hi].to_vec(),
        }
    }
}
