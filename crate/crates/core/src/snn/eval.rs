//! Neuron labeling and classification scoring.
//!
//! Both passes run the trained network frozen: weights and threshold
//! offsets stay fixed and every image starts from a fresh membrane state,
//! so per-image responses are independent of dataset order and images can
//! be processed in parallel. Reductions are integer sums, keeping results
//! identical no matter how work is scheduled.

use rayon::prelude::*;

use crate::scalar::Real;
use crate::snn::encode::EncodingTable;
use crate::snn::lif::steps_for;
use crate::snn::network::{advance_core, Network};
use crate::snn::train::SpikePlan;
use crate::snn::{LabeledImages, SnnError, CLASSES};

/// Classification outcome over a labeled image set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Fraction of images whose predicted class matches the label;
    /// abstentions count as incorrect.
    pub accuracy: f64,
    /// Images scored.
    pub total: usize,
    /// Correct predictions.
    pub correct: usize,
    /// Images on which no labeled neuron fired.
    pub abstained: usize,
    /// `confusion[true_class][predicted_class]`; column 10 counts
    /// abstentions.
    pub confusion: [[u64; CLASSES + 1]; CLASSES],
}

/// Per-neuron output spike counts for one image under a frozen network.
fn response_counts<S: Real>(net: &Network<S>, table: &EncodingTable<S>, pixels: &[u8]) -> Vec<u32> {
    let outputs = net.outputs();
    let p = net.config().output.step_params();
    let mut plan = SpikePlan::new();
    plan.build(table, pixels);

    let mut v = vec![p.v_reset; outputs];
    let mut refractory = vec![0u32; outputs];
    let mut kick = vec![S::zero(); outputs];
    let mut counts = vec![0u32; outputs];
    for step in 0..table.steps() {
        net.kick_from_spiking(plan.spiking(step).iter().map(|&i| i as usize), &mut kick);
        if let Some(j) = advance_core(&mut v, &mut refractory, net.theta(), &kick, &p) {
            counts[j] += 1;
        }
    }
    counts
}

fn check_dataset<S: Real>(net: &Network<S>, dataset: &LabeledImages) -> Result<usize, SnnError> {
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
    let steps = steps_for(net.presentation_time(), net.config().input.dt) as usize;
    if steps == 0 {
        return Err(SnnError::InvalidConfig("presentation_time shorter than one step".into()));
    }
    Ok(steps)
}

/// Mean output spike count of every neuron per image class, evaluated with
/// the network frozen: `matrix[j][c]` is neuron `j`'s average response to
/// class-`c` images. Classes absent from the dataset read as NaN.
pub fn class_responses<S: Real>(
    net: &Network<S>,
    dataset: &LabeledImages,
) -> Result<Vec<[f64; CLASSES]>, SnnError> {
    let steps = check_dataset(net, dataset)?;
    let table =
        EncodingTable::new(&net.config().input, net.input_gain(), steps, net.config().input_v_init);
    let outputs = net.outputs();

    // spikes[j][c] and images-per-class, accumulated in parallel.
    let (spikes, class_counts) = (0..dataset.len())
        .into_par_iter()
        .fold(
            || (vec![[0u64; CLASSES]; outputs], [0u64; CLASSES]),
            |(mut spikes, mut seen), index| {
                let counts = response_counts(net, &table, dataset.image(index));
                let class = dataset.label(index) as usize;
                seen[class] += 1;
                for (j, &n) in counts.iter().enumerate() {
                    spikes[j][class] += u64::from(n);
                }
                (spikes, seen)
            },
        )
        .reduce(
            || (vec![[0u64; CLASSES]; outputs], [0u64; CLASSES]),
            |(mut sa, mut ca), (sb, cb)| {
                for (a, b) in sa.iter_mut().zip(&sb) {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += *y;
                    }
                }
                for (x, y) in ca.iter_mut().zip(&cb) {
                    *x += *y;
                }
                (sa, ca)
            },
        );

    Ok(spikes
        .iter()
        .map(|per_class| {
            let mut row = [f64::NAN; CLASSES];
            for (class, &n) in per_class.iter().enumerate() {
                if class_counts[class] > 0 {
                    row[class] = n as f64 / class_counts[class] as f64;
                }
            }
            row
        })
        .collect())
}

/// Names each output neuron after the class with the highest mean spike
/// count over the dataset, breaking ties toward the lower class index.
/// Neurons that never fire stay unassigned and are excluded from voting.
///
/// Each labeled neuron also receives a vote weight: the reciprocal of its
/// mean spike count per image across the whole dataset. A broadly tuned
/// neuron that fires on everything carries little evidence per spike, while
/// a selective one carries a lot, so weighting by rarity keeps the busy
/// neurons from swamping the vote during evaluation.
pub fn assign_labels<S: Real>(mut net: Network<S>, dataset: &LabeledImages) -> Result<Network<S>, SnnError> {
    let responses = class_responses(&net, dataset)?;
    let present = (0..CLASSES).filter(|&c| !responses.is_empty() && !responses[0][c].is_nan());
    let class_weight = {
        let n = present.count().max(1) as f64;
        1.0 / n
    };
    let labels: Vec<Option<u8>> = responses
        .iter()
        .map(|row| {
            let mut best = None::<(f64, usize)>;
            for (class, &mean) in row.iter().enumerate() {
                if mean.is_nan() || mean == 0.0 {
                    continue;
                }
                if best.map_or(true, |(m, _)| mean > m) {
                    best = Some((mean, class));
                }
            }
            best.map(|(_, class)| class as u8)
        })
        .collect();
    let weights: Vec<S> = responses
        .iter()
        .map(|row| {
            let total: f64 =
                row.iter().filter(|m| !m.is_nan()).sum::<f64>() * class_weight;
            if total > 0.0 {
                S::of(1.0 / total)
            } else {
                S::one()
            }
        })
        .collect();
    net.set_labels(labels);
    net.set_vote_weights(weights);
    Ok(net)
}

/// Scores the labeled network: each image is predicted as the label of the
/// neuron with the highest weighted spike count (count times the neuron's
/// vote weight, ties toward the lower neuron index, unassigned neurons
/// excluded). Images during which no assigned neuron fires are recorded as
/// abstentions and count as incorrect.
pub fn evaluate<S: Real>(net: &Network<S>, dataset: &LabeledImages) -> Result<EvalReport, SnnError> {
    let steps = check_dataset(net, dataset)?;
    let table =
        EncodingTable::new(&net.config().input, net.input_gain(), steps, net.config().input_v_init);

    let confusion = (0..dataset.len())
        .into_par_iter()
        .fold(
            || [[0u64; CLASSES + 1]; CLASSES],
            |mut confusion, index| {
                let counts = response_counts(net, &table, dataset.image(index));
                let mut vote = None::<(f64, usize)>;
                for (j, &n) in counts.iter().enumerate() {
                    if n == 0 || net.labels()[j].is_none() {
                        continue;
                    }
                    let score = f64::from(n) * net.vote_weights()[j].as_f64();
                    if vote.map_or(true, |(best, _)| score > best) {
                        vote = Some((score, j));
                    }
                }
                let truth = dataset.label(index) as usize;
                match vote {
                    Some((_, j)) => confusion[truth][net.labels()[j].unwrap() as usize] += 1,
                    None => confusion[truth][CLASSES] += 1, // abstain
                }
                confusion
            },
        )
        .reduce(
            || [[0u64; CLASSES + 1]; CLASSES],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(&b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += *y;
                    }
                }
                a
            },
        );

    let total = dataset.len();
    let correct = (0..CLASSES).map(|c| confusion[c][c]).sum::<u64>() as usize;
    let abstained = (0..CLASSES).map(|c| confusion[c][CLASSES]).sum::<u64>() as usize;
    Ok(EvalReport {
        accuracy: correct as f64 / total as f64,
        total,
        correct,
        abstained,
        confusion,
    })
}
