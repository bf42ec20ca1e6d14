//! Hyperparameter probe for the spiking network.
//!
//! Trains on a slice of MNIST, labels neurons on the same slice, evaluates
//! on a test slice, and prints one summary line. All knobs are `key=value`
//! arguments so sweeps need no recompile:
//!
//! ```text
//! cargo run --release -p fesyn-core --example tune -- n=10 train=10000 eval=2000 syn=0.02
//! ```

use fesyn_core::io::{load_idx_images, load_idx_labels};
use fesyn_core::snn::{assign_labels, class_responses, evaluate, train_with_progress, LabeledImages};
use fesyn_core::{Network, NetworkConfig, TrainConfig};

fn main() {
    let mut n = 10usize;
    let mut train_count = 10_000usize;
    let mut eval_count = 2_000usize;
    let mut seed = 1u64;
    let mut quiet = false;
    let mut sfp_override = None;
    let mut sfd_override = None;
    let mut eval_pres = None;

    let mut net_cfg = NetworkConfig::<f64>::default();
    let mut tc = TrainConfig::<f64>::for_outputs(n);

    let args: Vec<String> = std::env::args().skip(1).collect();
    for arg in &args {
        let (key, val) = arg.split_once('=').unwrap_or_else(|| {
            panic!("expected key=value, got {arg}");
        });
        let f = || val.parse::<f64>().unwrap_or_else(|_| panic!("bad value for {key}"));
        match key {
            "n" => n = val.parse().unwrap(),
            "train" => train_count = val.parse().unwrap(),
            "eval" => eval_count = val.parse().unwrap(),
            "seed" => seed = val.parse().unwrap(),
            "quiet" => quiet = val.parse().unwrap(),
            "syn" => net_cfg.syn_gain = f(),
            "theta_plus" => net_cfg.theta_plus = f(),
            "tau_theta" => net_cfg.tau_theta = f(),
            "tau_in" => net_cfg.input.tau_mem = f(),
            "tau_out" => net_cfg.output.tau_mem = f(),
            "vreset_in" => net_cfg.input.v_reset = f(),
            "vreset_out" => net_cfg.output.v_reset = f(),
            "refrac_in" => net_cfg.input.refractory = f(),
            "refrac_out" => net_cfg.output.refractory = f(),
            "vinit" => net_cfg.input_v_init = f(),
            "gain" => tc.input_gain = f(),
            "pres" => tc.presentation_time = f(),
            "rest" => tc.rest_time = f(),
            "epochs" => tc.epochs = val.parse().unwrap(),
            "sfp" => sfp_override = Some(f()),
            "sfd" => sfd_override = Some(f()),
            "eval_pres" => eval_pres = Some(f()),
            other => panic!("unknown key {other}"),
        }
    }
    // Re-derive the scaling-factor pair after n is known.
    let reference = TrainConfig::<f64>::for_outputs(n);
    tc.vdsp = reference.vdsp;
    tc.sf = reference.sf;
    if let Some(v) = sfp_override {
        tc.sf.sf_p = v;
    }
    if let Some(v) = sfd_override {
        tc.sf.sf_d = v;
    }
    tc.seed = seed;

    let data_dir = std::path::Path::new("data/mnist");
    let train_set = LabeledImages::from_idx(
        &load_idx_images(data_dir.join("train-images-idx3-ubyte.gz")).unwrap(),
        &load_idx_labels(data_dir.join("train-labels-idx1-ubyte.gz")).unwrap(),
    )
    .unwrap()
    .subset(0, train_count);
    let test_set = LabeledImages::from_idx(
        &load_idx_images(data_dir.join("t10k-images-idx3-ubyte.gz")).unwrap(),
        &load_idx_labels(data_dir.join("t10k-labels-idx1-ubyte.gz")).unwrap(),
    )
    .unwrap()
    .subset(0, eval_count);

    let mut net = Network::new(784, n, net_cfg, seed).unwrap();
    let started = std::time::Instant::now();
    let mut last_window_spikes = 0u64;
    // train=0 keeps the seeded random weights (labeling/eval still run on
    // the sets below, which default to the full slices).
    let label_set = if train_count == 0 {
        net.set_encoding(tc.input_gain, tc.presentation_time).unwrap();
        LabeledImages::from_idx(
            &load_idx_images(data_dir.join("train-images-idx3-ubyte.gz")).unwrap(),
            &load_idx_labels(data_dir.join("train-labels-idx1-ubyte.gz")).unwrap(),
        )
        .unwrap()
        .subset(0, 5000)
    } else {
        net = train_with_progress(net, &train_set, &tc, |row| {
            last_window_spikes = row.post_spikes;
            if !quiet {
                eprintln!(
                    "  {:>6} images  mean_w={:.4}  window_spikes={}",
                    row.images_seen, row.mean_weight, row.post_spikes
                );
            }
        })
        .unwrap();
        train_set
    };
    let train_secs = started.elapsed().as_secs_f64();

    if let Some(p) = eval_pres {
        net.set_encoding(tc.input_gain, p).unwrap();
    }
    let labeled = assign_labels(net, &label_set).unwrap();
    let report = evaluate(&labeled, &test_set).unwrap();

    if !quiet {
        eprintln!("mean response by neuron (rows) x class (cols):");
        for (j, row) in class_responses(&labeled, &label_set).unwrap().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|m| format!("{m:6.1}")).collect();
            eprintln!("  n{j:<2} {}", cells.join(" "));
        }
        eprintln!("confusion (rows=truth, cols=prediction, last=abstain):");
        for (c, row) in report.confusion.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|n| format!("{n:5}")).collect();
            eprintln!("  c{c} {}", cells.join(" "));
        }
    }

    let labels: Vec<String> = labeled
        .labels()
        .iter()
        .map(|l| l.map(|d| d.to_string()).unwrap_or_else(|| "-".into()))
        .collect();
    let (w_lo, w_hi) = labeled
        .weights()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| (lo.min(w), hi.max(w)));
    println!(
        "acc={:.4} correct={} abstain={} n={} seed={} syn={} theta_plus={} tau_theta={} gain={} \
         pres={} rest={} vinit={} refrac_in={} tau_in={} tau_out={} sfp={} sfd={} mean_w={:.4} \
         w_range=[{:.3},{:.3}] labels=[{}] train_s={:.1}",
        report.accuracy,
        report.correct,
        report.abstained,
        n,
        seed,
        net_cfg.syn_gain,
        net_cfg.theta_plus,
        net_cfg.tau_theta,
        tc.input_gain,
        tc.presentation_time,
        tc.rest_time,
        net_cfg.input_v_init,
        net_cfg.input.refractory,
        net_cfg.input.tau_mem,
        net_cfg.output.tau_mem,
        tc.sf.sf_p,
        tc.sf.sf_d,
        labeled.mean_weight(),
        w_lo,
        w_hi,
        labels.join(","),
        train_secs
    );
}
