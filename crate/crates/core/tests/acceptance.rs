//! End-to-end acceptance gates, one printed line per numbered criterion.
//!
//! Runs as a plain binary (no harness) so the pass/fail table prints in
//! order. The process exits nonzero if any gate fails. The full-scale
//! network reference (criterion 9) takes hours of simulated time and only
//! runs when `FESYN_FULL_SCALE=1`; it reports its deviation instead of
//! failing, since the published hyperparameters underdetermine the run.

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fesyn_core::cards::{
    reference_card, reference_conduction, reference_device, reference_rc, reference_vdsp,
};
use fesyn_core::device_model::{
    apply_pulse, eval_envelope, in_reachable_region, on_envelope, simulate_random_pulses,
    weight_to_resistance, DeviceState, PulseRecord, PulseSpec,
};
use fesyn_core::device_physics::{
    current_density, merz_switching_time, programming_energy, tau_area, tau_rc,
};
use fesyn_core::fitting::{
    fit_envelopes, fit_merz, fit_vdsp, IvTrace, PulseTrace, StateLabel,
};
use fesyn_core::io::{
    load_idx_images, load_idx_labels, load_iv_csv, load_pulse_csv, resolve_idx, save_idx_images,
    save_idx_labels, write_iv_csv, write_pulse_csv, IdxImages, IdxLabels,
};
use fesyn_core::snn::{
    assign_labels, evaluate, train_with_progress, LabeledImages, Network, NetworkConfig,
    TrainConfig,
};
use fesyn_core::vdsp::{delta_w, ScalingFactors};
use fesyn_core::{load_card, save_card};

fn rel_err(x: f64, want: f64) -> f64 {
    (x - want).abs() / want.abs()
}

fn mnist_dir() -> PathBuf {
    if let Some(d) = std::env::var_os("FESYN_DATA_DIR") {
        return PathBuf::from(d).join("mnist");
    }
    for base in ["data", "../../data"] {
        let p = Path::new(base).join("mnist");
        if p.is_dir() {
            return p;
        }
    }
    PathBuf::from("data/mnist")
}

fn load_mnist(train_n: usize, eval_n: usize) -> Result<(LabeledImages, LabeledImages), String> {
    let dir = mnist_dir();
    let stem = |s: &str| resolve_idx(&dir, s).map_err(|e| e.to_string());
    let train = LabeledImages::from_idx(
        &load_idx_images(stem("train-images-idx3-ubyte")?).map_err(|e| e.to_string())?,
        &load_idx_labels(stem("train-labels-idx1-ubyte")?).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let test = LabeledImages::from_idx(
        &load_idx_images(stem("t10k-images-idx3-ubyte")?).map_err(|e| e.to_string())?,
        &load_idx_labels(stem("t10k-labels-idx1-ubyte")?).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    Ok((train.subset(0, train_n), test.subset(0, eval_n)))
}

/// Hand-computed envelope readings for the calibrated rule.
fn c1_envelope_spot_values() -> Result<String, String> {
    let rule = reference_device::<f64>();
    let cases = [
        (&rule.upper, -1.0, 1.8e9),
        (&rule.upper, -3.0, 1_100_193_051.308_822_8),
        (&rule.lower, 3.0, 2_486_957_656.916_906_6),
    ];
    for (env, v, want) in cases {
        let got = eval_envelope(env, v);
        if rel_err(got, want) > 1e-9 {
            return Err(format!("envelope({v} V) = {got:.6e}, want {want:.6e}"));
        }
    }
    Ok("3 spot values within 1e-9 relative".into())
}

/// Property suite over seeded random pulse sequences.
fn c2_update_rule_properties() -> Result<String, String> {
    const CASES: usize = 100_000;
    let rule = reference_device::<f64>();
    let (r_lo, r_hi) = (rule.lower.r_min, rule.lower.r_max);
    let width = 20e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut converged_pairs = 0usize;
    for case in 0..CASES {
        let r0 = weight_to_resistance(rng.random_range(0.0..=1.0), &rule)
            .map_err(|e| e.to_string())?;
        let start = DeviceState { resistance: r0 };
        let sign = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
        let mag = rng.random_range(0.01..3.75);
        let v = sign * mag;
        let pulse = |amplitude: f64| PulseSpec { amplitude, width };

        let s1 = apply_pulse(start, &rule, pulse(v)).map_err(|e| e.to_string())?;
        if s1.resistance < r_lo || s1.resistance > r_hi {
            return Err(format!("case {case}: resistance {} left [{r_lo}, {r_hi}]", s1.resistance));
        }
        let s1b = apply_pulse(s1, &rule, pulse(v)).map_err(|e| e.to_string())?;
        if s1b.resistance != s1.resistance {
            return Err(format!("case {case}: repeated pulse moved {} -> {}", s1.resistance, s1b.resistance));
        }

        let v_strong = sign * rng.random_range(mag..=3.75);
        let s_strong = apply_pulse(start, &rule, pulse(v_strong)).map_err(|e| e.to_string())?;
        let ordered = if sign < 0.0 {
            s_strong.resistance <= s1.resistance
        } else {
            s_strong.resistance >= s1.resistance
        };
        if !ordered {
            return Err(format!(
                "case {case}: stronger {v_strong} V ended at {} vs {} for {v} V",
                s_strong.resistance, s1.resistance
            ));
        }
        let chained = apply_pulse(s1, &rule, pulse(v_strong)).map_err(|e| e.to_string())?;
        if chained.resistance != s_strong.resistance {
            return Err(format!(
                "case {case}: weak-then-strong {} != strong alone {}",
                chained.resistance, s_strong.resistance
            ));
        }

        let other = DeviceState {
            resistance: weight_to_resistance(rng.random_range(0.0..=1.0), &rule)
                .map_err(|e| e.to_string())?,
        };
        let o_strong = apply_pulse(other, &rule, pulse(v_strong)).map_err(|e| e.to_string())?;
        let both_switched =
            s_strong.resistance != r0 && o_strong.resistance != other.resistance;
        if both_switched {
            converged_pairs += 1;
            if s_strong.resistance != o_strong.resistance {
                return Err(format!(
                    "case {case}: {} and {} did not converge after {v_strong} V",
                    s_strong.resistance, o_strong.resistance
                ));
            }
        }
    }
    if converged_pairs < CASES / 10 {
        return Err(format!("only {converged_pairs} convergence pairs triggered; suite is vacuous"));
    }
    Ok(format!("{CASES} sequences; {converged_pairs} convergence pairs all identical"))
}

/// Random-amplitude trace stays inside the envelopes and refits them.
fn c3_random_pulse_trace_and_refit() -> Result<String, String> {
    let rule = reference_device::<f64>();
    let start = rule.hrs();
    let recs = simulate_random_pulses(&rule, start, 300, (-3.0, 3.0), 20e-9, 7)
        .map_err(|e| e.to_string())?;
    let mut switching = 0usize;
    for (i, rec) in recs.iter().enumerate() {
        if !in_reachable_region(&rule, (-3.0, 3.0), start.resistance, rec.v_write, rec.r_final, 1e-9) {
            return Err(format!("record {i} at {} V left the reachable region", rec.v_write));
        }
        if rec.delta_r != 0.0 {
            switching += 1;
            if !on_envelope(&rule, rec.v_write, rec.r_final, 1e-9) {
                return Err(format!("record {i}: switching event not on an envelope"));
            }
        }
    }
    let fit = fit_envelopes(&PulseTrace { records: recs }, None).map_err(|e| e.to_string())?;
    let got = fit.parameters;
    let mut worst: f64 = 0.0;
    for (name, g, w) in [
        ("r_min", got.upper.r_min, rule.upper.r_min),
        ("r_max", got.upper.r_max, rule.upper.r_max),
        ("upper v0", got.upper.v0, rule.upper.v0),
        ("upper v_off", got.upper.v_off, rule.upper.v_off),
        ("lower v0", got.lower.v0, rule.lower.v0),
        ("lower v_off", got.lower.v_off, rule.lower.v_off),
    ] {
        let e = rel_err(g, w);
        worst = worst.max(e);
        if e > 0.03 {
            return Err(format!("{name} refit {g:.6} vs {w:.6}: {:.2}% off", e * 100.0));
        }
    }
    Ok(format!("{switching}/300 switching events on-envelope; worst refit error {:.3}%", worst * 100.0))
}

/// Single-pulse write energy from the calibrated conduction model.
fn c4_programming_energy() -> Result<String, String> {
    let m = reference_conduction::<f64>();
    let j = current_density(-3.0, &m);
    if rel_err(j, -2.2e6) > 1e-3 {
        return Err(format!("J(-3 V) = {j:.4e} A/m^2, calibration target -2.2e6"));
    }
    let e = programming_energy(-3.0, 20e-9, 24e-12, &m);
    if rel_err(e, 3.1e-12) > 0.15 {
        return Err(format!("energy {:.3} pJ outside 3.1 pJ +/- 15%", e * 1e12));
    }
    Ok(format!("J(-3 V) = {j:.3e} A/m^2, energy {:.3} pJ", e * 1e12))
}

/// Charging-time scaling in device area.
fn c5_rc_scaling() -> Result<String, String> {
    let rc = reference_rc::<f64>();
    let m = reference_conduction::<f64>();
    let v = -3.0;
    let mut prev = 0.0;
    for k in 0..100 {
        let area = 1e-12 + 99e-12 * k as f64 / 99.0;
        let tau = tau_area(v, area, &rc, &m).map_err(|e| e.to_string())?;
        if tau <= prev {
            return Err(format!("tau not increasing at area {area:.3e} m^2"));
        }
        prev = tau;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let vv = if rng.random_bool(0.5) { -1.0 } else { 1.0 } * rng.random_range(0.2..3.75);
        let area = rng.random_range(0.5e-12..200e-12);
        let lhs = tau_area(vv, area, &rc, &m).map_err(|e| e.to_string())?;
        let j = current_density(vv, &m);
        let rhs = tau_rc(vv / (j * area), rc.r_el, rc.cap_density() * area);
        if rel_err(lhs, rhs) > 1e-12 {
            return Err(format!("identity broke at v={vv:.3}, area={area:.3e}: {lhs:.15e} vs {rhs:.15e}"));
        }
    }
    let tau_top = tau_area(v, 100e-12, &rc, &m).map_err(|e| e.to_string())?;
    if tau_top < 20e-9 / 3.0 || tau_top > 20e-9 * 3.0 {
        return Err(format!("tau(100 um^2) = {:.2} ns not within 3x of 20 ns", tau_top * 1e9));
    }
    Ok(format!("monotone over [1,100] um^2; identity to 1e-12; tau(100 um^2) = {:.1} ns", tau_top * 1e9))
}

/// Switching-time law refit from the three measured operating points.
fn c6_merz_fit() -> Result<String, String> {
    let d = 5e-9;
    let pts: [(f64, f64); 3] = [(20e-6, 2.0), (200e-9, 3.0), (20e-9, 3.75)];
    let fit = fit_merz(&pts, d).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for &(width, v) in &pts {
        let pred = merz_switching_time(v / d, &fit.parameters);
        let log_res = (pred / width).ln().abs();
        worst = worst.max(log_res);
        if log_res >= 5f64.ln() {
            return Err(format!("{width:.1e} s at {v} V re-predicted as {pred:.2e} s (ratio {:.1})", pred / width));
        }
    }
    let two = fit_merz(&pts[..2], d).map_err(|e| e.to_string())?;
    for &(width, v) in &pts[..2] {
        let pred = merz_switching_time(v / d, &two.parameters);
        if rel_err(pred, width) > 1e-9 {
            return Err(format!("2-point interpolation missed {width:.1e} s: {pred:.6e} s"));
        }
    }
    if two.residual_rms > 1e-9 {
        return Err(format!("2-point residual {} should be zero", two.residual_rms));
    }
    Ok(format!("3-point worst |log residual| {:.3} < ln 5; 2-point exact", worst))
}

/// Plasticity-rule spot values and noiseless surface recovery.
fn c7_vdsp_recovery() -> Result<String, String> {
    let p = reference_vdsp::<f64>();
    for (v, w, want) in [(-0.45, 0.5, 0.3104), (1.0, 0.5, -0.0645)] {
        let got = delta_w(v, w, &p).map_err(|e| e.to_string())?;
        if (got - want).abs() > 1e-4 {
            return Err(format!("delta_w({v}, {w}) = {got:.6}, want {want} to 1e-4"));
        }
    }
    let mut samples = Vec::new();
    for i in 0..40 {
        let v = -1.2 + 2.6 * i as f64 / 39.0;
        for k in 1..10 {
            let w = k as f64 / 10.0;
            samples.push((v, w, delta_w(v, w, &p).map_err(|e| e.to_string())?));
        }
    }
    let fit = fit_vdsp(&samples, None).map_err(|e| e.to_string())?;
    let g = fit.parameters;
    let mut worst: f64 = 0.0;
    for (name, got, want) in [
        ("alpha_p", g.alpha_p, p.alpha_p),
        ("alpha_d", g.alpha_d, p.alpha_d),
        ("theta_p", g.theta_p, p.theta_p),
        ("theta_d", g.theta_d, p.theta_d),
        ("gamma_p", g.gamma_p, p.gamma_p),
        ("gamma_d", g.gamma_d, p.gamma_d),
    ] {
        let e = rel_err(got, want);
        worst = worst.max(e);
        if e > 0.05 {
            return Err(format!("{name} recovered as {got:.4}, want {want} within 5%"));
        }
    }
    Ok(format!("spot values to 1e-4; all six constants within {:.3}%", worst * 100.0))
}

fn desk_run(outputs: usize, seed: u64, train_set: &LabeledImages, eval_set: &LabeledImages)
    -> Result<(Network, f64), String>
{
    let mut tc = TrainConfig::template_learning(outputs);
    tc.seed = seed;
    let net = Network::new(784, outputs, NetworkConfig::template_learning(), seed)
        .map_err(|e| e.to_string())?;
    let mut bounds_ok = true;
    let net = train_with_progress(net, train_set, &tc, |row| {
        bounds_ok &= row.min_weight >= 0.0 && row.max_weight <= 1.0;
    })
    .map_err(|e| e.to_string())?;
    if !bounds_ok {
        return Err("weights left [0, 1] during training".into());
    }
    if net.weights().iter().any(|&w| !(0.0..=1.0).contains(&w)) {
        return Err("final weights left [0, 1]".into());
    }
    let labeled = assign_labels(net, train_set).map_err(|e| e.to_string())?;
    let report = evaluate(&labeled, eval_set).map_err(|e| e.to_string())?;
    Ok((labeled, report.accuracy))
}

/// Ten-neuron training run plus the capacity trend across widths.
fn c8_desk_scale_snn() -> Result<String, String> {
    let (train_set, eval_set) = load_mnist(10_000, 2_000)?;

    let (net_a, acc) = desk_run(10, 1, &train_set, &eval_set)?;
    if acc <= 0.40 {
        return Err(format!("accuracy {:.2}% not above 40%", acc * 100.0));
    }
    let (net_b, acc_b) = desk_run(10, 1, &train_set, &eval_set)?;
    if acc_b != acc || net_a.weights() != net_b.weights() || net_a.labels() != net_b.labels() {
        return Err("repeated seed-1 run was not bit-identical".into());
    }

    let mut means = Vec::new();
    let mut sds = Vec::new();
    for outputs in [10usize, 50, 100] {
        let mut accs = Vec::new();
        for seed in [1u64, 2, 3] {
            let (_, a) = desk_run(outputs, seed, &train_set, &eval_set)?;
            accs.push(a);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (accs.len() - 1) as f64;
        means.push(mean);
        sds.push(var.sqrt());
    }
    for i in 1..means.len() {
        if means[i] < means[i - 1] - sds[i - 1] {
            return Err(format!(
                "capacity trend broke: mean {:.1}% at step {i} vs {:.1}% (sd {:.1}%) before",
                means[i] * 100.0,
                means[i - 1] * 100.0,
                sds[i - 1] * 100.0
            ));
        }
    }
    Ok(format!(
        "seed-1 accuracy {:.2}%, deterministic; capacity means {:.1}/{:.1}/{:.1}% over N=10/50/100",
        acc * 100.0,
        means[0] * 100.0,
        means[1] * 100.0,
        means[2] * 100.0
    ))
}

/// Optional 200-neuron full-dataset reference; reports its deviation.
fn c9_full_scale_reference() -> Result<String, String> {
    let (train_set, eval_set) = load_mnist(60_000, 10_000)?;
    let mut tc = TrainConfig::<f64>::template_learning(200);
    tc.sf = ScalingFactors::for_output_count(200);
    tc.seed = 1;
    let net = Network::new(784, 200, NetworkConfig::template_learning(), 1)
        .map_err(|e| e.to_string())?;
    let net = train_with_progress(net, &train_set, &tc, |row| {
        eprintln!(
            "  full-scale: {:>6} images, mean weight {:.4}",
            row.images_seen, row.mean_weight
        );
    })
    .map_err(|e| e.to_string())?;
    let labeled = assign_labels(net, &train_set).map_err(|e| e.to_string())?;
    let report = evaluate(&labeled, &eval_set).map_err(|e| e.to_string())?;
    let acc = report.accuracy;
    let dev = (acc - 0.8788) * 100.0;
    Ok(format!(
        "accuracy {:.2}% vs published 87.88% ({:+.2} pp, {} the 3 pp window; reported, not gated)",
        acc * 100.0,
        dev,
        if dev.abs() <= 3.0 { "inside" } else { "outside" }
    ))
}

fn valid_idx_images(rng: &mut ChaCha8Rng) -> IdxImages {
    let count = rng.random_range(1..4usize);
    let (rows, cols) = (rng.random_range(1..8usize), rng.random_range(1..8usize));
    let pixels = (0..count * rows * cols).map(|_| rng.random()).collect();
    IdxImages { count, rows, cols, pixels }
}

fn valid_idx_labels(rng: &mut ChaCha8Rng) -> IdxLabels {
    let count = rng.random_range(1..30usize);
    IdxLabels { count, labels: (0..count).map(|_| rng.random_range(0..10u8)).collect() }
}

fn valid_pulse_trace(rng: &mut ChaCha8Rng) -> PulseTrace {
    let records = (0..rng.random_range(1..12usize))
        .map(|_| {
            let r0 = rng.random_range(1.1e9..2.5e9);
            let r1 = rng.random_range(1.1e9..2.5e9);
            PulseRecord {
                v_write: rng.random_range(-3.75..3.75),
                r_initial: r0,
                r_final: r1,
                delta_r: r1 - r0,
            }
        })
        .collect();
    PulseTrace { records }
}

fn valid_iv_trace(rng: &mut ChaCha8Rng) -> IvTrace {
    let n = rng.random_range(8..24usize);
    let points = (0..n)
        .map(|k| {
            let v = -3.0 + 6.0 * k as f64 / (n - 1) as f64;
            (v, rng.random_range(-1e-4..1e-4))
        })
        .collect();
    IvTrace { points, area: 24e-12, state_label: StateLabel::Unknown }
}

/// Loader fuzzing plus exact serialization round-trips.
fn c10_io_robustness() -> Result<String, String> {
    const CASES: usize = 10_000;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let idx_path = dir.path().join("fuzz-idx");
    let csv_path = dir.path().join("fuzz-csv");
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0FF);

    let prev_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut panics = 0usize;
    let mut rejected = 0usize;
    for case in 0..CASES {
        let kind = case % 5;
        let outcome: Result<bool, _> = panic::catch_unwind(AssertUnwindSafe(|| match kind {
            0 => {
                // Valid IDX image bytes, then truncated or bit-flipped.
                let imgs = valid_idx_images(&mut rng);
                save_idx_images(&imgs, &idx_path).unwrap();
                let mut bytes = std::fs::read(&idx_path).unwrap();
                if rng.random_bool(0.5) && !bytes.is_empty() {
                    bytes.truncate(rng.random_range(0..bytes.len()));
                } else {
                    for _ in 0..rng.random_range(1..6) {
                        if bytes.is_empty() {
                            break;
                        }
                        let at = rng.random_range(0..bytes.len());
                        bytes[at] ^= 1 << rng.random_range(0..8);
                    }
                }
                std::fs::write(&idx_path, &bytes).unwrap();
                load_idx_images(&idx_path).is_err()
            }
            1 => {
                // Random garbage, sometimes behind a gzip magic.
                let mut bytes: Vec<u8> =
                    (0..rng.random_range(0..200usize)).map(|_| rng.random()).collect();
                if rng.random_bool(0.3) {
                    let mut with_magic = vec![0x1f, 0x8b];
                    with_magic.extend_from_slice(&bytes);
                    bytes = with_magic;
                }
                std::fs::write(&idx_path, &bytes).unwrap();
                load_idx_labels(&idx_path).is_err()
            }
            2 => {
                // Pulse CSV with one cell replaced by a non-numeric token.
                let trace = valid_pulse_trace(&mut rng);
                write_pulse_csv(&trace, 20e-9, &csv_path).unwrap();
                let text = std::fs::read_to_string(&csv_path).unwrap();
                let mut lines: Vec<String> = text.lines().map(String::from).collect();
                let row = rng.random_range(1..lines.len());
                let mut cells: Vec<String> =
                    lines[row].split(',').map(String::from).collect();
                let col = rng.random_range(0..cells.len());
                cells[col] = ["x", "", "1.2.3", "0x10", "--"][rng.random_range(0..5)].into();
                lines[row] = cells.join(",");
                std::fs::write(&csv_path, lines.join("\n")).unwrap();
                load_pulse_csv::<f64>(&csv_path).is_err()
            }
            3 => {
                // Structurally broken CSV: bad headers, ragged rows, junk.
                let body = match rng.random_range(0..3) {
                    0 => "a,b,c\n1,2,3\n".to_string(),
                    1 => "index,v_write_volts\n0,1,2,3,4,5\n".to_string(),
                    _ => String::from_utf8_lossy(
                        &(0..rng.random_range(0..120usize))
                            .map(|_| rng.random())
                            .collect::<Vec<u8>>(),
                    )
                    .into_owned(),
                };
                std::fs::write(&csv_path, body).unwrap();
                load_iv_csv::<f64>(&csv_path, 24e-12, StateLabel::Unknown).is_err()
            }
            _ => {
                // IV CSV with a non-finite or shuffled-voltage corruption.
                let trace = valid_iv_trace(&mut rng);
                write_iv_csv(&trace, &csv_path).unwrap();
                let text = std::fs::read_to_string(&csv_path).unwrap();
                let mut lines: Vec<String> = text.lines().map(String::from).collect();
                if rng.random_bool(0.5) && lines.len() > 2 {
                    let row = rng.random_range(1..lines.len());
                    let token = ["NaN", "inf", "-inf", "1e999"][rng.random_range(0..4)];
                    lines[row] = format!("{token},{token}");
                } else {
                    lines[1..].reverse();
                }
                std::fs::write(&csv_path, lines.join("\n")).unwrap();
                load_iv_csv::<f64>(&csv_path, 24e-12, StateLabel::Unknown).is_err()
            }
        }));
        match outcome {
            Ok(was_rejected) => rejected += usize::from(was_rejected),
            Err(_) => panics += 1,
        }
    }
    panic::set_hook(prev_hook);
    if panics > 0 {
        return Err(format!("{panics}/{CASES} fuzz cases panicked instead of returning errors"));
    }
    if rejected < CASES / 2 {
        return Err(format!("only {rejected}/{CASES} corruptions rejected; corpus too tame"));
    }

    for k in 0..100 {
        let imgs = valid_idx_images(&mut rng);
        save_idx_images(&imgs, &idx_path).map_err(|e| e.to_string())?;
        if load_idx_images(&idx_path).map_err(|e| e.to_string())? != imgs {
            return Err(format!("IDX image round-trip {k} differed"));
        }
        let labels = valid_idx_labels(&mut rng);
        save_idx_labels(&labels, &idx_path).map_err(|e| e.to_string())?;
        if load_idx_labels(&idx_path).map_err(|e| e.to_string())? != labels {
            return Err(format!("IDX label round-trip {k} differed"));
        }
        let trace = valid_pulse_trace(&mut rng);
        write_pulse_csv(&trace, 20e-9, &csv_path).map_err(|e| e.to_string())?;
        let (back, width) = load_pulse_csv::<f64>(&csv_path).map_err(|e| e.to_string())?;
        if back.records != trace.records || width != 20e-9 {
            return Err(format!("pulse CSV round-trip {k} differed"));
        }
        let iv = valid_iv_trace(&mut rng);
        write_iv_csv(&iv, &csv_path).map_err(|e| e.to_string())?;
        let back = load_iv_csv::<f64>(&csv_path, iv.area, iv.state_label)
            .map_err(|e| e.to_string())?;
        if back.points != iv.points {
            return Err(format!("IV CSV round-trip {k} differed"));
        }
    }
    let card = reference_card::<f64>(10);
    let card_path = dir.path().join("card.json");
    save_card(&card, &card_path).map_err(|e| e.to_string())?;
    let back = load_card::<f64>(&card_path).map_err(|e| e.to_string())?;
    if back != card {
        return Err("model card JSON round-trip differed".into());
    }
    Ok(format!("{CASES} malformed cases, 0 panics, {rejected} rejected; 401 round-trips identical"))
}

fn main() {
    let full_scale = std::env::var("FESYN_FULL_SCALE").map(|v| v == "1").unwrap_or(false);
    let gates: Vec<(&str, Option<Result<String, String>>)> = vec![
        ("envelope spot values", Some(c1_envelope_spot_values())),
        ("update-rule property suite", Some(c2_update_rule_properties())),
        ("random-pulse trace and envelope refit", Some(c3_random_pulse_trace_and_refit())),
        ("programming energy", Some(c4_programming_energy())),
        ("charging-time scaling", Some(c5_rc_scaling())),
        ("switching-time fit", Some(c6_merz_fit())),
        ("plasticity-rule recovery", Some(c7_vdsp_recovery())),
        ("desk-scale network", Some(c8_desk_scale_snn())),
        ("full-scale reference", if full_scale { Some(c9_full_scale_reference()) } else { None }),
        ("loader fuzzing and round-trips", Some(c10_io_robustness())),
    ];

    let mut failures = 0;
    for (i, (name, outcome)) in gates.iter().enumerate() {
        match outcome {
            Some(Ok(detail)) => println!("{:>2}. {name}: PASS  ({detail})", i + 1),
            Some(Err(detail)) => {
                failures += 1;
                println!("{:>2}. {name}: FAIL  ({detail})", i + 1);
            }
            None => println!("{:>2}. {name}: SKIP  (set FESYN_FULL_SCALE=1 to run)", i + 1),
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance gate(s) failed");
        std::process::exit(1);
    }
}
