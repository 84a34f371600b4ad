//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p nds-harness --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use nds_core::analysis::fixed_points_nds;
use nds_core::integrators::{iterate_discrete_rossler, iterate_nds_form, StepSize, DISCRETE_ROSSLER_TS};
use nds_core::neuron::{inter_spike_intervals, run_neuron, seeded_initial_state, InitialCondition, NeuronRunConfig};
use nds_core::upo::{derive_run_seed, detect_period, run_ensemble, DetectionConfig, ProtocolConfig};
use nds_core::{Execution, NdsParams, RosslerParams, State3, Trace, DIVERGENCE_THRESHOLD};
use nds_harness::cli::{run, EXIT_OK};
use nds_harness::output::parse_trace_csv;
use nds_harness::presets::{self, CALIBRATED_DELAY, CALIBRATED_WEIGHT};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn nds(args: &[&str]) -> (i32, Vec<u8>) {
    let mut buf = Vec::new();
    let mut argv = vec!["nds"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut buf);
    (code, buf)
}

fn nds_json(args: &[&str]) -> Result<Value, String> {
    let (code, out) = nds(args);
    ensure!(code == EXIT_OK, "`nds {}` exited {code}", args.join(" "));
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn max_abs_rossler() -> Outcome {
    let v = nds_json(&["analyze", "--system", "rossler"])?;
    let lmax = v["max_abs_eigenvalue"].as_f64().ok_or("missing max_abs_eigenvalue")?;
    let ts = v["ts_bound"].as_f64().ok_or("missing ts_bound")?;
    ensure!((lmax - 5.68698).abs() <= 0.01, "max |λ| = {lmax}");
    ensure!((ts - 0.0176).abs() <= 1e-4 && ts <= 0.0176 + 1e-4, "ts_bound = {ts}");
    Ok(format!("max |λ| = {lmax:.6}, ts_bound = {ts:.6}"))
}

fn classifications() -> Outcome {
    let r = nds_json(&["analyze", "--system", "rossler"])?;
    let n = nds_json(&["analyze", "--system", "nds"])?;
    let flow: Vec<&str> = r["classifications"].as_array().ok_or("missing")?.iter().filter_map(Value::as_str).collect();
    let map: Vec<&str> = n["classifications"].as_array().ok_or("missing")?.iter().filter_map(Value::as_str).collect();
    let detail = format!("rossler {flow:?}, nds {map:?}");
    ensure!(flow == ["spiral-saddle", "spiral-saddle"], "{detail}");
    ensure!(map == ["spiral-repellor", "spiral-repellor"], "{detail}");
    Ok(detail)
}

fn root_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let av = rng.gen_range(1e-4..0.2);
        let p = NdsParams {
            a: av,
            v: av,
            b: rng.gen_range(1e-3..0.1),
            c: rng.gen_range(1e-3..0.1),
            d: rng.gen_range(0.1..1.0),
            k: rng.gen_range(-0.6..-0.01),
            ..NdsParams::default()
        };
        let base = fixed_points_nds(&p).map_err(|e| e.to_string())?;
        for f in [0.1, 2.0, 10.0] {
            let q = NdsParams { b: p.b * f, c: p.c * f, d: p.d * f, ..p };
            let scaled = fixed_points_nds(&q).map_err(|e| e.to_string())?;
            for (s, t) in base.iter().zip(&scaled) {
                worst = worst.max(s.distance(t));
            }
        }
    }
    ensure!(worst < 1e-12, "max change {worst:e}");
    Ok(format!("100 bundles x 3 factors, max change {worst:e}"))
}

fn free_run_chaos() -> Outcome {
    let cfg = DetectionConfig::default();
    let mut irregular = 0;
    let mut min_spikes = usize::MAX;
    for i in 0..100 {
        let run = NeuronRunConfig::free_run(NdsParams::default(), InitialCondition::Random, 10_000, derive_run_seed(2024, i));
        let trace = run_neuron(&run).map_err(|e| format!("seed {i}: {e}"))?;
        let bound = trace.states().iter().map(State3::sup_norm).fold(0.0, f64::max);
        ensure!(bound <= DIVERGENCE_THRESHOLD, "seed {i} unbounded");
        min_spikes = min_spikes.min(trace.spike_count());
        ensure!(trace.spike_count() >= 2, "seed {i}: {} spikes", trace.spike_count());
        let det = detect_period(&trace, &cfg).map_err(|e| e.to_string())?;
        ensure!(det.period.is_none(), "seed {i}: period {:?}", det.period);
        let isi = inter_spike_intervals(&trace);
        if isi.windows(2).any(|w| w[0] != w[1]) {
            irregular += 1;
        }
    }
    ensure!(irregular >= 99, "only {irregular}/100 runs with irregular ISIs");
    Ok(format!("100/100 bounded and aperiodic, min {min_spikes} spikes, {irregular}/100 irregular ISIs"))
}

fn stabilization_exists() -> Outcome {
    let v = nds_json(&["calibrate", "--seed", "0"])?;
    let hit = &v["hit"];
    ensure!(!hit.is_null(), "no (w, τ) stabilises a period-4 orbit");
    let (w, tau) = (hit["weight"].as_f64().unwrap_or(f64::NAN), hit["delay"].as_u64().unwrap_or(0));
    let spikes = hit["spikes_per_period"].as_u64().unwrap_or(0);
    ensure!(spikes == 4, "{spikes} spikes per period");
    ensure!(
        (w, tau as usize) == (CALIBRATED_WEIGHT, CALIBRATED_DELAY),
        "calibration gave ({w}, {tau}), presets pin ({CALIBRATED_WEIGHT}, {CALIBRATED_DELAY})"
    );
    // The pinned preset reproduces the orbit from the CLI as well.
    let (code, csv) = nds(&["trace", "--preset", "fig4-period4", "--seed", "0"]);
    ensure!(code == EXIT_OK, "fig4-period4 exited {code}");
    let rows = parse_trace_csv(std::str::from_utf8(&csv).unwrap())?;
    let mut trace = Trace::new(1);
    for r in &rows {
        trace.push(State3::new(r.x, r.y, r.u), r.gamma == 1).map_err(|e| e.to_string())?;
    }
    let period = detect_period(&trace, &DetectionConfig::default())
        .map_err(|e| e.to_string())?
        .period
        .ok_or("fig4-period4 trace is not periodic")?;
    Ok(format!("w = {w}, τ = {tau}, period {period} with 4 spikes"))
}

fn negative_result() -> Outcome {
    let v = nds_json(&["ensemble", "--preset", "rossler-in-nds", "--runs", "1000", "--seed", "1"])?;
    let r = &v["results"][0];
    let stabilized = r["stabilized_runs"].as_u64().ok_or("missing stabilized_runs")?;
    ensure!(r["runs"] == 1000, "runs = {}", r["runs"]);
    ensure!(stabilized == 0, "{stabilized} runs stabilised");
    Ok(format!("0/1000 stabilised ({} diverged)", r["diverged_runs"]))
}

fn sign_flipped_divergence() -> Outcome {
    let p = NdsParams::rossler_mapped(DISCRETE_ROSSLER_TS);
    let mut latest = 0;
    for i in 0..10 {
        let out = iterate_nds_form(seeded_initial_state(derive_run_seed(7, i)), &p, 1_000_000);
        let step = out.diverged_at.ok_or(format!("initial state {i} stayed bounded"))?;
        latest = latest.max(step);
    }
    Ok(format!("10/10 diverged, latest at step {latest}"))
}

fn discrete_rossler_bounded() -> Outcome {
    let out = iterate_discrete_rossler(
        State3::new(1.0, 1.0, 1.0),
        &RosslerParams::default(),
        StepSize::new(DISCRETE_ROSSLER_TS).unwrap(),
        1_000_000,
    );
    ensure!(out.diverged_at.is_none(), "diverged at {:?}", out.diverged_at);
    let states = out.trace.states();
    let bound = states.iter().map(State3::sup_norm).fold(0.0, f64::max);
    let max_u = states.iter().map(|s| s.u).fold(f64::NEG_INFINITY, f64::max);
    ensure!(bound <= 100.0, "sup norm {bound}");
    ensure!(max_u > 1.0, "max u {max_u}");
    Ok(format!("sup norm {bound:.3}, max u {max_u:.3}"))
}

fn sweep_consistency() -> Outcome {
    // Required valid values: every setup value plus interior points of the
    // published ranges.
    let required: [(&str, &str, Vec<f64>); 4] = [
        ("table1-sweep-a", "a&v", vec![0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1]),
        ("table1-sweep-bc", "b&c", vec![0.001, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05]),
        ("table1-sweep-d", "d", vec![0.8, 0.85, 0.9]),
        ("table1-sweep-k", "k", vec![-0.055, -0.056, -0.057, -0.058]),
    ];
    let mut failures = Vec::new();
    let mut checked = 0;
    for (preset, label, values) in &required {
        let (code, out) = nds(&["sweep", "--preset", preset, "--probe-runs", "5", "--seed", "0"]);
        ensure!(code == EXIT_OK, "{preset} exited {code}");
        let text = String::from_utf8(out).unwrap();
        for v in values {
            let row = text
                .lines()
                .skip(1)
                .map(|l| l.split(',').collect::<Vec<_>>())
                .find(|f| f[1].parse::<f64>().ok() == Some(*v))
                .ok_or(format!("{label} = {v} missing from {preset}"))?;
            checked += 1;
            if row[2] != "true" {
                failures.push(format!("{label}={v} ({}/{} bounded)", row[3], row[4]));
            }
        }
    }
    ensure!(failures.is_empty(), "invalid: {}", failures.join(", "));
    Ok(format!("{checked} values valid"))
}

fn ensemble_analog() -> Outcome {
    let args = ["ensemble", "--preset", "fig7-ensemble", "--runs", "1000", "--seed", "1"];
    let (c1, first) = nds(&args);
    let (c2, second) = nds(&args);
    ensure!(c1 == EXIT_OK && c2 == EXIT_OK, "exit codes {c1}, {c2}");
    ensure!(first == second, "two runs with the same seed differ");
    let v: Value = serde_json::from_slice(&first).map_err(|e| e.to_string())?;
    let results = v["results"].as_array().ok_or("missing results")?;
    ensure!(results.len() == 15, "{} setups", results.len());
    for r in results {
        ensure!(r["runs"] == 1000, "{} ran {} times", r["setup_name"], r["runs"]);
    }
    let s07 = results.iter().find(|r| r["setup_name"] == "setup07").ok_or("setup07 missing")?;
    let distinct = s07["distinct_upos"].as_u64().unwrap_or(0);
    ensure!(distinct > 1, "setup07 distinct_upos = {distinct}");

    // Sequential and parallel execution agree run-for-run.
    let proto = ProtocolConfig::default();
    let grid = presets::ensemble_grid();
    let p07 = presets::setup_params(6);
    let seq = run_ensemble("setup07", &p07, &grid, 200, 1, &proto, Execution::Sequential).map_err(|e| e.to_string())?;
    let par = run_ensemble("setup07", &p07, &grid, 200, 1, &proto, Execution::Parallel).map_err(|e| e.to_string())?;
    ensure!(seq == par, "sequential and parallel ensembles differ");
    Ok(format!("15 x 1000 runs, setup07 distinct_upos = {distinct}, stabilized = {}", s07["stabilized_runs"]))
}

/// Smallest period whose recurrence holds over the whole window, scanning
/// every candidate in full.
fn brute_force_period(states: &[State3], cfg: &DetectionConfig) -> Option<usize> {
    let n = states.len();
    (1..=cfg.p_max).find(|&p| {
        (n - cfg.check_window..n).all(|t| {
            let (a, b) = (states[t], states[t - p]);
            (a.x - b.x).abs().max((a.y - b.y).abs()).max((a.u - b.u).abs()) < cfg.eps
        })
    })
}

fn oracle_equivalence() -> Outcome {
    let cfg = DetectionConfig::default();
    let len = cfg.check_window + cfg.p_max + 50;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rand_state = |rng: &mut ChaCha8Rng, scale: f64| {
        State3::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    };
    let mut found = 0;
    for i in 0..1000 {
        let states: Vec<State3> = match i % 4 {
            0 => vec![rand_state(&mut rng, 1.0); len],
            1 | 2 => {
                let k = rng.gen_range(1..=50);
                let cycle: Vec<State3> = (0..k).map(|_| rand_state(&mut rng, 1.0)).collect();
                let noise = if i % 4 == 2 { cfg.eps / 4.0 } else { 0.0 };
                (0..len)
                    .map(|t| {
                        let s = cycle[t % k];
                        if noise > 0.0 {
                            let e = rand_state(&mut rng, noise);
                            State3::new(s.x + e.x, s.y + e.y, s.u + e.u)
                        } else {
                            s
                        }
                    })
                    .collect()
            }
            _ => (0..len).map(|_| rand_state(&mut rng, 1.0)).collect(),
        };
        let mut trace = Trace::with_capacity(0, len);
        for s in &states {
            trace.push(*s, false).unwrap();
        }
        let got = detect_period(&trace, &cfg).map_err(|e| e.to_string())?.period;
        let want = brute_force_period(&states, &cfg);
        ensure!(got == want, "trace {i}: detect_period {got:?}, oracle {want:?}");
        found += usize::from(got.is_some());
    }
    Ok(format!("1000/1000 agree ({found} periodic)"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let trace_path = dir.path().join("fig4.csv");
    let ens_path = dir.path().join("ens.json");
    let (c, _) = nds(&["trace", "--preset", "fig4-period4", "--seed", "5", "--out", trace_path.to_str().unwrap()]);
    ensure!(c == EXIT_OK, "fig4 trace exited {c}");
    let (c, _) = nds(&["ensemble", "--preset", "setup05", "--runs", "50", "--seed", "5", "--out", ens_path.to_str().unwrap()]);
    ensure!(c == EXIT_OK, "ensemble exited {c}");
    let path = |p: &Path| p.to_str().unwrap().to_string();
    let (tp, ep) = (path(&trace_path), path(&ens_path));
    let invocations: Vec<Vec<&str>> = vec![
        vec!["trace", "--preset", "fig1-rossler"],
        vec!["trace", "--preset", "fig2-period2", "--steps", "20000"],
        vec!["trace", "--preset", "fig3-free-run", "--seed", "9"],
        vec!["trace", "--preset", "fig4-period4", "--seed", "9"],
        vec!["trace", "--preset", "fig5-discrete-rossler"],
        vec!["trace", "--preset", "fig6-nds-form", "--seed", "9"],
        vec!["trace", "--preset", "setup13", "--seed", "9", "--format", "svg"],
        vec!["analyze", "--preset", "setup03"],
        vec!["analyze", "--system", "rossler"],
        vec!["sweep", "--preset", "table1-sweep-k-wide", "--probe-runs", "2", "--seed", "9"],
        vec!["ensemble", "--preset", "setup11", "--runs", "100", "--seed", "9"],
        vec!["calibrate", "--seed", "9"],
        vec!["plot", "--input", &tp, "--axes", "x,u"],
        vec!["plot", "--input", &ep],
    ];
    for args in &invocations {
        let a = nds(args);
        let b = nds(args);
        ensure!(a == b, "`nds {}` differs between runs", args.join(" "));
    }
    Ok(format!("{} invocations byte-identical", invocations.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "Rössler max |λ| and step bound", budget: Duration::from_secs(1), check: max_abs_rossler },
        Criterion { id: 2, name: "fixed-point classification", budget: Duration::from_secs(1), check: classifications },
        Criterion { id: 3, name: "root scaling invariance", budget: Duration::from_secs(5), check: root_scaling },
        Criterion { id: 4, name: "free-run chaos", budget: Duration::from_secs(10), check: free_run_chaos },
        Criterion { id: 5, name: "period-4 stabilisation exists", budget: Duration::from_secs(120), check: stabilization_exists },
        Criterion { id: 6, name: "Rössler-mapped setting stabilises nothing", budget: Duration::from_secs(120), check: negative_result },
        Criterion { id: 7, name: "sign-flipped map diverges", budget: Duration::from_secs(10), check: sign_flipped_divergence },
        Criterion { id: 8, name: "discrete Rössler bounded with fin", budget: Duration::from_secs(5), check: discrete_rossler_bounded },
        Criterion { id: 9, name: "sweep consistency", budget: Duration::from_secs(300), check: sweep_consistency },
        Criterion { id: 10, name: "ensemble over setups 01-15", budget: Duration::from_secs(1800), check: ensemble_analog },
        Criterion { id: 11, name: "detect_period vs brute force", budget: Duration::from_secs(10), check: oracle_equivalence },
        Criterion { id: 12, name: "CLI determinism", budget: Duration::from_secs(60), check: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; took {elapsed:.2?}, budget {:?}", c.budget)),
            other => other,
        };
        match result {
            Ok(detail) => println!("[PASS] criterion {}: {} — {detail} ({elapsed:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {}: {} — {why} ({elapsed:.2?})", c.id, c.name);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
