//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 divergence, 4 degenerate
//! parameters.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nds_core::analysis::{analyze_nds, analyze_rossler, max_abs_eigenvalue_rossler, FixedPointReport};
use nds_core::integrators::{
    iterate_discrete_rossler, iterate_map, iterate_nds_form, rk4_step, ts_bound, StepSize,
};
use nds_core::neuron::{seeded_initial_state, simulate_neuron, InitialCondition, NeuronRunConfig};
use nds_core::upo::{
    calibrate_feedback, calibration_delays, calibration_weights, run_ensemble, sweep_parameter,
    EnsembleResult, ProtocolConfig, SweepParameter,
};
use nds_core::{
    Error as CoreError, Execution, FeedbackConfig, FeedbackConnection, InputTrains, NdsParams,
    RosslerParams, RunOutcome,
};

use crate::output::{histogram_csv, parse_trace_csv, sweep_csv, trace_csv};
use crate::presets::{self, Preset, PROTOCOL_STEPS, TRANSIENT_STEPS};
use crate::svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NDS_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "nds", version, about = "NDS neuron and Rössler system experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Rossler,
    Nds,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Named experiment preset (see `nds presets`).
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; defaults to $NDS_OUT_DIR/<preset>.<ext>, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Parameter override, e.g. `--param d=0.85` (repeatable).
    #[arg(long = "param", value_parser = parse_key_value, allow_hyphen_values = true)]
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a preset and write its trace.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Also write an SVG plot here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Plot axes, e.g. `x,u` (phase) or `t,u` (time series).
        #[arg(long)]
        axes: Option<String>,
    },
    /// Fixed points, eigenvalues and classifications as JSON.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        system: Option<SystemArg>,
    },
    /// One-parameter validity sweep as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        probe_runs: usize,
        /// Parameter to vary when no sweep preset is given (a&v, b&c, d, k).
        #[arg(long)]
        parameter: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Ensemble of protocol runs; JSON result plus optional histogram CSV.
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        /// Write the period histogram CSV here.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Render ensemble JSON files as a bar chart, or a trace CSV as a plot.
    Plot {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long)]
        axes: Option<String>,
    },
    /// Scan feedback weight and delay for the first period-4 spiking orbit.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Spikes per period to look for.
        #[arg(long, default_value_t = 4)]
        spikes: usize,
    },
    /// List preset names.
    Presets,
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let value: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    if !value.is_finite() {
        return Err(format!("`{v}` is not finite"));
    }
    Ok((k.trim().to_string(), value))
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Divergence { .. } => EXIT_DIVERGENCE,
            CoreError::DegenerateParams(_) | CoreError::ComplexRoots { .. } => EXIT_DEGENERATE,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::invalid(format!("i/o error: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command. Primary
/// output without `--out` goes to `stdout`; diagnostics go to stderr.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Trace { common, svg, axes } => cmd_trace(&common, svg.as_deref(), axes.as_deref(), stdout),
        Command::Analyze { common, system } => cmd_analyze(&common, system, stdout),
        Command::Sweep {
            common,
            probe_runs,
            parameter,
            values,
        } => cmd_sweep(&common, probe_runs, parameter.as_deref(), &values, stdout),
        Command::Ensemble {
            common,
            runs,
            histogram,
        } => cmd_ensemble(&common, runs, histogram.as_deref(), stdout),
        Command::Plot { common, input, axes } => cmd_plot(&common, &input, axes.as_deref(), stdout),
        Command::Calibrate { common, spikes } => cmd_calibrate(&common, spikes, stdout),
        Command::Presets => {
            for name in presets::preset_names() {
                writeln!(stdout, "{name}")?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn load_preset(name: &str) -> CliResult<Preset> {
    presets::preset(name).ok_or_else(|| CliError::invalid(format!("unknown preset `{name}`")))
}

fn meta(command: &str, common: &Common) -> Value {
    json!({
        "command": command,
        "preset": common.preset,
        "seed": common.seed,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn check_format(common: &Common, allowed: &[Format], default: Format) -> CliResult<Format> {
    let f = common.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::invalid(format!("format {f:?} is not supported here")))
    }
}

/// Writes the primary output to `--out`, `$NDS_OUT_DIR/<stem>.<ext>`, or
/// stdout, in that order of preference.
fn emit(out: Option<&Path>, stem: &str, ext: &str, content: &str, stdout: &mut dyn Write) -> CliResult<()> {
    let path = match out {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("{stem}.{ext}"))),
    };
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(&p, content)?;
        }
        None => stdout.write_all(content.as_bytes())?,
    }
    Ok(())
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn set_nds(p: &mut NdsParams, key: &str, value: f64) -> bool {
    let slot = match key {
        "a" => &mut p.a,
        "v" => &mut p.v,
        "b" => &mut p.b,
        "c" => &mut p.c,
        "d" => &mut p.d,
        "k" => &mut p.k,
        "theta" => &mut p.theta,
        "eta0" => &mut p.eta0,
        _ => return false,
    };
    *slot = value;
    true
}

fn set_rossler(p: &mut RosslerParams, key: &str, value: f64) -> bool {
    let slot = match key {
        "a" => &mut p.a,
        "b" => &mut p.b,
        "c" => &mut p.c,
        _ => return false,
    };
    *slot = value;
    true
}

fn unknown_key(key: &str, preset: &str) -> CliError {
    CliError::invalid(format!("parameter `{key}` does not apply to `{preset}`"))
}

/// Applies `w`/`tau` overrides to a single-connection feedback config.
fn override_feedback(fb: &FeedbackConfig, key: &str, value: f64) -> CliResult<FeedbackConfig> {
    let current = fb
        .connections()
        .first()
        .copied()
        .unwrap_or(FeedbackConnection { weight: presets::CALIBRATED_WEIGHT, delay: presets::CALIBRATED_DELAY });
    let next = match key {
        "w" => FeedbackConnection::new(value, current.delay),
        _ => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(CliError::invalid("tau must be a positive integer"));
            }
            FeedbackConnection::new(current.weight, value as usize)
        }
    }?;
    Ok(FeedbackConfig::new(vec![next])?)
}

fn apply_overrides(preset: Preset, overrides: &[(String, f64)]) -> CliResult<Preset> {
    let mut preset = preset;
    for (key, value) in overrides {
        let (key, value) = (key.as_str(), *value);
        let name = preset.name().to_string();
        let ok = match &mut preset {
            Preset::Setup { params, .. } => set_nds(params, key, value),
            Preset::Neuron { params, feedback, .. } => {
                if key == "w" || key == "tau" {
                    *feedback = override_feedback(feedback, key, value)?;
                    true
                } else {
                    set_nds(params, key, value)
                }
            }
            Preset::NdsForm { params, .. } => set_nds(params, key, value),
            Preset::Reference { params, dt, .. } => {
                if key == "dt" {
                    *dt = value;
                    true
                } else {
                    set_rossler(params, key, value)
                }
            }
            Preset::DiscreteRossler { params, ts, .. } => {
                if key == "ts" {
                    *ts = value;
                    true
                } else {
                    set_rossler(params, key, value)
                }
            }
            Preset::Sweep { .. } => false,
            Preset::Ensemble { setups, .. } => {
                let mut all = true;
                for (_, p) in setups.iter_mut() {
                    all &= set_nds(p, key, value);
                }
                all
            }
        };
        if !ok {
            return Err(unknown_key(key, &name));
        }
    }
    Ok(preset)
}

/// Feedback overrides only make sense for a run: split them off.
fn split_feedback_overrides(overrides: &[(String, f64)]) -> (Vec<(String, f64)>, Option<f64>, Option<f64>) {
    let mut rest = Vec::new();
    let (mut w, mut tau) = (None, None);
    for (k, v) in overrides {
        match k.as_str() {
            "w" => w = Some(*v),
            "tau" => tau = Some(*v),
            _ => rest.push((k.clone(), *v)),
        }
    }
    (rest, w, tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlotFamily {
    Neuron,
    Rossler,
}

fn simulate_preset(preset: &Preset, common: &Common) -> CliResult<(RunOutcome, PlotFamily)> {
    let steps_or = |default: usize| common.steps.unwrap_or(default);
    let neuron = |params: NdsParams, feedback: FeedbackConfig, transient: usize, steps: usize| -> CliResult<RunOutcome> {
        let cfg = NeuronRunConfig {
            params,
            feedback,
            inputs: InputTrains::none(),
            initial: InitialCondition::Random,
            transient_steps: transient.min(steps),
            total_steps: steps,
            seed: common.seed,
        };
        Ok(simulate_neuron(&cfg)?)
    };
    match preset {
        Preset::Setup { params, .. } => {
            let (_, w, tau) = split_feedback_overrides(&common.params);
            let mut fb = presets::calibrated_feedback();
            if let Some(w) = w {
                fb = override_feedback(&fb, "w", w)?;
            }
            if let Some(tau) = tau {
                fb = override_feedback(&fb, "tau", tau)?;
            }
            let out = neuron(*params, fb, TRANSIENT_STEPS, steps_or(PROTOCOL_STEPS))?;
            Ok((out, PlotFamily::Neuron))
        }
        Preset::Neuron {
            params,
            feedback,
            transient_steps,
            steps,
            ..
        } => Ok((
            neuron(*params, feedback.clone(), *transient_steps, steps_or(*steps))?,
            PlotFamily::Neuron,
        )),
        Preset::Reference { params, s0, dt, steps, .. } => {
            params.validate()?;
            let dt = StepSize::new(*dt)?;
            Ok((iterate_map(*s0, steps_or(*steps), |s| rk4_step(s, params, dt)), PlotFamily::Rossler))
        }
        Preset::DiscreteRossler { params, ts, s0, steps, .. } => {
            params.validate()?;
            let ts = StepSize::new(*ts)?;
            Ok((iterate_discrete_rossler(*s0, params, ts, steps_or(*steps)), PlotFamily::Rossler))
        }
        Preset::NdsForm { params, steps, .. } => {
            params.validate()?;
            let s0 = seeded_initial_state(common.seed);
            Ok((iterate_nds_form(s0, params, steps_or(*steps)), PlotFamily::Rossler))
        }
        Preset::Sweep { name, .. } | Preset::Ensemble { name, .. } => Err(CliError::invalid(format!(
            "`{name}` is not a trace preset; use `sweep` or `ensemble`"
        ))),
    }
}

fn column(rows: &[crate::output::TraceRow], name: &str) -> CliResult<Vec<f64>> {
    let f: fn(&crate::output::TraceRow) -> f64 = match name {
        "t" => |r| r.t as f64,
        "x" => |r| r.x,
        "y" => |r| r.y,
        "u" => |r| r.u,
        "gamma" => |r| f64::from(r.gamma),
        _ => return Err(CliError::invalid(format!("unknown axis `{name}`"))),
    };
    Ok(rows.iter().map(f).collect())
}

fn plot_rows(rows: &[crate::output::TraceRow], axes: &str, title: &str) -> CliResult<String> {
    let (a, b) = axes
        .split_once(',')
        .ok_or_else(|| CliError::invalid("axes must look like `x,u`"))?;
    let (a, b) = (a.trim(), b.trim());
    let ys = column(rows, b)?;
    if a == "t" {
        let t = column(rows, "t")?;
        Ok(svg::time_series_plot(&t, &[(b, ys)], title))
    } else {
        let xs = column(rows, a)?;
        let pts: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
        Ok(svg::phase_plot(&pts, a, b, title))
    }
}

fn cmd_trace(common: &Common, svg_out: Option<&Path>, axes: Option<&str>, stdout: &mut dyn Write) -> CliResult<i32> {
    let format = check_format(common, &[Format::Csv, Format::Svg], Format::Csv)?;
    let name = common.preset.clone().unwrap_or_else(|| "fig3-free-run".into());
    let preset = load_preset(&name)?;
    let preset = match preset {
        Preset::Setup { .. } => {
            let (rest, _, _) = split_feedback_overrides(&common.params);
            apply_overrides(preset, &rest)?
        }
        other => apply_overrides(other, &common.params)?,
    };
    let (outcome, family) = simulate_preset(&preset, common)?;
    // Sample 0 is the initial condition; rows are the states the steps produced.
    let produced = outcome.trace.since(1);
    let csv = trace_csv(&produced);
    let axes = axes.unwrap_or(match family {
        PlotFamily::Neuron => "x,u",
        PlotFamily::Rossler => "x,y",
    });
    let render_svg = || -> CliResult<String> {
        let rows = parse_trace_csv(&csv).map_err(CliError::invalid)?;
        plot_rows(&rows, axes, &name)
    };
    match format {
        Format::Csv => emit(common.out.as_deref(), &name, "csv", &csv, stdout)?,
        _ => emit(common.out.as_deref(), &name, "svg", &render_svg()?, stdout)?,
    }
    if let Some(path) = svg_out {
        emit(Some(path), &name, "svg", &render_svg()?, stdout)?;
    }
    match outcome.diverged_at {
        Some(step) => {
            eprintln!("trajectory diverged at step {step}");
            Ok(EXIT_DIVERGENCE)
        }
        None => Ok(EXIT_OK),
    }
}

fn report_json(reports: &[FixedPointReport]) -> Value {
    json!({
        "fixed_points": reports.iter().map(|r| json!({"x": r.point.x, "y": r.point.y, "u": r.point.u})).collect::<Vec<_>>(),
        "eigenvalues": reports.iter().map(|r| r.eigenvalues.iter().map(|l| json!({"re": l.re, "im": l.im})).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "classifications": reports.iter().map(|r| r.classification.map_or("unclassifiable", |c| c.as_str())).collect::<Vec<_>>(),
    })
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn cmd_analyze(common: &Common, system: Option<SystemArg>, stdout: &mut dyn Write) -> CliResult<i32> {
    check_format(common, &[Format::Json], Format::Json)?;
    let preset = common.preset.as_deref().map(load_preset).transpose()?;
    let system = system.unwrap_or(match &preset {
        Some(Preset::Setup { .. } | Preset::Neuron { .. } | Preset::NdsForm { .. }) => SystemArg::Nds,
        _ => SystemArg::Rossler,
    });
    let mut doc = json!({ "meta": meta("analyze", common) });
    match system {
        SystemArg::Rossler => {
            let mut p = match &preset {
                Some(Preset::Reference { params, .. } | Preset::DiscreteRossler { params, .. }) => *params,
                _ => RosslerParams::default(),
            };
            for (k, v) in &common.params {
                if !set_rossler(&mut p, k, *v) {
                    return Err(unknown_key(k, "rossler"));
                }
            }
            let reports = analyze_rossler(&p)?;
            let lmax = max_abs_eigenvalue_rossler(&p)?;
            merge(&mut doc, report_json(&reports));
            merge(
                &mut doc,
                json!({
                    "system": "rossler",
                    "system_kind": "continuous-flow",
                    "params": p,
                    "max_abs_eigenvalue": lmax,
                    "ts_bound": ts_bound(lmax)?,
                }),
            );
        }
        SystemArg::Nds => {
            let mut p = match &preset {
                Some(Preset::Setup { params, .. } | Preset::Neuron { params, .. } | Preset::NdsForm { params, .. }) => *params,
                _ => NdsParams::default(),
            };
            for (k, v) in &common.params {
                if !set_nds(&mut p, k, *v) {
                    return Err(unknown_key(k, "nds"));
                }
            }
            let reports = analyze_nds(&p)?;
            let lmax = reports
                .iter()
                .flat_map(|r| r.eigenvalues.iter().map(|l| l.norm()))
                .fold(0.0, f64::max);
            merge(&mut doc, report_json(&reports));
            merge(
                &mut doc,
                json!({
                    "system": "nds",
                    "system_kind": "discrete-map",
                    "params": p,
                    "max_abs_eigenvalue": lmax,
                    "ts_bound": Value::Null,
                }),
            );
        }
    }
    let stem = common.preset.clone().unwrap_or_else(|| match system {
        SystemArg::Rossler => "analyze-rossler".into(),
        SystemArg::Nds => "analyze-nds".into(),
    });
    emit(common.out.as_deref(), &stem, "json", &to_json(&doc), stdout)?;
    Ok(EXIT_OK)
}

fn protocol() -> ProtocolConfig {
    ProtocolConfig {
        transient_steps: TRANSIENT_STEPS,
        total_steps: PROTOCOL_STEPS,
        ..ProtocolConfig::default()
    }
}

fn protocol_with_steps(common: &Common) -> CliResult<ProtocolConfig> {
    let mut p = protocol();
    if let Some(steps) = common.steps {
        if steps < p.detection.check_window + p.detection.p_max || steps < p.transient_steps {
            return Err(CliError::invalid(format!(
                "--steps must be at least {}",
                p.detection.check_window + p.detection.p_max
            )));
        }
        p.total_steps = steps;
    }
    Ok(p)
}

fn cmd_sweep(
    common: &Common,
    probe_runs: usize,
    parameter: Option<&str>,
    values: &[f64],
    stdout: &mut dyn Write,
) -> CliResult<i32> {
    check_format(common, &[Format::Csv], Format::Csv)?;
    let (param, grid, stem) = match common.preset.as_deref() {
        Some(name) => match load_preset(name)? {
            Preset::Sweep { param, values: grid, .. } => {
                let grid = if values.is_empty() { grid } else { values.to_vec() };
                (param, grid, name.to_string())
            }
            _ => return Err(CliError::invalid(format!("`{name}` is not a sweep preset"))),
        },
        None => {
            let param: SweepParameter = parameter
                .ok_or_else(|| CliError::invalid("give --preset or --parameter"))?
                .parse()?;
            let grid = if values.is_empty() { presets::sweep_values(param) } else { values.to_vec() };
            (param, grid, format!("sweep-{}", param.label().replace('&', "")))
        }
    };
    let mut base = NdsParams::default();
    for (k, v) in &common.params {
        if !set_nds(&mut base, k, *v) {
            return Err(unknown_key(k, "sweep"));
        }
    }
    let points = sweep_parameter(
        &base,
        param,
        &grid,
        probe_runs,
        common.seed,
        &protocol_with_steps(common)?,
        Execution::default(),
    )?;
    emit(common.out.as_deref(), &stem, "csv", &sweep_csv(param.label(), &points), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_ensemble(common: &Common, runs: usize, histogram: Option<&Path>, stdout: &mut dyn Write) -> CliResult<i32> {
    check_format(common, &[Format::Json], Format::Json)?;
    if runs == 0 {
        return Err(CliError::invalid("--runs must be >= 1"));
    }
    let name = common.preset.clone().unwrap_or_else(|| "setup07".into());
    let (rest, w, tau) = split_feedback_overrides(&common.params);
    if tau.is_some() {
        return Err(CliError::invalid("ensembles cycle tau over the grid; only w can be overridden"));
    }
    let setups = match apply_overrides(load_preset(&name)?, &rest)? {
        Preset::Setup { name, params } => vec![(name, params)],
        Preset::Ensemble { setups, .. } => setups,
        other => return Err(CliError::invalid(format!("`{}` is not an ensemble preset", other.name()))),
    };
    let grid = match w {
        Some(w) => nds_core::upo::delay_cycle_grid(w, presets::ENSEMBLE_MAX_DELAY)?,
        None => presets::ensemble_grid(),
    };
    let proto = protocol_with_steps(common)?;
    let results: Vec<EnsembleResult> = setups
        .iter()
        .map(|(setup_name, params)| {
            run_ensemble(setup_name, params, &grid, runs, common.seed, &proto, Execution::default())
        })
        .collect::<Result<_, _>>()?;
    let doc = json!({
        "meta": meta("ensemble", common),
        "feedback_weight": grid[0].weight,
        "max_delay": grid.len(),
        "results": results,
    });
    emit(common.out.as_deref(), &name, "json", &to_json(&doc), stdout)?;
    if let Some(path) = histogram {
        emit(Some(path), &name, "csv", &histogram_csv(&results), stdout)?;
    }
    Ok(EXIT_OK)
}

fn cmd_plot(common: &Common, inputs: &[PathBuf], axes: Option<&str>, stdout: &mut dyn Write) -> CliResult<i32> {
    check_format(common, &[Format::Svg], Format::Svg)?;
    let is_json = |p: &PathBuf| p.extension().is_some_and(|e| e == "json");
    let svg = if inputs.iter().all(is_json) {
        let mut results: Vec<EnsembleResult> = Vec::new();
        for path in inputs {
            let text = fs::read_to_string(path)?;
            let doc: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            let list = doc
                .get("results")
                .cloned()
                .ok_or_else(|| CliError::invalid(format!("{}: no `results` array", path.display())))?;
            let mut parsed: Vec<EnsembleResult> = serde_json::from_value(list)
                .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
            results.append(&mut parsed);
        }
        let cats: Vec<String> = results.iter().map(|r| r.setup_name.clone()).collect();
        let distinct: Vec<f64> = results.iter().map(|r| r.distinct_upos as f64).collect();
        let stabilized: Vec<f64> = results.iter().map(|r| r.stabilized_runs as f64).collect();
        svg::bar_chart(
            &cats,
            &[("distinct UPOs", distinct), ("stabilized runs", stabilized)],
            "Stabilized orbits per setup",
        )
    } else if inputs.len() == 1 {
        let text = fs::read_to_string(&inputs[0])?;
        let rows = parse_trace_csv(&text).map_err(CliError::invalid)?;
        plot_rows(&rows, axes.unwrap_or("x,u"), &inputs[0].display().to_string())?
    } else {
        return Err(CliError::invalid("give one trace CSV or one or more ensemble JSON files"));
    };
    let stem = common.preset.clone().unwrap_or_else(|| "plot".into());
    emit(common.out.as_deref(), &stem, "svg", &svg, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_calibrate(common: &Common, spikes: usize, stdout: &mut dyn Write) -> CliResult<i32> {
    check_format(common, &[Format::Json], Format::Json)?;
    let mut params = match common.preset.as_deref().map(load_preset).transpose()? {
        Some(Preset::Setup { params, .. } | Preset::Neuron { params, .. }) => params,
        Some(other) => return Err(CliError::invalid(format!("`{}` has no neuron parameters", other.name()))),
        None => NdsParams::default(),
    };
    for (k, v) in &common.params {
        if !set_nds(&mut params, k, *v) {
            return Err(unknown_key(k, "calibrate"));
        }
    }
    let hit = calibrate_feedback(
        &params,
        &calibration_weights(),
        &calibration_delays(),
        spikes,
        common.seed,
        &protocol_with_steps(common)?,
        Execution::default(),
    )?;
    let doc = json!({
        "meta": meta("calibrate", common),
        "target_spikes_per_period": spikes,
        "hit": hit,
    });
    emit(common.out.as_deref(), "calibration", "json", &to_json(&doc), stdout)?;
    Ok(EXIT_OK)
}
