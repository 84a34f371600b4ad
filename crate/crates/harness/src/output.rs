//! CSV writers. Floats are written with 17 significant digits so every value
//! round-trips exactly.

use std::fmt::Write as _;

use nds_core::upo::{EnsembleResult, SweepPoint};
use nds_core::Trace;

pub const TRACE_HEADER: &str = "t,x,y,u,gamma";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes every sample of `trace` as `t,x,y,u,gamma`.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(trace.len() * 96 + 16);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (t, s, g) in trace.iter() {
        let _ = writeln!(
            out,
            "{t},{},{},{},{}",
            fmt_f64(s.x),
            fmt_f64(s.y),
            fmt_f64(s.u),
            g as u8
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub gamma: u8,
}

/// Parses a trace CSV back into rows.
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRACE_HEADER => {}
        _ => return Err(format!("expected header `{TRACE_HEADER}`")),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(format!("row {}: expected 5 fields", i + 1));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1));
            Ok(TraceRow {
                t: f[0].trim().parse().map_err(|e| format!("row {}: {e}", i + 1))?,
                x: num(f[1])?,
                y: num(f[2])?,
                u: num(f[3])?,
                gamma: f[4].trim().parse().map_err(|e| format!("row {}: {e}", i + 1))?,
            })
        })
        .collect()
}

pub fn sweep_csv(parameter: &str, points: &[SweepPoint]) -> String {
    let mut out = String::from("parameter,value,valid,bounded_runs,probe_runs\n");
    for p in points {
        let _ = writeln!(
            out,
            "{parameter},{},{},{},{}",
            p.value, p.valid, p.bounded_runs, p.probe_runs
        );
    }
    out
}

pub fn histogram_csv(results: &[EnsembleResult]) -> String {
    let mut out = String::from("setup,period,count\n");
    for r in results {
        for (period, count) in &r.period_histogram {
            let _ = writeln!(out, "{},{period},{count}", r.setup_name);
        }
    }
    out
}
