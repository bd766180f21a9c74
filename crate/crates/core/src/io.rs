//! Trace CSV and key-value report files.
//!
//! Trace columns: `time,graph_index,lyapunov,sync_error,x_0_0,...,x_{N-1}_{n}`,
//! one row per kept sample, floats in scientific notation with 17 significant
//! digits. Reports are `key = value` lines with dotted keys.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::analysis::{CertificateReport, Containment};
use crate::dynamics::Trace;
use crate::network::SwitchingSignal;

pub fn trace_header(n_agents: usize, sphere_dim: usize) -> String {
    let mut h = String::from("time,graph_index,lyapunov,sync_error");
    for i in 0..n_agents {
        for k in 0..=sphere_dim {
            write!(h, ",x_{i}_{k}").unwrap();
        }
    }
    h
}

/// Indices of the samples written with the given stride: every `stride`-th,
/// the first sample of each interval, and the last.
pub fn kept_samples(trace: &Trace, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let n = trace.samples.len();
    (0..n)
        .filter(|&k| {
            k % stride == 0
                || k + 1 == n
                || trace.samples[k].interval != trace.samples[k - 1].interval
        })
        .collect()
}

pub fn write_trace_csv<W: Write>(out: &mut W, trace: &Trace, stride: usize) -> io::Result<()> {
    let mut w = io::BufWriter::new(out);
    writeln!(w, "{}", trace_header(trace.n_agents, trace.sphere_dim))?;
    let mut line = String::new();
    for k in kept_samples(trace, stride) {
        let s = &trace.samples[k];
        line.clear();
        write!(
            line,
            "{:.16e},{},{:.16e},{:.16e}",
            s.time, s.graph_index, s.lyapunov, s.sync_error
        )
        .unwrap();
        for v in &s.states {
            write!(line, ",{v:.16e}").unwrap();
        }
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn trace_csv_string(trace: &Trace, stride: usize) -> String {
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, trace, stride).expect("writing to memory");
    String::from_utf8(buf).expect("trace is ASCII")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub time: f64,
    pub graph_index: usize,
    pub lyapunov: f64,
    pub sync_error: f64,
    pub states: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

/// Reads a trace written by [`write_trace_csv`], refusing any other header.
pub fn read_trace_csv(
    text: &str,
    n_agents: usize,
    sphere_dim: usize,
) -> Result<Vec<TraceRow>, FormatError> {
    let err = |line: usize, message: String| FormatError { line, message };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    if header != trace_header(n_agents, sphere_dim) {
        return Err(err(1, "header does not match the trace format".into()));
    }
    let width = 4 + n_agents * (sphere_dim + 1);
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let no = k + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(err(no, format!("expected {width} fields, found {}", fields.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(no, format!("not a number: {s:?}")))
        };
        rows.push(TraceRow {
            time: num(fields[0])?,
            graph_index: fields[1]
                .parse()
                .map_err(|_| err(no, format!("not a graph index: {:?}", fields[1])))?,
            lyapunov: num(fields[2])?,
            sync_error: num(fields[3])?,
            states: fields[4..].iter().map(|f| num(f)).collect::<Result<_, _>>()?,
        });
    }
    Ok(rows)
}

/// Switch instants and graph indices, `time,graph_index` per row.
pub fn signal_csv_string(signal: &SwitchingSignal, horizon: f64) -> String {
    let mut s = String::from("time,graph_index\n");
    for (t, g) in signal.switch_times().iter().zip(signal.graph_indices()) {
        if *t <= horizon {
            writeln!(s, "{t:.16e},{g}").unwrap();
        }
    }
    s
}

/// Ordered `key = value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(pub Vec<(String, String)>);

impl KeyValues {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn push_f64(&mut self, key: impl Into<String>, v: f64) {
        self.push(key, fmt_f64(v));
    }

    pub fn extend(&mut self, other: KeyValues) {
        self.0.extend(other.0);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }
}

/// Shortest round-trip form, `inf`, `-inf` or `nan`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn report_entries(r: &CertificateReport) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("verdict", r.verdict.name());
    kv.push("hypotheses.certified", r.hypotheses_certified());
    kv.push("hypotheses.graphs", r.graph_connected.len());
    for (k, c) in r.graph_connected.iter().enumerate() {
        kv.push(format!("hypotheses.graph_connected.{k}"), c);
    }
    kv.push("hypotheses.active_graphs_connected", r.active_graphs_connected);
    match &r.dwell {
        None => kv.push("hypotheses.dwell.declared", false),
        Some(d) => {
            kv.push("hypotheses.dwell.declared", true);
            kv.push("hypotheses.dwell.ok", d.ok);
            kv.push_f64("hypotheses.dwell.worst_tau", d.worst_pair.0);
            kv.push_f64("hypotheses.dwell.worst_t", d.worst_pair.1);
            kv.push_f64("hypotheses.dwell.margin", d.margin);
        }
    }
    kv.push("hypotheses.shaping_admissible", r.shaping_admissible);
    match &r.initial_containment {
        Containment::Certified { pole } => {
            kv.push("hypotheses.initial_containment", "certified");
            for (k, v) in pole.as_slice().iter().enumerate() {
                kv.push_f64(format!("hypotheses.initial_containment.pole.{k}"), *v);
            }
        }
        Containment::Uncertified => kv.push("hypotheses.initial_containment", "uncertified"),
    }
    kv.push_f64("conclusion.epsilon", r.epsilon);
    kv.push_f64("conclusion.final_sync_error", r.final_sync_error);
    match r.time_to_epsilon {
        Some(t) => kv.push_f64("conclusion.time_to_epsilon", t),
        None => kv.push("conclusion.time_to_epsilon", "none"),
    }
    kv.push("conclusion.monotonicity_violations", r.monotonicity_violations);
    kv.push("conclusion.truncated", r.truncated);
    kv
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, FormatError> {
    let mut map = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once(" = ").ok_or_else(|| FormatError {
            line: k + 1,
            message: "expected `key = value`".into(),
        })?;
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(FormatError {
                line: k + 1,
                message: format!("duplicate key {key}"),
            });
        }
    }
    Ok(map)
}
