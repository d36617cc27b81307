//! Run traces and their CSV form.
//!
//! Body columns: `outer,inner,wall_ns,ifo,iso,f,grad_norm,min_eig,phase`.
//! Reals carry 17 significant digits so a parsed-back file reproduces the
//! rows exactly. The `wall_ns` column is a deterministic virtual clock
//! (oracle calls times a fixed per-call cost) so that identical runs produce
//! byte-identical bodies; measured wall time goes into `#`-prefixed header
//! comments instead.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{OptError, Result};
use crate::oracle::OracleCounters;
use crate::scalar::Scalar;

/// Virtual nanoseconds charged per oracle call in the trace clock.
pub const VIRTUAL_NANOS_PER_CALL: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Gfo,
    Hfo,
    Check,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Gfo => "gfo",
            Phase::Hfo => "hfo",
            Phase::Check => "check",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        match s {
            "gfo" => Some(Phase::Gfo),
            "hfo" => Some(Phase::Hfo),
            "check" => Some(Phase::Check),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T> {
    pub outer: u64,
    pub inner: u64,
    pub wall_ns: u64,
    pub ifo: u64,
    pub iso: u64,
    pub f: T,
    pub grad_norm: T,
    pub min_eig: Option<T>,
    pub phase: Phase,
}

impl<T: Scalar> TraceRow<T> {
    pub fn new(
        outer: u64,
        inner: u64,
        counters: OracleCounters,
        f: T,
        grad_norm: T,
        min_eig: Option<T>,
        phase: Phase,
    ) -> Self {
        TraceRow {
            outer,
            inner,
            wall_ns: (counters.ifo_calls + counters.iso_calls) * VIRTUAL_NANOS_PER_CALL,
            ifo: counters.ifo_calls,
            iso: counters.iso_calls,
            f,
            grad_norm,
            min_eig,
            phase,
        }
    }
}

pub const TRACE_HEADER: &str = "outer,inner,wall_ns,ifo,iso,f,grad_norm,min_eig,phase";

/// 17-significant-digit scientific form; round-trips f64 exactly.
pub fn fmt_real<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.to_f64().expect("scalar convertible to f64"))
}

fn io_err(path: &Path, source: std::io::Error) -> OptError {
    OptError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes header comments (`# key = value`), the column header and rows.
pub fn write_trace<T: Scalar>(
    path: &Path,
    header_comments: &[(String, String)],
    rows: &[TraceRow<T>],
) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = |line: String| -> Result<()> {
        writeln!(w, "{line}").map_err(|e| io_err(path, e))
    };
    for (k, v) in header_comments {
        emit(format!("# {k} = {v}"))?;
    }
    emit(TRACE_HEADER.to_string())?;
    for r in rows {
        let min_eig = r.min_eig.map(fmt_real).unwrap_or_default();
        emit(format!(
            "{},{},{},{},{},{},{},{},{}",
            r.outer,
            r.inner,
            r.wall_ns,
            r.ifo,
            r.iso,
            fmt_real(r.f),
            fmt_real(r.grad_norm),
            min_eig,
            r.phase.as_str()
        ))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Parses a trace file back into comments and rows.
pub fn read_trace<T: Scalar>(path: &Path) -> Result<(Vec<(String, String)>, Vec<TraceRow<T>>)> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    let mut saw_header = false;
    let bad = |reason: &str| OptError::Format {
        path: path.display().to_string(),
        reason: reason.to_string(),
    };
    for line in reader.lines() {
        let line = line.map_err(|e| io_err(path, e))?;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                comments.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if !saw_header {
            if line.trim() != TRACE_HEADER {
                return Err(bad("missing column header"));
            }
            saw_header = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 9 {
            return Err(bad("wrong column count"));
        }
        let parse_u = |s: &str| s.parse::<u64>().map_err(|_| bad("bad integer field"));
        let parse_f = |s: &str| -> Result<T> {
            let v: f64 = s.parse().map_err(|_| bad("bad real field"))?;
            Ok(crate::scalar::real(v))
        };
        rows.push(TraceRow {
            outer: parse_u(parts[0])?,
            inner: parse_u(parts[1])?,
            wall_ns: parse_u(parts[2])?,
            ifo: parse_u(parts[3])?,
            iso: parse_u(parts[4])?,
            f: parse_f(parts[5])?,
            grad_norm: parse_f(parts[6])?,
            min_eig: if parts[7].is_empty() {
                None
            } else {
                Some(parse_f(parts[7])?)
            },
            phase: Phase::parse(parts[8]).ok_or_else(|| bad("unknown phase tag"))?,
        });
    }
    if !saw_header {
        return Err(bad("empty file"));
    }
    Ok((comments, rows))
}
