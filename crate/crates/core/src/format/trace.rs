//! JSON Lines trace files: one header line, then one line per event.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::value_to_json;
use crate::engine::Trace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub seed: u64,
    pub policy: String,
    pub net_digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub step: usize,
    pub transition: String,
    pub binding: BTreeMap<String, Value>,
    pub marking_digest: String,
}

pub fn records(trace: &Trace) -> Vec<TraceRecord> {
    trace
        .steps
        .iter()
        .map(|s| TraceRecord {
            step: s.index,
            transition: s.transition.clone(),
            binding: s.binding.iter().map(|(k, v)| (k.clone(), value_to_json(v))).collect(),
            marking_digest: s.digest.clone(),
        })
        .collect()
}

pub fn write_trace(out: &mut dyn Write, trace: &Trace, net_digest: &str) -> io::Result<()> {
    let header = TraceHeader {
        seed: trace.seed,
        policy: trace.policy.as_str().into(),
        net_digest: net_digest.into(),
    };
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    for r in records(trace) {
        writeln!(out, "{}", serde_json::to_string(&r)?)?;
    }
    Ok(())
}

fn is_hex_digest(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// Parse a trace file and check that steps are contiguous from 0 and that
/// every digest is 64 lowercase hex characters.
pub fn read_trace(src: &str) -> Result<(TraceHeader, Vec<TraceRecord>), String> {
    let mut lines = src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or("empty trace file")?;
    let header: TraceHeader = serde_json::from_str(first).map_err(|e| format!("line 1: {e}"))?;
    if !is_hex_digest(&header.net_digest) {
        return Err("line 1: net_digest is not a lowercase hex SHA-256".into());
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let r: TraceRecord = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        if r.step != out.len() {
            return Err(format!("line {}: step {} out of sequence", i + 1, r.step));
        }
        if !is_hex_digest(&r.marking_digest) {
            return Err(format!("line {}: marking_digest is not a lowercase hex SHA-256", i + 1));
        }
        out.push(r);
    }
    Ok((header, out))
}
