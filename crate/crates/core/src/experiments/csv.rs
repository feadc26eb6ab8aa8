//! Plain CSV output for traces and snapshots.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, so re-reading a file reproduces the stored values exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::dynamics::{Snapshot, TraceRecord};
use crate::error::{Error, Result};
use crate::point::Point;

pub const TRACE_HEADER: &str = "step,time,energy,grad_norm,mean_sq_dist";

/// Shortest round-trip decimal; exponent form only for extreme magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn snapshot_header(dim: usize) -> String {
    let mut h = String::from("time,particle");
    for k in 0..dim {
        let _ = write!(h, ",x{k}");
    }
    h
}

pub fn trace_csv(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.step,
            fmt_f64(r.time),
            fmt_f64(r.energy),
            fmt_f64(r.grad_norm),
            fmt_f64(r.mean_sq_dist)
        );
    }
    out
}

pub fn snapshots_csv(snapshots: &[Snapshot]) -> String {
    let dim = snapshots.first().and_then(|s| s.positions.first()).map_or(1, Point::dim);
    let mut out = snapshot_header(dim);
    out.push('\n');
    for s in snapshots {
        let t = fmt_f64(s.time);
        for (i, p) in s.positions.iter().enumerate() {
            let _ = write!(out, "{t},{i}");
            for c in p.coords() {
                let _ = write!(out, ",{}", fmt_f64(*c));
            }
            out.push('\n');
        }
    }
    out
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// One `(time, positions)` block per stored snapshot, in file order.
pub fn parse_snapshots(text: &str) -> Result<Vec<(f64, Vec<Point>)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty snapshot file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let dim = cols.len().saturating_sub(2);
    if !(1..=2).contains(&dim) || cols[..] != snapshot_header(dim).split(',').collect::<Vec<_>>()[..] {
        return Err(Error::Parse(format!("unexpected snapshot header {header:?}")));
    }
    let mut blocks: Vec<(f64, Vec<Point>)> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let bad = |what: &str| Error::Parse(format!("line {}: {what}: {line:?}", lineno + 2));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 2 {
            return Err(bad("wrong number of fields"));
        }
        let time: f64 = fields[0].parse().map_err(|_| bad("bad time"))?;
        let index: usize = fields[1].parse().map_err(|_| bad("bad particle index"))?;
        let coords = fields[2..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| bad("bad coordinate")))
            .collect::<Result<Vec<_>>>()?;
        let point = Point::from_slice(&coords).map_err(|_| bad("bad coordinate"))?;
        if index == 0 {
            blocks.push((time, Vec::new()));
        }
        match blocks.last_mut() {
            Some((t, pts)) if *t == time && pts.len() == index => pts.push(point),
            _ => return Err(bad("particle indices must count up from 0 within a time block")),
        }
    }
    if blocks.is_empty() {
        return Err(Error::Parse("snapshot file holds no particles".into()));
    }
    Ok(blocks)
}

pub fn read_snapshots(path: &Path) -> Result<Vec<(f64, Vec<Point>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_snapshots(&text)
}
