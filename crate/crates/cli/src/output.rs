//! CSV rendering and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use pathtrace::tracer::TracePoint;

pub const POINT_COLUMNS: [&str; 6] =
    ["path_id", "point_index", "T_over_tau", "epsilon", "iterations", "converged_reason"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn points_csv(points: &[TracePoint], n_params: usize) -> String {
    let mut out = POINT_COLUMNS.join(",");
    for k in 1..=n_params {
        write!(out, ",p_{k}").unwrap();
    }
    out.push('\n');
    for p in points {
        write!(
            out,
            "{},{},{},{},{},{}",
            p.path_id,
            p.point_index,
            float(p.duration),
            float(p.error),
            p.iterations,
            p.converged_reason
        )
        .unwrap();
        for v in &p.params {
            write!(out, ",{}", float(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the target directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `<prefix><suffix>` as a path.
pub fn with_suffix(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}
