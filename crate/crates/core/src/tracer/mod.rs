//! Independent-sweep baseline, duration path tracing, and multi-path
//! fidelity-time frontiers.
//!
//! A path starts from a random protocol at the longest duration and then walks
//! down the grid, warm-starting every search at the previous optimum with its
//! values grid unchanged and only the duration shortened.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optimizer::{minimize, random_protocol, ConvergedReason, SearchConfig, SearchResult};
use crate::tasks::{TaskObjective, TaskSpec};

/// `path_id` used for points of an independent sweep.
pub const SWEEP_PATH_ID: i64 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    /// Duration in units of `τ`.
    pub duration: f64,
    pub error: f64,
    pub params: Vec<f64>,
    pub iterations: usize,
    pub path_id: i64,
    /// Position of this duration in the grid the point was computed on.
    pub point_index: usize,
    /// Error at the search's starting point.
    pub start_error: f64,
    pub converged_reason: ConvergedReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontierKind {
    IndependentSweep,
    SinglePath,
    MultiPathMin,
}

/// Points sorted by strictly increasing duration.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierCurve {
    pub kind: FrontierKind,
    pub points: Vec<TracePoint>,
}

/// A sweep or path that hit a non-finite objective. `partial` holds the points
/// completed before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFailure {
    pub partial: FrontierCurve,
    pub source: Error,
}

impl std::fmt::Display for TraceFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({} points completed)", self.source, self.partial.points.len())
    }
}

impl std::error::Error for TraceFailure {}

fn point(result: SearchResult, duration: f64, path_id: i64, point_index: usize) -> TracePoint {
    TracePoint {
        duration,
        error: result.best_error,
        params: result.best_params,
        iterations: result.iterations,
        path_id,
        point_index,
        start_error: result.start_error,
        converged_reason: result.converged_reason,
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Argument("grid durations must be positive".into()));
    }
    let increasing = grid.windows(2).all(|w| w[0] < w[1]);
    let decreasing = grid.windows(2).all(|w| w[0] > w[1]);
    if !(increasing || decreasing) {
        return Err(Error::Argument("grid must be strictly monotone".into()));
    }
    Ok(())
}

fn sorted(kind: FrontierKind, mut points: Vec<TracePoint>) -> FrontierCurve {
    points.sort_by(|a, b| a.duration.total_cmp(&b.duration));
    FrontierCurve { kind, points }
}

/// One cold-started search per grid duration, initialized from
/// `random_protocol(task, config, grid index)`. Points run in parallel on the
/// ambient rayon pool; results do not depend on the pool size.
pub fn independent_sweep(
    task: &TaskSpec,
    grid: &[f64],
    config: &SearchConfig,
) -> std::result::Result<FrontierCurve, TraceFailure> {
    let fail = |source| TraceFailure { partial: sorted(FrontierKind::IndependentSweep, Vec::new()), source };
    check_grid(grid).map_err(fail)?;
    let results: Vec<Result<TracePoint>> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &duration)| {
            let x0 = random_protocol(task, config, index as u64);
            let objective = TaskObjective { task, duration };
            minimize(&objective, &x0, config).map(|r| point(r, duration, SWEEP_PATH_ID, index))
        })
        .collect();
    let mut points = Vec::with_capacity(grid.len());
    let mut failure = None;
    for r in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    let curve = sorted(FrontierKind::IndependentSweep, points);
    match failure {
        None => Ok(curve),
        Some(source) => Err(TraceFailure { partial: curve, source }),
    }
}

/// Traces one path down a descending grid. The first point starts from
/// `random_protocol(task, config, path_id)`; every later point starts from the
/// previous point's parameters at the new duration. Non-improving points are
/// kept.
pub fn trace_path(
    task: &TaskSpec,
    grid: &[f64],
    config: &SearchConfig,
    path_id: u64,
) -> std::result::Result<FrontierCurve, TraceFailure> {
    let mut points: Vec<TracePoint> = Vec::with_capacity(grid.len());
    let fail = |points: Vec<TracePoint>, source| TraceFailure {
        partial: sorted(FrontierKind::SinglePath, points),
        source,
    };
    if let Err(e) = check_grid(grid) {
        return Err(fail(points, e));
    }
    if grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(fail(points, Error::Argument("path grid must be descending".into())));
    }
    for (index, &duration) in grid.iter().enumerate() {
        let x0 = match points.last() {
            Some(prev) => prev.params.clone(),
            None => random_protocol(task, config, path_id),
        };
        let objective = TaskObjective { task, duration };
        match minimize(&objective, &x0, config) {
            Ok(r) => points.push(point(r, duration, path_id as i64, index)),
            Err(e) => return Err(fail(points, e)),
        }
    }
    Ok(sorted(FrontierKind::SinglePath, points))
}

/// Traces paths `0..n_paths` in parallel on the ambient rayon pool. Results are
/// in path order.
pub fn trace_paths(
    task: &TaskSpec,
    grid: &[f64],
    config: &SearchConfig,
    n_paths: usize,
) -> Vec<std::result::Result<FrontierCurve, TraceFailure>> {
    (0..n_paths as u64)
        .into_par_iter()
        .map(|id| trace_path(task, grid, config, id))
        .collect()
}

/// Pointwise minimum error over paths, on the durations shared by every path.
/// Each point keeps the `path_id` of the path that won it; ties go to the
/// earlier path.
pub fn multi_path_frontier(paths: &[FrontierCurve]) -> Result<FrontierCurve> {
    let Some((first, rest)) = paths.split_first() else {
        return Ok(FrontierCurve { kind: FrontierKind::MultiPathMin, points: Vec::new() });
    };
    let mut points = Vec::new();
    for p in &first.points {
        let mut best = p;
        let mut everywhere = true;
        for other in rest {
            match other.points.iter().find(|q| q.duration == p.duration) {
                Some(q) => {
                    if q.error < best.error {
                        best = q;
                    }
                }
                None => {
                    everywhere = false;
                    break;
                }
            }
        }
        if everywhere {
            points.push(best.clone());
        }
    }
    if points.is_empty() && !first.points.is_empty() {
        return Err(Error::GridMismatch);
    }
    Ok(sorted(FrontierKind::MultiPathMin, points))
}

/// Smallest duration `T` such that every point with duration `≥ T` has error
/// `≤ threshold`; `None` if even the longest duration misses the threshold.
pub fn detect_critical_time(curve: &FrontierCurve, threshold: f64) -> Option<f64> {
    let mut critical = None;
    for p in curve.points.iter().rev() {
        if p.error > threshold {
            break;
        }
        critical = Some(p.duration);
    }
    critical
}

/// Uniform descending grid of `points` durations from `start` to `end`
/// inclusive (`[start]` when `points == 1`).
pub fn uniform_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (start - end) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { end } else { start - step * i as f64 })
                .collect()
        }
    }
}
