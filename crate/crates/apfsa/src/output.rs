//! CSV emission for campaign statistics and planner traces.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use apfsa_core::{PlanResult, Vec3};
use serde::Deserialize;

use crate::campaign::TrialStats;

pub const STATS_HEADER: [&str; 8] = [
    "algorithm",
    "n_runs",
    "n_reached",
    "best",
    "worst",
    "mean",
    "mean_steps",
    "mean_elapsed",
];

pub const TRACE_HEADER: [&str; 11] = [
    "step",
    "x",
    "y",
    "z",
    "Fax",
    "Fay",
    "Faz",
    "Frx",
    "Fry",
    "Frz",
    "escape_flag",
];

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl OutputError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        OutputError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn csv(path: &Path, source: csv::Error) -> Self {
        OutputError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Fixed nine-decimal rendering used by every numeric CSV cell.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.9}")
}

/// One parsed row of a stats file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StatsRecord {
    pub algorithm: String,
    pub n_runs: usize,
    pub n_reached: usize,
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    pub mean_steps: f64,
    pub mean_elapsed: f64,
}

impl StatsRecord {
    pub fn from_stats(s: &TrialStats) -> Self {
        StatsRecord {
            algorithm: s.algorithm.as_str().to_owned(),
            n_runs: s.n_runs,
            n_reached: s.n_reached,
            best: s.best,
            worst: s.worst,
            mean: s.mean,
            mean_steps: s.mean_steps,
            mean_elapsed: s.mean_elapsed,
        }
    }
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>, OutputError> {
    let file = File::create(path).map_err(|e| OutputError::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

fn finish(path: &Path, writer: csv::Writer<BufWriter<File>>) -> Result<(), OutputError> {
    let mut inner = writer
        .into_inner()
        .map_err(|e| OutputError::io(path, e.into_error()))?;
    inner.flush().map_err(|e| OutputError::io(path, e))
}

pub fn write_stats_csv(stats: &[TrialStats], path: impl AsRef<Path>) -> Result<(), OutputError> {
    let path = path.as_ref();
    let mut w = create(path)?;
    w.write_record(STATS_HEADER)
        .map_err(|e| OutputError::csv(path, e))?;
    for s in stats {
        let row = [
            s.algorithm.as_str().to_owned(),
            s.n_runs.to_string(),
            s.n_reached.to_string(),
            fmt_f64(s.best),
            fmt_f64(s.worst),
            fmt_f64(s.mean),
            fmt_f64(s.mean_steps),
            fmt_f64(s.mean_elapsed),
        ];
        w.write_record(&row)
            .map_err(|e| OutputError::csv(path, e))?;
    }
    finish(path, w)
}

pub fn read_stats_csv(path: impl AsRef<Path>) -> Result<Vec<StatsRecord>, OutputError> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| OutputError::csv(path, e))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| OutputError::csv(path, e))
}

/// Writes one row per waypoint. Sampling planners carry no forces, so their
/// force columns are zero.
pub fn write_trace_csv(result: &PlanResult, path: impl AsRef<Path>) -> Result<(), OutputError> {
    let path = path.as_ref();
    let mut w = create(path)?;
    w.write_record(TRACE_HEADER)
        .map_err(|e| OutputError::csv(path, e))?;
    for (i, p) in result.waypoints.iter().enumerate() {
        let (fa, fr) = result
            .forces
            .get(i)
            .map_or((Vec3::ZERO, Vec3::ZERO), |f| (f.attractive, f.repulsive));
        let mut row = vec![i.to_string()];
        row.extend([p.x, p.y, p.z, fa.x, fa.y, fa.z, fr.x, fr.y, fr.z].map(fmt_f64));
        row.push(u8::from(result.is_escape(i)).to_string());
        w.write_record(&row)
            .map_err(|e| OutputError::csv(path, e))?;
    }
    finish(path, w)
}
