//! JSON reports and atomic file output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::claims::fingerprint;
use crate::error::Result;
use crate::formulation::{ModelKind, ModelOptions};
use crate::instance::Instance;
use crate::milp::{SearchStats, Solution, SolveStatus};

/// Values at or below this magnitude are left out of reports.
pub const REPORT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub model: ModelKind,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub options: ModelOptions,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baselines: Option<Vec<f64>>,
    pub open_hubs: Vec<usize>,
    pub collaborative_hubs: Vec<usize>,
    pub noncollaborative_hubs: Vec<usize>,
    /// Nonzero variable values by name.
    pub values: BTreeMap<String, f64>,
    pub stats: SearchStats,
}

impl SolveReport {
    pub fn new(inst: &Instance, kind: ModelKind, opts: &ModelOptions, sol: &Solution, baselines: Option<&[f64]>) -> Self {
        Self {
            model: kind,
            status: sol.status,
            objective: sol.is_optimal().then_some(sol.objective),
            options: *opts,
            instance: fingerprint(inst),
            baselines: baselines.map(<[f64]>::to_vec),
            open_hubs: sol.open_hubs.clone(),
            collaborative_hubs: sol.collaborative_hubs.clone(),
            noncollaborative_hubs: sol.noncollaborative_hubs.clone(),
            values: sol
                .names
                .iter()
                .zip(&sol.values)
                .filter(|(_, v)| v.abs() > REPORT_EPS)
                .map(|(n, &v)| (n.clone(), v))
                .collect(),
            stats: sol.stats.clone(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
