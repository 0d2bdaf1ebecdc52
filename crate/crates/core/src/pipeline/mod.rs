//! Configuration-driven runs: atom fitting, R scans, vibrational analysis,
//! comparison against reference tables and plot data. Every artifact starts
//! with `#` lines holding the effective configuration.

pub mod analysis;
pub mod config;
pub mod fit;
pub mod scan;

pub use analysis::{
    computed_row, plot_data, run_compare, run_vcc_table, run_vib, vcc_csv, vib_file, ComparisonReport, ComparisonRow,
    ComputedRow, OrderingCheck, VccRow, VibOutcome,
};
pub use config::{GridSpec, JobConfig, NumericsConfig, StateName, VibConfig};
pub use fit::{run_atom_fit, AtomFitOutcome, FIT_TARGETS};
pub use scan::{
    dipole_file, energy_file, load_centers, run_scan, scan_points, state_curves, v_file, vprime_file, PointOutcome,
    PointValues, ScanOutcome, StateCurves, SUMMARY_HEADER,
};

use crate::{Error, Result};
use std::path::{Path, PathBuf};

/// Writes `# header` lines followed by `body`.
pub fn write_artifact(dir: &Path, name: &str, header: &[String], body: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let mut text = String::new();
    for h in header {
        for line in h.lines() {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
    }
    text.push_str(body);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
