//! Command-line runner for spin-dependent mean arrival times: single point
//! current evaluations, velocity sweeps written as CSV, validation reports
//! and plot-script generation.

pub mod config;
pub mod csv_out;
pub mod plotscript;
pub mod point;
pub mod sweep;
pub mod validate;

use std::path::{Path, PathBuf};

/// Directory for sweep output when `--out` is not given.
pub const OUT_DIR_ENV: &str = "SPINARRIVAL_OUT_DIR";

/// `file_name` inside `$SPINARRIVAL_OUT_DIR`, or the working directory.
pub fn default_output(env_dir: Option<&Path>, file_name: &str) -> PathBuf {
    match env_dir {
        Some(d) => d.join(file_name),
        None => PathBuf::from(file_name),
    }
}
