//! Command-line laboratory around `curvlab-core`: example evaluation,
//! parameter sweeps, integral tables, flow runs and the acceptance checks.
//!
//! The binary is a thin wrapper over [`run`]; everything it writes goes
//! through the format modules here so tests can read the artifacts back.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;
pub mod snapshot;
pub mod svg;

pub use cli::run;
pub use curvlab_verify as criteria;
pub use error::{CliError, ExitStatus};

/// Size the global rayon pool from `CURVLAB_THREADS` when it is set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CURVLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("CURVLAB_THREADS must be a positive integer, got {raw:?}")))?;
    // a pool built earlier in the same process wins; that is fine for tests
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
