//! Deterministic artifact rendering.

use std::io::Write;
use std::path::PathBuf;

use super::CliError;

/// Shortest round-trip decimal rendering of an `f64` (at most 17 significant
/// digits, always enough to reconstruct the exact value). Identical inputs
/// render byte-identically.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Write the command's main artifact to `--output` or standard output.
pub fn write_artifact(out: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Failure(format!("writing {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .map_err(|e| CliError::Failure(format!("writing stdout: {e}")))
        }
    }
}
