//! The run manifest: config fingerprint, seed, versions, wall clock, and
//! the output file list. Written exactly once per run.

use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

pub fn config_sha256(config_bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Render the manifest (key=value lines). The wall clock stamps the run;
/// the CSVs themselves are byte-reproducible, the manifest is not.
pub fn render(
    cfg: &ScenarioConfig,
    config_bytes: &[u8],
    files: &[String],
    wall_seconds: f64,
) -> String {
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!("scenario={}\n", cfg.scenario));
    out.push_str(&format!("config_sha256={}\n", config_sha256(config_bytes)));
    out.push_str(&format!("master_seed={}\n", cfg.integrator.master_seed));
    out.push_str(&format!("engine_version={}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("wallclock_unix={unix}\n"));
    out.push_str(&format!("wall_seconds={wall_seconds:.3}\n"));
    for f in files {
        out.push_str(&format!("file={f}\n"));
    }
    out
}
