//! Output plumbing shared by the subcommands: deterministic report bodies
//! written under the output directory, plus a run manifest that echoes the
//! resolved configuration. The manifest is the only file carrying a
//! timestamp, so rerunning a seeded command reproduces every report body
//! byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Write one report body under the output directory, creating it if needed.
pub fn write_text(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Write the run manifest: tool version, creation time, command, and every
/// resolved `key = value` setting.
pub fn write_manifest(dir: &Path, command: &str, entries: &[(String, String)]) -> Result<()> {
    let mut body = String::new();
    let _ = writeln!(body, "# agora run manifest");
    let _ = writeln!(body, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        body,
        "created_utc = {}",
        chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ")
    );
    let _ = writeln!(body, "command = {command}");
    for (key, value) in entries {
        let _ = writeln!(body, "{key} = {value}");
    }
    write_text(dir, "manifest.txt", &body)?;
    Ok(())
}
