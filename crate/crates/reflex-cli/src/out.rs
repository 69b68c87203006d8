//! Output handling: data goes to stdout or an `--out` file written through a
//! temp file and an atomic rename, so failures never leave partial output.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Write data bytes to `--out` (atomically) or stdout.
pub fn write_data(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Runtime(format!("failed to write to stdout: {e}"))),
    }
}

/// Write to a temp file next to the target, then rename over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Runtime(format!("failed to create {}: {e}", parent.display())))?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?
        .to_string_lossy();
    let tmp = path.with_file_name(format!(".{file_name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::Runtime(format!("failed to write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::Runtime(format!("failed to finalize {}: {e}", path.display()))
    })
}

/// Stage progress line on stderr unless `--quiet`.
pub fn progress(quiet: bool, message: impl AsRef<str>) {
    if !quiet {
        eprintln!("{}", message.as_ref());
    }
}
