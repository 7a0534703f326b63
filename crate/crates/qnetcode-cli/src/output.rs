//! File output helpers: atomic writes and the repository-wide float
//! rendering (15 significant digits, scientific notation).

use std::io::Write;
use std::path::Path;

/// Writes `bytes` to `path` atomically: the content lands in a temporary
/// file in the same directory and is renamed into place, so readers never
/// observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Renders a float with 15 significant digits, matching the file formats.
pub fn fmt_float(x: f64) -> String {
    format!("{:.14e}", x)
}
