//! Raw little-endian complex128 samples plus a JSON sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, Grid, Space};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotMeta {
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
    pub space: Space,
    pub time: f64,
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn save_field(path: &Path, field: &Field, time: f64) -> Result<()> {
    let mut bytes = Vec::with_capacity(field.values.len() * 16);
    for v in &field.values {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    let meta = SnapshotMeta {
        dim: field.grid.dim(),
        n: field.grid.n(),
        half_width: field.grid.half_width(),
        space: field.space,
        time,
    };
    write_atomic(path, &bytes)?;
    write_atomic(&sidecar(path), serde_json::to_string_pretty(&meta)?.as_bytes())
}

pub fn load_field(path: &Path) -> Result<(Field, SnapshotMeta)> {
    let meta: SnapshotMeta = serde_json::from_slice(&fs::read(sidecar(path))?)?;
    let bytes = fs::read(path)?;
    let grid = Grid::new(meta.dim, meta.n, meta.half_width)?;
    if bytes.len() != grid.len() * 16 {
        return Err(Error::GridMismatch(format!(
            "{} bytes on disk, expected {}",
            bytes.len(),
            grid.len() * 16
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((Field::new(grid, values, meta.space)?, meta))
}
