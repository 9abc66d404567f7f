//! Raw little-endian `f64` arrays with a JSON sidecar `{shape, dtype}`, and
//! one-column CSV signals.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub shape: Vec<usize>,
    pub dtype: String,
}

/// `<path>.json` next to `<path>`, e.g. `solution.f64.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn write_f64(path: &Path, data: &[f64], shape: &[usize]) -> Result<()> {
    let count: usize = shape.iter().product();
    if count != data.len() {
        return Err(Error::Parameter(format!(
            "shape {shape:?} holds {count} values but {} were given",
            data.len()
        )));
    }
    let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    let meta = Sidecar {
        shape: shape.to_vec(),
        dtype: "f64".into(),
    };
    let side = sidecar_path(path);
    fs::write(&side, serde_json::to_string_pretty(&meta)?)
        .map_err(|e| Error::io(format!("writing {}", side.display()), e))
}

pub fn read_f64(path: &Path) -> Result<(Vec<f64>, Vec<usize>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Parameter(format!(
            "{} has {} bytes, not a whole number of f64 values",
            path.display(),
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let side = sidecar_path(path);
    let shape = match fs::read_to_string(&side) {
        Ok(text) => {
            let meta: Sidecar = serde_json::from_str(&text)?;
            if meta.dtype != "f64" {
                return Err(Error::Parameter(format!("unsupported dtype {}", meta.dtype)));
            }
            if meta.shape.iter().product::<usize>() != data.len() {
                return Err(Error::Parameter(format!(
                    "sidecar shape {:?} does not match {} values",
                    meta.shape,
                    data.len()
                )));
            }
            meta.shape
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => vec![data.len()],
        Err(e) => return Err(Error::io(format!("reading {}", side.display()), e)),
    };
    Ok((data, shape))
}

/// One value per line; blank lines and a non-numeric header are skipped.
pub fn read_csv_signal(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::Parameter(format!(
                    "{}:{}: not a number: {field}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Reads a 1-D signal from `.csv` or raw `f64`.
pub fn read_signal(path: &Path) -> Result<Vec<f64>> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => read_csv_signal(path),
        _ => Ok(read_f64(path)?.0),
    }
}
