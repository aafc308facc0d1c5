//! Feature export: TFI images as 8-bit PGM, ZC stacks as CSV, each with a
//! JSON sidecar naming the source capture and configuration.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::features::segments::ReductionConfig;
use crate::features::stft::StftConfig;
use crate::mat::Mat;
use crate::{Error, Result};

/// Sidecar written next to exported feature files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureMeta {
    /// Path or name of the capture the feature came from.
    pub source: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stft: Option<StftConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionConfig>,
}

fn write_sidecar(path: &Path, meta: &FeatureMeta) -> Result<()> {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    let sidecar = std::path::PathBuf::from(s);
    let json = serde_json::to_string_pretty(meta).map_err(|e| Error::json("feature sidecar", e))?;
    fs::write(&sidecar, json).map_err(|e| Error::io(sidecar.display().to_string(), e))
}

/// Write a [0, 1] image as binary PGM (P5, maxval 255).
pub fn write_pgm(path: &Path, image: &Mat, meta: &FeatureMeta) -> Result<()> {
    let mut buf = Vec::with_capacity(32 + image.data.len());
    write!(buf, "P5\n{} {}\n255\n", image.cols, image.rows)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    for &v in &image.data {
        buf.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
    }
    fs::write(path, buf).map_err(|e| Error::io(path.display().to_string(), e))?;
    write_sidecar(path, meta)
}

/// Write a feature matrix as CSV, one row per line.
pub fn write_stack_csv(path: &Path, stack: &Mat, meta: &FeatureMeta) -> Result<()> {
    let mut out = String::new();
    for r in 0..stack.rows {
        let row: Vec<String> = stack.row(r).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))?;
    write_sidecar(path, meta)
}

/// Read a CSV feature matrix back.
pub fn read_stack_csv(path: &Path) -> Result<Mat> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| {
            Error::InvalidConfig(format!("{}: bad CSV number: {e}", path.display()))
        })?);
    }
    Ok(Mat::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let img = Mat::from_rows(vec![vec![0.0, 0.5], vec![1.0, 0.25]]);
        let meta = FeatureMeta {
            source: "cap.iq".into(),
            kind: "tfi".into(),
            stft: None,
            reduction: None,
        };
        write_pgm(&path, &img, &meta).unwrap();
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&bytes[bytes.len() - 4..], &[0u8, 128, 255, 64]);
        assert!(path.with_extension("pgm.json").exists());
    }

    #[test]
    fn stack_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stack.csv");
        let stack = Mat::from_rows(vec![vec![1.5, -2.25, 3.0], vec![0.0, 4.75, -1.0]]);
        let meta = FeatureMeta {
            source: "cap.iq".into(),
            kind: "zc".into(),
            stft: None,
            reduction: None,
        };
        write_stack_csv(&path, &stack, &meta).unwrap();
        let back = read_stack_csv(&path).unwrap();
        assert_eq!(back, stack);
    }
}
