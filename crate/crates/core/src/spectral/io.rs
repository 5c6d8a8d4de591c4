//! Field snapshots: a JSON header with an inline mode list, or a header plus
//! a little-endian `f64` sidecar holding the dense coefficient table.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::field::{Mode, SpectralField, Symmetry, C64, ZERO};
use super::grid::GridSpec;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Snapshot {
    format_version: u32,
    #[serde(rename = "L")]
    length: f64,
    kappa0: f64,
    #[serde(rename = "K")]
    k_max: usize,
    symmetry: Symmetry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modes: Option<Vec<[f64; 6]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sidecar: Option<String>,
}

/// Serializes the nonzero modes as `[k1, k2, re u1, im u1, re u2, im u2]` rows.
pub fn to_json(u: &SpectralField) -> Result<String> {
    let g = u.grid();
    let modes = u
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, m)| m[0].norm_sqr() + m[1].norm_sqr() > 0.0)
        .map(|(idx, m)| {
            let (a, b) = g.wavevector(idx);
            [a as f64, b as f64, m[0].re, m[0].im, m[1].re, m[1].im]
        })
        .collect();
    let snap = header(u, Some(modes), None);
    Ok(serde_json::to_string_pretty(&snap)?)
}

pub fn from_json(text: &str) -> Result<SpectralField> {
    let snap: Snapshot = serde_json::from_str(text)?;
    let grid = check_header(&snap)?;
    let rows = snap
        .modes
        .ok_or_else(|| Error::Format("snapshot has neither modes nor a readable sidecar".into()))?;
    let mut coeffs = vec![ZERO; grid.len()];
    for r in rows {
        if r[0].fract() != 0.0 || r[1].fract() != 0.0 {
            return Err(Error::Format(format!(
                "non-integer wavevector ({}, {})",
                r[0], r[1]
            )));
        }
        let idx = grid.index(r[0] as i64, r[1] as i64).ok_or_else(|| {
            Error::Format(format!("mode ({}, {}) outside truncation", r[0], r[1]))
        })?;
        coeffs[idx] = [C64::new(r[2], r[3]), C64::new(r[4], r[5])];
    }
    SpectralField::from_coeffs(grid, coeffs, snap.symmetry)
}

pub fn write_json(u: &SpectralField, path: &Path) -> Result<()> {
    fs::write(path, to_json(u)?)?;
    Ok(())
}

/// Reads a snapshot header; a sidecar is resolved relative to the header's directory.
pub fn read_snapshot(path: &Path) -> Result<SpectralField> {
    let text = fs::read_to_string(path)?;
    let snap: Snapshot = serde_json::from_str(&text)?;
    match &snap.sidecar {
        None => from_json(&text),
        Some(name) => {
            let grid = check_header(&snap)?;
            let dir = path.parent().unwrap_or_else(|| Path::new("."));
            let bytes = fs::read(dir.join(name))?;
            let coeffs = decode_dense(&grid, &bytes)?;
            SpectralField::from_coeffs(grid, coeffs, snap.symmetry)
        }
    }
}

/// Writes `<stem>.json` with a header and `<stem>.bin` with the dense table.
pub fn write_with_sidecar(u: &SpectralField, dir: &Path, stem: &str) -> Result<()> {
    let bin_name = format!("{stem}.bin");
    let mut bytes = Vec::with_capacity(u.coeffs().len() * 32);
    for m in u.coeffs() {
        for x in [m[0].re, m[0].im, m[1].re, m[1].im] {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    fs::write(dir.join(&bin_name), bytes)?;
    let snap = header(u, None, Some(bin_name));
    fs::write(
        dir.join(format!("{stem}.json")),
        serde_json::to_string_pretty(&snap)?,
    )?;
    Ok(())
}

fn header(u: &SpectralField, modes: Option<Vec<[f64; 6]>>, sidecar: Option<String>) -> Snapshot {
    let g = u.grid();
    Snapshot {
        format_version: FORMAT_VERSION,
        length: g.length(),
        kappa0: g.kappa0(),
        k_max: g.k_max(),
        symmetry: u.symmetry(),
        modes,
        sidecar,
    }
}

fn check_header(s: &Snapshot) -> Result<GridSpec> {
    if s.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format_version {}",
            s.format_version
        )));
    }
    let grid = GridSpec::new(s.length, s.k_max)?;
    if (grid.kappa0() - s.kappa0).abs() > 1e-12 * grid.kappa0() {
        return Err(Error::Format(format!(
            "kappa0 {} does not match L {}",
            s.kappa0, s.length
        )));
    }
    Ok(grid)
}

fn decode_dense(grid: &GridSpec, bytes: &[u8]) -> Result<Vec<Mode>> {
    if bytes.len() != grid.len() * 32 {
        return Err(Error::Format(format!(
            "sidecar holds {} bytes, expected {}",
            bytes.len(),
            grid.len() * 32
        )));
    }
    let mut vals = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut out = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let mut next = || vals.next().expect("length checked");
        let (a, b, c, d) = (next(), next(), next(), next());
        out.push([C64::new(a, b), C64::new(c, d)]);
    }
    Ok(out)
}
