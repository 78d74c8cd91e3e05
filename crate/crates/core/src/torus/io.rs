//! Field serialization.
//!
//! Binary layout: four little-endian `u64` values `(n_t, n_x, n_y, c)` followed
//! by the row-major `f64` samples, also little-endian. The JSON sidecar carries
//! the grid metadata including the time period.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{TorusField, TorusGrid};
use crate::error::{Error, Result};

/// Grid metadata written next to a binary field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMetadata {
    pub n_t: usize,
    pub n_x: usize,
    pub n_y: usize,
    pub components: usize,
    pub period_t: f64,
    pub period_x: f64,
    pub period_y: f64,
    pub layout: String,
}

const LAYOUT: &str = "row-major (t, x, y, component), f64 little-endian";

impl FieldMetadata {
    pub fn of(field: &TorusField) -> Self {
        let g = field.grid();
        Self {
            n_t: g.n_t,
            n_x: g.n_x,
            n_y: g.n_y,
            components: field.components(),
            period_t: g.period_t,
            period_x: 1.0,
            period_y: 1.0,
            layout: LAYOUT.to_string(),
        }
    }
}

pub fn encode(field: &TorusField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(32 + 8 * field.values().len());
    for n in [g.n_t, g.n_x, g.n_y, field.components()] {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decodes the binary layout; `period_t` is not stored in the binary and must
/// be supplied.
pub fn decode(bytes: &[u8], period_t: f64) -> Result<TorusField> {
    if bytes.len() < 32 {
        return Err(Error::Format(format!("field header needs 32 bytes, got {}", bytes.len())));
    }
    let mut header = [0usize; 4];
    for (i, h) in header.iter_mut().enumerate() {
        let raw = u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes"));
        *h = usize::try_from(raw).map_err(|_| Error::Format(format!("header value {raw} too large")))?;
    }
    let [n_t, n_x, n_y, c] = header;
    let grid = TorusGrid::new(n_t, n_x, n_y, period_t)
        .map_err(|e| Error::Format(format!("bad grid in header: {e}")))?;
    let count = grid
        .len()
        .checked_mul(c)
        .ok_or_else(|| Error::Format("header sizes overflow".into()))?;
    let body = &bytes[32..];
    if body.len() != 8 * count {
        return Err(Error::Format(format!(
            "expected {} payload bytes, got {}",
            8 * count,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
        .collect();
    TorusField::new(grid, c, values).map_err(|e| Error::Format(e.to_string()))
}

/// Path of the JSON sidecar belonging to a binary field file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes `path` (binary) and `path.json` (metadata).
pub fn write_field(path: &Path, field: &TorusField) -> Result<()> {
    fs::write(path, encode(field))?;
    let meta = serde_json::to_string_pretty(&FieldMetadata::of(field))?;
    fs::write(sidecar_path(path), meta + "\n")?;
    Ok(())
}

/// Reads a binary field; the sidecar supplies `period_t` (defaults to 1 when
/// absent) and must agree with the binary header.
pub fn read_field(path: &Path) -> Result<TorusField> {
    let bytes = fs::read(path)?;
    let side = sidecar_path(path);
    let period_t = if side.exists() {
        let meta: FieldMetadata = serde_json::from_str(&fs::read_to_string(&side)?)?;
        let field = decode(&bytes, meta.period_t)?;
        let g = field.grid();
        if [g.n_t, g.n_x, g.n_y, field.components()]
            != [meta.n_t, meta.n_x, meta.n_y, meta.components]
        {
            return Err(Error::Format(format!(
                "sidecar {} disagrees with binary header",
                side.display()
            )));
        }
        return Ok(field);
    } else {
        1.0
    };
    decode(&bytes, period_t)
}

/// Which plane of the grid to export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    T,
    X,
    Y,
}

/// CSV of all points with the given index along `axis`. Columns are
/// `t,x,y,c0,c1,...`.
pub fn write_slice_csv<W: Write>(
    mut out: W,
    field: &TorusField,
    axis: SliceAxis,
    index: usize,
) -> Result<()> {
    let g = field.grid();
    let n = match axis {
        SliceAxis::T => g.n_t,
        SliceAxis::X => g.n_x,
        SliceAxis::Y => g.n_y,
    };
    if index >= n {
        return Err(Error::Argument(format!("slice index {index} out of range 0..{n}")));
    }
    let mut header = String::from("t,x,y");
    for c in 0..field.components() {
        header.push_str(&format!(",c{c}"));
    }
    writeln!(out, "{header}")?;
    for idx in 0..g.len() {
        let ijk = g.unravel(idx);
        let k = match axis {
            SliceAxis::T => ijk[0],
            SliceAxis::X => ijk[1],
            SliceAxis::Y => ijk[2],
        };
        if k != index {
            continue;
        }
        let [t, x, y] = g.coords(idx);
        let mut line = format!("{t:.17e},{x:.17e},{y:.17e}");
        for v in field.point(idx) {
            line.push_str(&format!(",{v:.17e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn binary_round_trip_is_bitwise() {
        let g = TorusGrid::new(4, 6, 8, 2.5).unwrap();
        let f = TorusField::random(g, 3, &mut ChaCha8Rng::seed_from_u64(3));
        let back = decode(&encode(&f), 2.5).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn header_layout() {
        let g = TorusGrid::new(4, 6, 8, 1.0).unwrap();
        let bytes = encode(&TorusField::zeros(g, 2));
        assert_eq!(&bytes[0..8], &4u64.to_le_bytes());
        assert_eq!(&bytes[24..32], &2u64.to_le_bytes());
        assert_eq!(bytes.len(), 32 + 8 * 4 * 6 * 8 * 2);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let g = TorusGrid::cube(4).unwrap();
        let mut bytes = encode(&TorusField::zeros(g, 1));
        bytes.pop();
        assert!(matches!(decode(&bytes, 1.0), Err(Error::Format(_))));
        assert!(matches!(decode(&bytes[..10], 1.0), Err(Error::Format(_))));
    }

    #[test]
    fn files_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let g = TorusGrid::new(4, 4, 4, 3.0).unwrap();
        let f = TorusField::random(g, 6, &mut ChaCha8Rng::seed_from_u64(4));
        write_field(&path, &f).unwrap();
        assert!(sidecar_path(&path).exists());
        let back = read_field(&path).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.grid().period_t, 3.0);
    }

    #[test]
    fn csv_slice_rows() {
        let g = TorusGrid::cube(4).unwrap();
        let f = TorusField::from_fn(g, 1, |[t, x, y]| vec![t + 10.0 * x + 100.0 * y]);
        let mut buf = Vec::new();
        write_slice_csv(&mut buf, &f, SliceAxis::T, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,x,y,c0");
        assert_eq!(lines.len(), 17);
        assert!(lines[1].starts_with("2.5"));
        assert!(write_slice_csv(Vec::new(), &f, SliceAxis::Y, 4).is_err());
    }
}
