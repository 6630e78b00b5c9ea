//! Grid file formats.
//!
//! `PHD1`: the magic bytes, `u32` LE `n_r`, `u32` LE `n_theta`, then
//! `n_r * n_theta` complex values as interleaved LE `f64` pairs, row-major
//! by radius. CSV: header `r,theta,re,im` and one row per node. Boundary
//! functions use the same layouts with `n_r = 1`.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::{make_grid, BoundaryFunction, DiskGrid, GridFunction};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"PHD1";

/// Raw grid payload: shape plus row-major values.
#[derive(Clone, Debug, PartialEq)]
pub struct RawGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub values: Vec<Complex64>,
}

impl RawGrid {
    pub fn into_grid_function(self) -> Result<GridFunction> {
        let grid = make_grid(self.n_theta, self.n_r)?;
        GridFunction::new(grid, self.values)
    }

    pub fn into_boundary(self) -> Result<BoundaryFunction> {
        if self.n_r != 1 {
            return Err(Error::Format(format!(
                "boundary file has n_r = {}, expected 1",
                self.n_r
            )));
        }
        BoundaryFunction::new(self.values)
    }
}

pub fn encode_phd1(n_r: usize, n_theta: usize, values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 16 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n_r as u32).to_le_bytes());
    out.extend_from_slice(&(n_theta as u32).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode_phd1(mut bytes: &[u8]) -> Result<RawGrid> {
    let mut head = [0u8; 12];
    bytes
        .read_exact(&mut head)
        .map_err(|_| Error::Format("truncated PHD1 header".into()))?;
    if &head[..4] != MAGIC {
        return Err(Error::Format("missing PHD1 magic".into()));
    }
    let n_r = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
    let n_theta = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let count = n_r
        .checked_mul(n_theta)
        .ok_or_else(|| Error::Format("PHD1 shape overflows".into()))?;
    if bytes.len() != 16 * count {
        return Err(Error::Format(format!(
            "PHD1 payload has {} bytes, expected {}",
            bytes.len(),
            16 * count
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(RawGrid {
        n_r,
        n_theta,
        values,
    })
}

fn csv_text(radii: &[f64], n_theta: usize, values: &[Complex64]) -> String {
    let mut s = String::from("r,theta,re,im\n");
    for (j, r) in radii.iter().enumerate() {
        for k in 0..n_theta {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            let v = values[j * n_theta + k];
            let _ = writeln!(s, "{r:e},{t:e},{:e},{:e}", v.re, v.im);
        }
    }
    s
}

/// Parses the CSV layout; rows must be ordered by radius then angle.
pub fn decode_csv(reader: impl Read) -> Result<RawGrid> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty CSV".into()))??;
    if header.trim() != "r,theta,re,im" {
        return Err(Error::Format(format!("unexpected CSV header {header:?}")));
    }
    let mut radii: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("CSV row {}: {e}", n + 2)))?;
        if cols.len() != 4 {
            return Err(Error::Format(format!(
                "CSV row {} has {} columns",
                n + 2,
                cols.len()
            )));
        }
        if radii.last() != Some(&cols[0]) {
            radii.push(cols[0]);
        }
        values.push(Complex64::new(cols[2], cols[3]));
    }
    let n_r = radii.len();
    if n_r == 0 || values.len() % n_r != 0 {
        return Err(Error::Format("CSV rows do not form a grid".into()));
    }
    Ok(RawGrid {
        n_r,
        n_theta: values.len() / n_r,
        values,
    })
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a grid file, choosing the format by extension (`.csv` or PHD1).
pub fn read_raw(path: &Path) -> Result<RawGrid> {
    if is_csv(path) {
        decode_csv(fs::File::open(path)?)
    } else {
        decode_phd1(&fs::read(path)?)
    }
}

pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    read_raw(path)?.into_grid_function()
}

pub fn read_boundary(path: &Path) -> Result<BoundaryFunction> {
    read_raw(path)?.into_boundary()
}

pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    let g = f.grid();
    write_bytes(path, g, f.values())
}

fn write_bytes(path: &Path, g: &DiskGrid, values: &[Complex64]) -> Result<()> {
    let bytes = if is_csv(path) {
        csv_text(g.radii(), g.n_theta(), values).into_bytes()
    } else {
        encode_phd1(g.n_r(), g.n_theta(), values)
    };
    fs::File::create(path)?.write_all(&bytes)?;
    Ok(())
}

pub fn write_boundary(path: &Path, b: &BoundaryFunction) -> Result<()> {
    let bytes = if is_csv(path) {
        csv_text(&[1.0], b.n_theta(), b.values()).into_bytes()
    } else {
        encode_phd1(1, b.n_theta(), b.values())
    };
    fs::File::create(path)?.write_all(&bytes)?;
    Ok(())
}

/// A one-dimensional cut through a grid function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slice {
    /// The ring at this radius.
    Radius(f64),
    /// The ray at this angle.
    Angle(f64),
}

/// CSV text `coordinate,re,im,abs[,flag]` for a slice; masked rows end with
/// `masked`.
pub fn slice_csv(f: &GridFunction, along: Slice) -> Result<String> {
    let g: &Arc<DiskGrid> = f.grid();
    let mut s = String::from("coordinate,re,im,abs,flag\n");
    let mut row = |coord: f64, j: usize, k: usize| {
        let v = f.value(j, k);
        if f.is_masked_at(j, k) {
            let _ = writeln!(s, "{coord:e},nan,nan,nan,masked");
        } else {
            let _ = writeln!(s, "{coord:e},{:e},{:e},{:e},", v.re, v.im, v.norm());
        }
    };
    match along {
        Slice::Radius(r) => {
            let j = g.ring_of(r)?;
            for k in 0..g.n_theta() {
                row(g.theta(k), j, k);
            }
        }
        Slice::Angle(t) => {
            let k = g.angle_index_of(t)?;
            for j in 0..g.n_r() {
                row(g.radius(j), j, k);
            }
        }
    }
    Ok(s)
}

pub fn emit_slice(f: &GridFunction, along: Slice, path: &Path) -> Result<()> {
    let text = slice_csv(f, along)?;
    fs::write(path, text)?;
    Ok(())
}
