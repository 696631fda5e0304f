//! Field snapshot export.
//!
//! Binary layout: a 32-byte header followed by the coefficients as
//! little-endian f64 pairs (re, im) in row-major lattice order.
//!
//! ```text
//! bytes  0..8   magic "CNSKFLD\0"
//! bytes  8..16  n (u64 LE)
//! bytes 16..24  half-width L (f64 LE)
//! bytes 24..32  representation tag (u64 LE): 0 = spectral, 1 = physical
//! ```
//!
//! The CSV form (intended for small `n`) has one row per mode:
//! `k1,k2,re,im` with 17-significant-digit floats.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, Repr, ScalarField};

const MAGIC: &[u8; 8] = b"CNSKFLD\0";

/// Serialize a field to the binary snapshot layout.
pub fn binary_bytes(field: &ScalarField) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + 16 * field.data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(field.grid.n() as u64).to_le_bytes());
    out.extend_from_slice(&field.grid.half_width().to_le_bytes());
    let tag: u64 = match field.repr {
        Repr::Spectral => 0,
        Repr::Physical => 1,
    };
    out.extend_from_slice(&tag.to_le_bytes());
    for v in &field.data {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn write_binary(field: &ScalarField, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&binary_bytes(field))?;
    Ok(())
}

pub fn read_binary(path: &Path) -> Result<ScalarField> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    if buf.len() < 32 || &buf[0..8] != MAGIC {
        return Err(Error::GridConfig("bad field file header".into()));
    }
    let n = u64::from_le_bytes(buf[8..16].try_into().unwrap()) as usize;
    let half_width = f64::from_le_bytes(buf[16..24].try_into().unwrap());
    let tag = u64::from_le_bytes(buf[24..32].try_into().unwrap());
    let repr = match tag {
        0 => Repr::Spectral,
        1 => Repr::Physical,
        other => {
            return Err(Error::GridConfig(format!(
                "unknown representation tag {other}"
            )))
        }
    };
    let grid = Grid2D::new(n, half_width)?;
    let want = 32 + 16 * grid.len();
    if buf.len() != want {
        return Err(Error::GridConfig(format!(
            "field file length {} does not match n = {n}",
            buf.len()
        )));
    }
    let mut data = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let off = 32 + 16 * i;
        let re = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[off + 8..off + 16].try_into().unwrap());
        data.push(Complex64::new(re, im));
    }
    Ok(ScalarField { grid, repr, data })
}

/// CSV form of a field (intended for small `n`).
pub fn csv_string(field: &ScalarField) -> String {
    let mut out = String::from("k1,k2,re,im\n");
    for i in 0..field.data.len() {
        let (k1, k2) = field.grid.k_of(i);
        let v = field.data[i];
        out.push_str(&format!("{k1},{k2},{:.16e},{:.16e}\n", v.re, v.im));
    }
    out
}

pub fn write_csv(field: &ScalarField, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(field))?;
    Ok(())
}
