//! AFLD1 binary fields.
//!
//! Layout, little-endian throughout: the 8-byte magic `AFLD0001`, three `u32`
//! sizes `(n_h, n_h, n_v)`, the periods `l_h` and `l_v` as `f64`, then one
//! `(re, im)` pair of `f64` per coefficient. Coefficients run row-major over
//! `(ξ₁, ξ₂, ξ₃)` with each axis in FFT order (`0, 1, …, n/2 − 1, −n/2, …, −1`).

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anisons_core::{Field, Grid, VecField};
use num_complex::Complex64;

use crate::error::{AppError, AppResult};

pub const MAGIC: &[u8; 8] = b"AFLD0001";
const HEADER_LEN: usize = 8 + 3 * 4 + 2 * 8;

pub fn encode(f: &Field) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
    out.extend_from_slice(MAGIC);
    for n in [g.n_h, g.n_h, g.n_v] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    out.extend_from_slice(&g.l_h.to_le_bytes());
    out.extend_from_slice(&g.l_v.to_le_bytes());
    for c in f.coeffs() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// Parses an AFLD1 image. The field is flagged real when its coefficients
/// are Hermitian-symmetric.
pub fn decode(bytes: &[u8]) -> Result<Field, String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!("{} bytes is too short for an AFLD1 header", bytes.len()));
    }
    if &bytes[..8] != MAGIC {
        return Err("bad magic, expected AFLD0001".into());
    }
    let (n1, n2, n3) = (u32_at(bytes, 8), u32_at(bytes, 12), u32_at(bytes, 16));
    if n1 != n2 {
        return Err(format!("horizontal sizes differ: {n1} and {n2}"));
    }
    let grid = Grid::with_periods(n1 as usize, n3 as usize, f64_at(bytes, 20), f64_at(bytes, 28))
        .map_err(|e| e.to_string())?;
    let want = HEADER_LEN + 16 * grid.len();
    if bytes.len() != want {
        return Err(format!("expected {want} bytes for a {grid} field, found {}", bytes.len()));
    }
    let mut coeffs = Vec::with_capacity(grid.len());
    for at in (HEADER_LEN..want).step_by(16) {
        let c = Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8));
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(format!("nonfinite coefficient at byte {at}"));
        }
        coeffs.push(c);
    }
    Ok(Field::from_coeffs(&grid, coeffs, true))
}

pub fn write_to(w: &mut impl Write, f: &Field) -> io::Result<()> {
    w.write_all(&encode(f))
}

pub fn read_from(r: &mut impl Read) -> io::Result<Field> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode(&bytes).map_err(|m| io::Error::new(io::ErrorKind::InvalidData, m))
}

pub fn write_field(path: &Path, f: &Field) -> AppResult<()> {
    fs::write(path, encode(f)).map_err(|e| AppError::io(path, e))
}

pub fn read_field(path: &Path) -> AppResult<Field> {
    let bytes = fs::read(path).map_err(|e| AppError::io(path, e))?;
    decode(&bytes).map_err(|message| AppError::Format { path: path.to_path_buf(), message })
}

/// Reads three component files into a vector field on a common grid.
pub fn read_vec_field(paths: [&Path; 3]) -> AppResult<VecField> {
    let [a, b, c] = paths.map(read_field);
    let (a, b, c) = (a?, b?, c?);
    VecField::new(a, b, c)
        .map_err(|e| AppError::Format { path: paths[1].to_path_buf(), message: format!("components disagree: {e}") })
}
