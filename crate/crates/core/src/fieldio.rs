//! Flat binary field files: an 8-byte magic, three `u64` dimensions, the
//! cell size and origin as `f64`, then the samples as `f64`, all
//! little-endian, with the last axis varying fastest.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::wavelet::Grid;

const MAGIC: &[u8; 8] = b"CBFIELD1";
const HEADER: usize = 8 + 3 * 8 + 8 + 3 * 8;

pub fn write_field<W: Write>(mut w: W, grid: &Grid) -> Result<()> {
    w.write_all(MAGIC)?;
    for d in grid.dims {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    w.write_all(&grid.h.to_le_bytes())?;
    for o in grid.lo {
        w.write_all(&o.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(grid.values.len() * 8);
    for v in &grid.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn field_bytes(grid: &Grid) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + grid.values.len() * 8);
    write_field(&mut out, grid).expect("writing to memory cannot fail");
    out
}

pub fn read_field<R: Read>(mut r: R) -> Result<Grid> {
    let mut head = [0u8; HEADER];
    r.read_exact(&mut head)?;
    if &head[..8] != MAGIC {
        return Err(Error::Config("not a field file (bad magic)".into()));
    }
    let word = |i: usize| -> [u8; 8] { head[8 + 8 * i..16 + 8 * i].try_into().unwrap() };
    let dims: [usize; 3] = std::array::from_fn(|a| u64::from_le_bytes(word(a)) as usize);
    let h = f64::from_le_bytes(word(3));
    let lo: [f64; 3] = std::array::from_fn(|a| f64::from_le_bytes(word(4 + a)));
    if !(h > 0.0) {
        return Err(Error::Config(format!("field cell size {h} is not positive")));
    }
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Config("field dimensions overflow".into()))?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != count * 8 {
        return Err(Error::Config(format!(
            "field body has {} bytes, expected {}",
            body.len(),
            count * 8
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Grid { lo, h, dims, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let g = Grid::sample(|x| x[0] - 2.0 * x[1] + x[2] * x[2], [-0.5, 0.0, 0.25], 1.0, 4);
        let bytes = field_bytes(&g);
        assert_eq!(bytes.len(), HEADER + 64 * 8);
        let back = read_field(&bytes[..]).unwrap();
        assert_eq!(back, g);
        assert!(read_field(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_field(&bad[..]).is_err());
    }
}
