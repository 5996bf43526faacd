//! Binary field snapshots.
//!
//! Layout (all little-endian): magic `SIFK`, version byte `1`, `u8` dim,
//! `u32` points per axis, `f64` box bounds as `(lower, upper)` per axis,
//! then the values as `f64` in row-major order. The boundary condition is
//! not stored; readers supply it.

use std::io::{Read, Write};
use std::sync::Arc;

use super::{BoundaryCondition, Field, Grid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SIFK";
const VERSION: u8 = 1;

pub fn write_snapshot<W: Write>(mut w: W, u: &Field) -> Result<()> {
    let g = u.grid();
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, g.dim() as u8])?;
    for &n in g.shape() {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    for d in 0..g.dim() {
        let (a, b) = g.bounds(d);
        w.write_all(&a.to_le_bytes())?;
        w.write_all(&b.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(u.len() * 8);
    for v in u.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R, bc: BoundaryCondition) -> Result<Field> {
    let mut head = [0u8; 6];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(Error::Snapshot("bad magic bytes".into()));
    }
    if head[4] != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {}", head[4])));
    }
    let dim = head[5] as usize;
    if !(1..=3).contains(&dim) {
        return Err(Error::Snapshot(format!("invalid dimension {dim}")));
    }
    let mut n = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        n.push(u32::from_le_bytes(b) as usize);
    }
    let mut bounds = Vec::with_capacity(dim);
    for _ in 0..dim {
        bounds.push((read_f64(&mut r)?, read_f64(&mut r)?));
    }
    let grid = Grid::new(&n, &bounds, bc).map_err(|e| Error::Snapshot(e.to_string()))?;
    let mut raw = vec![0u8; grid.len() * 8];
    r.read_exact(&mut raw)?;
    let data = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Field::new(Arc::new(grid), data)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
