//! Binary field snapshots, all little-endian:
//!
//! ```text
//! magic      4 bytes  "LDGQ"
//! version    u32      1
//! nx, ny, nz u32 × 3
//! h          f64
//! s_plus     f64
//! density    u8       DensityKind code
//! values     f64 × 5 per node, row-major (x slowest), Coords5 order
//! mask       u8 per node, 1 = Dirichlet boundary
//! ```

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{DensityKind, QField};
use crate::error::{Error, Result};
use crate::qtensor::Coords5;

const MAGIC: &[u8; 4] = b"LDGQ";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: QField,
    pub s_plus: f64,
    pub density: DensityKind,
}

pub fn write_snapshot<W: Write>(mut w: W, field: &QField, s_plus: f64, density: DensityKind) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    for n in field.dims() {
        w.write_u32::<LittleEndian>(n as u32)?;
    }
    w.write_f64::<LittleEndian>(field.h())?;
    w.write_f64::<LittleEndian>(s_plus)?;
    w.write_u8(density.code())?;
    for c in field.data() {
        for v in c.0 {
            w.write_f64::<LittleEndian>(v)?;
        }
    }
    for &b in field.mask() {
        w.write_u8(b as u8)?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = r.read_u32::<LittleEndian>()? as usize;
    }
    let h = r.read_f64::<LittleEndian>()?;
    let s_plus = r.read_f64::<LittleEndian>()?;
    let code = r.read_u8()?;
    let density = DensityKind::from_code(code).ok_or_else(|| Error::Format(format!("unknown density code {code}")))?;
    let n = dims.iter().product::<usize>();
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        let mut c = [0.0; 5];
        for v in &mut c {
            *v = r.read_f64::<LittleEndian>()?;
        }
        data.push(Coords5(c));
    }
    let mut mask = Vec::with_capacity(n);
    for _ in 0..n {
        mask.push(match r.read_u8()? {
            0 => false,
            1 => true,
            b => return Err(Error::Format(format!("bad mask byte {b}"))),
        });
    }
    let field = QField::from_parts(dims, h, data, mask).map_err(|e| Error::Format(e.to_string()))?;
    Ok(Snapshot { field, s_plus, density })
}
