//! Versioned binary dump of a `SieveTable`.
//!
//! Layout (little endian): magic `EWSIEVE\0`, version `u32`, `x: u64`, `segment_size: u64`,
//! spec SHA-256 (32 bytes), spec text length `u32` and bytes, then `x` values of `f` as `f64`
//! and `x` values of `omega` as `u8`.

use super::table::{spec_hash, SieveTable};
use crate::error::{Error, Result};
use crate::function_model::AdditiveFunctionSpec;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

const MAGIC: &[u8; 8] = b"EWSIEVE\0";
const VERSION: u32 = 1;

impl SieveTable {
    pub fn dump<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        let text = self.spec.canonical();
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.x.to_le_bytes())?;
        w.write_all(&self.segment_size.to_le_bytes())?;
        w.write_all(&spec_hash(&self.spec))?;
        w.write_all(&(text.len() as u32).to_le_bytes())?;
        w.write_all(text.as_bytes())?;
        for v in &self.f {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.omega)?;
        w.flush()?;
        Ok(())
    }

    pub fn dump_to_path(&self, path: &Path) -> Result<()> {
        self.dump(std::fs::File::create(path)?)
    }

    /// Reloads a dump; with `expected` set, the stored spec hash must match it.
    pub fn load<R: Read>(r: R, expected: Option<&AdditiveFunctionSpec>) -> Result<SieveTable> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadDump("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::BadDump(format!("unsupported version {version}")));
        }
        let x = read_u64(&mut r)?;
        let segment_size = read_u64(&mut r)?;
        let mut hash = [0u8; 32];
        r.read_exact(&mut hash)?;
        let len = read_u32(&mut r)? as usize;
        let mut text = vec![0u8; len];
        r.read_exact(&mut text)?;
        let text = String::from_utf8(text).map_err(|_| Error::BadDump("spec text is not UTF-8".into()))?;
        let spec: AdditiveFunctionSpec = text.parse()?;
        if spec_hash(&spec) != hash {
            return Err(Error::BadDump("spec hash does not match stored spec".into()));
        }
        if let Some(e) = expected {
            if spec_hash(e) != hash {
                return Err(Error::BadDump(format!("dump was built for '{text}', not '{e}'")));
            }
        }
        if x == 0 || x > super::table::EXACT_CAP {
            return Err(Error::BadDump(format!("implausible x = {x}")));
        }
        let mut raw = vec![0u8; 8 * x as usize];
        r.read_exact(&mut raw)?;
        let f = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        let mut omega = vec![0u8; x as usize];
        r.read_exact(&mut omega)?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::BadDump("trailing bytes".into()));
        }
        Ok(SieveTable { spec, x, segment_size, f, omega, buckets: OnceLock::new() })
    }

    pub fn load_from_path(path: &Path, expected: Option<&AdditiveFunctionSpec>) -> Result<SieveTable> {
        Self::load(std::fs::File::open(path)?, expected)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
