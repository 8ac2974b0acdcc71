//! Checkpoint files.
//!
//! ```text
//! magic    4 bytes  "LCCK"
//! version  u16      1
//! config   u32 length + JSON (NetworkConfig)
//! fleet    u32 length + UTF-8 fleet hash
//! params   u64 count + count × f64
//! report   u32 length + JSON (TrainReport), length 0 when absent
//! ```
//!
//! All integers and floats little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{Network, NetworkConfig, TrainReport};

const MAGIC: &[u8; 4] = b"LCCK";
const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub network: Network,
    pub fleet_hash: String,
    pub report: Option<TrainReport>,
}

fn put_block<W: Write>(w: &mut W, bytes: &[u8]) -> Result<()> {
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(bytes)?;
    Ok(())
}

pub fn write_checkpoint<W: Write>(mut w: W, ckpt: &Checkpoint) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    put_block(&mut w, &serde_json::to_vec(ckpt.network.config())?)?;
    put_block(&mut w, ckpt.fleet_hash.as_bytes())?;
    let p = ckpt.network.parameters();
    w.write_all(&(p.len() as u64).to_le_bytes())?;
    for x in p {
        w.write_all(&x.to_le_bytes())?;
    }
    match &ckpt.report {
        Some(r) => put_block(&mut w, &serde_json::to_vec(r)?)?,
        None => put_block(&mut w, &[])?,
    }
    w.flush()?;
    Ok(())
}

fn take<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(eof)?;
    Ok(b)
}

fn eof(e: std::io::Error) -> Error {
    match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("checkpoint file is truncated".into()),
        _ => Error::Io(e),
    }
}

fn take_block<R: Read>(r: &mut R) -> Result<Vec<u8>> {
    let n = u32::from_le_bytes(take(r)?) as usize;
    let mut b = Vec::new();
    r.take(n as u64).read_to_end(&mut b)?;
    if b.len() != n {
        return Err(Error::Format("checkpoint file is truncated".into()));
    }
    Ok(b)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint> {
    if &take::<_, 4>(&mut r)? != MAGIC {
        return Err(Error::Format("not a checkpoint file (bad magic)".into()));
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let config: NetworkConfig =
        serde_json::from_slice(&take_block(&mut r)?).map_err(|e| Error::Format(format!("checkpoint config: {e}")))?;
    let fleet_hash = String::from_utf8(take_block(&mut r)?)
        .map_err(|_| Error::Format("checkpoint fleet hash is not UTF-8".into()))?;
    let n = u64::from_le_bytes(take(&mut r)?) as usize;
    let mut params = Vec::with_capacity(n.min(1 << 26));
    for _ in 0..n {
        params.push(f64::from_le_bytes(take(&mut r)?));
    }
    let network = Network::from_parameters(config, params).map_err(|e| Error::Format(format!("checkpoint: {e}")))?;
    let report = take_block(&mut r)?;
    let report = if report.is_empty() {
        None
    } else {
        Some(serde_json::from_slice(&report).map_err(|e| Error::Format(format!("checkpoint report: {e}")))?)
    };
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(Error::Format("trailing bytes after checkpoint".into()));
    }
    Ok(Checkpoint {
        network,
        fleet_hash,
        report,
    })
}

pub fn save_checkpoint(path: impl AsRef<Path>, ckpt: &Checkpoint) -> Result<()> {
    write_checkpoint(BufWriter::new(File::create(path)?), ckpt)
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    read_checkpoint(BufReader::new(File::open(path)?)).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}
