//! Dataset files.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! magic    4 bytes  "LCDS"
//! version  u16      1
//! hlen     u32      length of the JSON header that follows
//! header   hlen bytes of UTF-8 JSON (DatasetHeader)
//! count    u64      number of records
//! record   repeated `count` times:
//!            input   12 × u32   railcars per type, then containers per length
//!            split   u8         0 train, 1 validation, 2 test
//!            target  12 × u32   railcars used per type, then containers loaded per length
//!            weights f64 × (input[10] + input[11])   40 ft weights, then 53 ft weights
//! ```
//!
//! The CSV export has one row per example: the 12 inputs then the 12 targets.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::InstanceSketch;
use crate::summarize::{Dataset, LabeledExample, Provenance, Split, Summary};

const MAGIC: &[u8; 4] = b"LCDS";
const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetHeader {
    pub fleet_hash: String,
    pub provenance: Vec<Provenance>,
}

pub fn write_dataset<W: Write>(mut w: W, dataset: &Dataset, fleet_hash: &str) -> Result<()> {
    let header = DatasetHeader {
        fleet_hash: fleet_hash.to_string(),
        provenance: dataset.provenance.clone(),
    };
    let header = serde_json::to_vec(&header)?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    w.write_all(&(dataset.examples.len() as u64).to_le_bytes())?;
    for (e, split) in dataset.examples.iter().zip(&dataset.split) {
        for c in e.input.to_vector() {
            w.write_all(&c.to_le_bytes())?;
        }
        w.write_all(&[split.code()])?;
        for c in e.target.to_vector() {
            w.write_all(&c.to_le_bytes())?;
        }
        for group in &e.weights {
            for x in group {
                w.write_all(&x.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("dataset file ends inside a record".into()),
        _ => Error::Io(e),
    })?;
    Ok(b)
}

fn read_counts<R: Read>(r: &mut R) -> Result<[u32; 12]> {
    let mut v = [0u32; 12];
    for x in &mut v {
        *x = u32::from_le_bytes(read_array(r)?);
    }
    Ok(v)
}

pub fn read_dataset<R: Read>(mut r: R) -> Result<(DatasetHeader, Dataset)> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a dataset file (bad magic)".into()));
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported dataset version {version}")));
    }
    let hlen = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let mut header = vec![0u8; hlen];
    r.read_exact(&mut header)?;
    let header: DatasetHeader =
        serde_json::from_slice(&header).map_err(|e| Error::Format(format!("dataset header: {e}")))?;
    let count = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let mut examples = Vec::with_capacity(count.min(1 << 20));
    let mut split = Vec::with_capacity(count.min(1 << 20));
    for i in 0..count {
        let input = InstanceSketch::from_vector(read_counts(&mut r)?);
        let [code] = read_array::<_, 1>(&mut r)?;
        let s = Split::from_code(code).ok_or_else(|| Error::Format(format!("record {i}: bad split code {code}")))?;
        let target = Summary::from_vector(read_counts(&mut r)?);
        let weights = std::array::from_fn(|_| Vec::new());
        let mut e = LabeledExample { input, target, weights };
        for g in 0..2 {
            for _ in 0..input.container_counts[g] {
                e.weights[g].push(f64::from_le_bytes(read_array(&mut r)?));
            }
        }
        if !e.target.fits_within(&e.input) {
            return Err(Error::Format(format!("record {i}: target exceeds input")));
        }
        examples.push(e);
        split.push(s);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after the last record".into()));
    }
    let dataset = Dataset {
        examples,
        split,
        provenance: header.provenance.clone(),
    };
    Ok((header, dataset))
}

pub fn save_dataset(path: impl AsRef<Path>, dataset: &Dataset, fleet_hash: &str) -> Result<()> {
    write_dataset(BufWriter::new(File::create(path)?), dataset, fleet_hash)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<(DatasetHeader, Dataset)> {
    let path = path.as_ref();
    read_dataset(BufReader::new(File::open(path)?)).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn csv_header() -> String {
    let mut cols = Vec::new();
    for prefix in ["in", "out"] {
        for j in 1..=10 {
            cols.push(format!("{prefix}_type{j}"));
        }
        cols.push(format!("{prefix}_L40"));
        cols.push(format!("{prefix}_L53"));
    }
    cols.join(",")
}

pub fn write_csv<W: Write>(mut w: W, dataset: &Dataset) -> Result<()> {
    writeln!(w, "{}", csv_header())?;
    for e in &dataset.examples {
        let row: Vec<String> = e
            .input
            .to_vector()
            .iter()
            .chain(e.target.to_vector().iter())
            .map(|c| c.to_string())
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}
