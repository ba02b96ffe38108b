//! Versioned binary checkpoints: magic, spec hash, weight count, then the
//! flat little-endian f32 weights in canonical order.

use super::net::{QNetwork, QNetworkSpec};
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"IPPQNET1";

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

pub fn spec_hash(spec: &QNetworkSpec) -> u64 {
    fnv1a(spec.canonical_string().as_bytes())
}

pub fn save(path: &Path, net: &QNetwork<f32>) -> Result<()> {
    let weights = net.params_flat();
    let mut f = std::fs::File::create(path)?;
    f.write_all(MAGIC)?;
    f.write_all(&spec_hash(net.spec()).to_le_bytes())?;
    f.write_all(&(weights.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(weights.len() * 4);
    for w in &weights {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    f.write_all(&buf)?;
    Ok(())
}

pub fn load(path: &Path, spec: &QNetworkSpec) -> Result<QNetwork<f32>> {
    let mut f = std::fs::File::open(path)?;
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Config(format!("{}: not a checkpoint file", path.display())));
    }
    let mut u64buf = [0u8; 8];
    f.read_exact(&mut u64buf)?;
    let hash = u64::from_le_bytes(u64buf);
    if hash != spec_hash(spec) {
        return Err(Error::Config(format!(
            "{}: checkpoint was written for a different network spec",
            path.display()
        )));
    }
    f.read_exact(&mut u64buf)?;
    let count = u64::from_le_bytes(u64buf) as usize;
    if count != spec.param_count() {
        return Err(Error::Config(format!(
            "{}: expected {} weights, found {}",
            path.display(),
            spec.param_count(),
            count
        )));
    }
    let mut buf = vec![0u8; count * 4];
    f.read_exact(&mut buf)?;
    let weights: Vec<f32> = buf
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    QNetwork::from_flat(spec.clone(), &weights)
        .ok_or_else(|| Error::Config("weight count mismatch after read".into()))
}
