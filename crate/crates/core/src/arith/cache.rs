//! On-disk cache of sieve tables, keyed by (N, k) and guarded by a SHA-256 checksum.
//!
//! Layout: magic, N (u64 LE), k (u32 LE), then spf, Λ, μ, φ, d_2..d_k as
//! little-endian arrays, then the 32-byte digest of everything before it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::sieve::{sieve_all_with, SieveConfig, SieveTable};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"APVSIEV1";

pub fn cache_path(dir: &Path, n: usize, k: u32) -> PathBuf {
    dir.join(format!("sieve_N{n}_k{k}.bin"))
}

pub fn encode(table: &SieveTable) -> Vec<u8> {
    let (spf, lambda, mu, phi, d) = table.parts();
    let n = table.len();
    let mut buf = Vec::with_capacity(n * super::sieve::bytes_per_entry(table.k()) as usize + 64);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&table.k().to_le_bytes());
    spf.iter()
        .for_each(|v| buf.extend_from_slice(&v.to_le_bytes()));
    lambda
        .iter()
        .for_each(|v| buf.extend_from_slice(&v.to_le_bytes()));
    mu.iter()
        .for_each(|v| buf.extend_from_slice(&v.to_le_bytes()));
    phi.iter()
        .for_each(|v| buf.extend_from_slice(&v.to_le_bytes()));
    for dj in d {
        dj.iter()
            .for_each(|v| buf.extend_from_slice(&v.to_le_bytes()));
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

pub fn decode(bytes: &[u8]) -> Result<SieveTable> {
    let bad = |m: &str| Error::Cache(m.to_string());
    if bytes.len() < 8 + 8 + 4 + 32 || &bytes[..8] != MAGIC {
        return Err(bad("not a sieve cache file"));
    }
    let (payload, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(payload).as_slice() != digest {
        return Err(bad("checksum mismatch"));
    }
    let n = u64::from_le_bytes(payload[8..16].try_into().unwrap()) as usize;
    let k = u32::from_le_bytes(payload[16..20].try_into().unwrap());
    if k < 2 {
        return Err(bad("bad k"));
    }
    let expect = 20 + n * super::sieve::bytes_per_entry(k) as usize;
    if payload.len() != expect {
        return Err(bad("length does not match header"));
    }
    let mut at = 20;
    let mut take = |len: usize| {
        let s = &payload[at..at + len];
        at += len;
        s
    };
    let spf = take(4 * n)
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let lambda = take(8 * n)
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mu = take(n).iter().map(|&b| b as i8).collect();
    let phi = take(4 * n)
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let d = (2..=k)
        .map(|_| {
            take(4 * n)
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect()
        })
        .collect();
    Ok(SieveTable::from_parts(n, k, spf, lambda, mu, phi, d))
}

/// Loads `(n, k)` from `dir` when a valid file exists, otherwise sieves and stores it.
/// A corrupt file is rebuilt rather than trusted.
pub fn load_or_build(dir: &Path, n: usize, k: u32, cfg: &SieveConfig) -> Result<SieveTable> {
    let path = cache_path(dir, n, k);
    if let Ok(bytes) = fs::read(&path) {
        if let Ok(t) = decode(&bytes) {
            if t.len() == n && t.k() == k {
                return Ok(t);
            }
        }
    }
    let table = sieve_all_with(n, k, cfg)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(&encode(&table))?;
    f.sync_all()?;
    fs::rename(&tmp, &path)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve::sieve_all;

    #[test]
    fn roundtrip_and_corruption() {
        let t = sieve_all(500, 3).unwrap();
        let mut bytes = encode(&t);
        assert_eq!(decode(&bytes).unwrap(), t);
        let mid = bytes.len() / 2;
        bytes[mid] ^= 1;
        assert!(matches!(decode(&bytes), Err(Error::Cache(_))));
    }

    #[test]
    fn load_or_build_reuses_file() {
        let dir = std::env::temp_dir().join(format!("apvar-cache-{}", std::process::id()));
        let a = load_or_build(&dir, 300, 2, &SieveConfig::default()).unwrap();
        assert!(cache_path(&dir, 300, 2).exists());
        let b = load_or_build(&dir, 300, 2, &SieveConfig::default()).unwrap();
        assert_eq!(a, b);
        std::fs::write(cache_path(&dir, 300, 2), b"garbage").unwrap();
        let c = load_or_build(&dir, 300, 2, &SieveConfig::default()).unwrap();
        assert_eq!(a, c);
        std::fs::remove_dir_all(&dir).ok();
    }
}
