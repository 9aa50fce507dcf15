//! Binary sample files: a fixed header, then little-endian `f64` columns.
//!
//! ```text
//! "BDPS" | version u32 | seed u64 | chain hash [u8; 8] | start u64
//! | target u64 (u64::MAX for infinity) | n_samples u64 | values u64 | censored u64
//! | bias_bound f64 | values f64... | censored times f64...
//! ```

use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::HittingSample;
use crate::error::{Error, Result};
use crate::rates::RateSpec;

const MAGIC: &[u8; 4] = b"BDPS";
const VERSION: u32 = 1;

/// First 8 bytes of SHA-256 over the chain's JSON.
pub fn chain_hash(chain: &RateSpec) -> [u8; 8] {
    let digest = Sha256::digest(chain.to_json().as_bytes());
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredSample {
    pub chain_hash: [u8; 8],
    pub sample: HittingSample,
}

pub fn write_samples(path: &Path, sample: &HittingSample, chain: &RateSpec) -> Result<()> {
    let mut buf = Vec::with_capacity(72 + 8 * (sample.values.len() + sample.censored_times.len()));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&sample.seed.to_le_bytes());
    buf.extend_from_slice(&chain_hash(chain));
    buf.extend_from_slice(&(sample.start as u64).to_le_bytes());
    buf.extend_from_slice(&sample.target.map_or(u64::MAX, |t| t as u64).to_le_bytes());
    buf.extend_from_slice(&(sample.n_samples as u64).to_le_bytes());
    buf.extend_from_slice(&(sample.values.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(sample.censored_times.len() as u64).to_le_bytes());
    buf.extend_from_slice(&sample.bias_bound.to_le_bytes());
    for v in sample.values.iter().chain(&sample.censored_times) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.0.len() < N {
            return Err(Error::InvalidArgument("sample file is truncated".into()));
        }
        let (head, rest) = self.0.split_at(N);
        self.0 = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    fn f64s(&mut self, n: u64) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn read_samples(path: &Path) -> Result<StoredSample> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut c = Cursor(&bytes);
    if &c.take::<4>()? != MAGIC {
        return Err(Error::InvalidArgument("not a sample file".into()));
    }
    let version = u32::from_le_bytes(c.take()?);
    if version != VERSION {
        return Err(Error::InvalidArgument(format!(
            "unsupported sample file version {version}"
        )));
    }
    let seed = c.u64()?;
    let chain_hash = c.take::<8>()?;
    let start = c.u64()? as usize;
    let target = match c.u64()? {
        u64::MAX => None,
        t => Some(t as usize),
    };
    let n_samples = c.u64()? as usize;
    let n_values = c.u64()?;
    let n_censored = c.u64()?;
    let bias_bound = c.f64()?;
    let values = c.f64s(n_values)?;
    let censored_times = c.f64s(n_censored)?;
    if !c.0.is_empty() {
        return Err(Error::InvalidArgument(
            "trailing bytes in sample file".into(),
        ));
    }
    Ok(StoredSample {
        chain_hash,
        sample: HittingSample {
            values,
            censored_count: censored_times.len(),
            censored_times,
            start,
            target,
            seed,
            n_samples,
            bias_bound,
        },
    })
}
