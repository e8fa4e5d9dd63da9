//! Binary ball cache.
//!
//! Layout, all integers little-endian:
//! `"HTRC"`, version u16, backend fingerprint [u8; 32], radius u32,
//! `radius + 1` sphere counts u64, then every normal form as u32 length plus
//! bytes (sphere by sphere, sorted), then the first 8 bytes of the SHA-256 of
//! everything before it.

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::BallEnumeration;
use crate::error::{Error, Result};
use crate::group::{GroupBackend, NormalForm};

const MAGIC: &[u8; 4] = b"HTRC";
pub const CACHE_VERSION: u16 = 1;
const HEADER: usize = 4 + 2 + 32 + 4;

fn checksum(bytes: &[u8]) -> [u8; 8] {
    Sha256::digest(bytes)[..8].try_into().unwrap()
}

fn encode(ball: &BallEnumeration) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + ball.len() * 16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(&ball.backend().fingerprint());
    out.extend_from_slice(&(ball.radius() as u32).to_le_bytes());
    for n in &ball.sphere_sizes().counts {
        out.extend_from_slice(&n.to_le_bytes());
    }
    for nf in ball.raw_elements() {
        out.extend_from_slice(&(nf.len() as u32).to_le_bytes());
        out.extend_from_slice(nf);
    }
    let sum = checksum(&out);
    out.extend_from_slice(&sum);
    out
}

/// Writes the enumeration atomically (temporary file, then rename).
pub fn cache_store(ball: &BallEnumeration, path: &Path) -> Result<()> {
    let bytes = encode(ball);
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp)?;
    f.write_all(&bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::CacheFormat("unexpected end of data".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn cache_load(backend: &Arc<GroupBackend>, path: &Path) -> Result<BallEnumeration> {
    let bytes = fs::read(path)?;
    if bytes.len() < HEADER + 8 {
        return Err(Error::Checksum);
    }
    let (body, sum) = bytes.split_at(bytes.len() - 8);
    if checksum(body) != sum {
        return Err(Error::Checksum);
    }
    let mut r = Reader { bytes: body, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(Error::CacheFormat(format!("unsupported version {version}")));
    }
    if r.take(32)? != backend.fingerprint() {
        return Err(Error::FingerprintMismatch);
    }
    let radius = r.u32()? as usize;
    let counts: Vec<u64> = (0..=radius).map(|_| r.u64()).collect::<Result<_>>()?;
    let mut spheres = Vec::with_capacity(radius + 1);
    for &n in &counts {
        let mut sphere: Vec<NormalForm> = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let len = r.u32()? as usize;
            let nf = r.take(len)?;
            if !backend.valid_raw(nf) {
                return Err(Error::CacheFormat("invalid normal form".into()));
            }
            if sphere.last().is_some_and(|prev| prev.as_slice() >= nf) {
                return Err(Error::CacheFormat("sphere not sorted".into()));
            }
            sphere.push(NormalForm::from_slice(nf));
        }
        spheres.push(sphere);
    }
    if r.pos != body.len() {
        return Err(Error::CacheFormat("trailing bytes".into()));
    }
    Ok(BallEnumeration::from_spheres(backend.clone(), spheres))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_ball;
    use crate::presets::preset;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f2.htrc");
        let f2 = preset("free2").unwrap();
        let ball = enumerate_ball(&f2, 8).unwrap();
        cache_store(&ball, &path).unwrap();
        let loaded = cache_load(&f2, &path).unwrap();
        assert_eq!(loaded, ball);
        assert_eq!(fs::read(&path).unwrap(), encode(&loaded));
    }

    #[test]
    fn wrong_backend_and_truncation_are_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.htrc");
        let z = preset("z").unwrap();
        cache_store(&enumerate_ball(&z, 4).unwrap(), &path).unwrap();
        let f2 = preset("free2").unwrap();
        assert!(matches!(cache_load(&f2, &path), Err(Error::FingerprintMismatch)));

        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(cache_load(&z, &path), Err(Error::Checksum)));
        fs::write(&path, &bytes[..10]).unwrap();
        assert!(matches!(cache_load(&z, &path), Err(Error::Checksum)));

        let mut flipped = bytes.clone();
        flipped[HEADER + 3] ^= 1;
        fs::write(&path, &flipped).unwrap();
        assert!(matches!(cache_load(&z, &path), Err(Error::Checksum)));
    }
}
