//! Ball cache directory with an advisory lock file: any number of readers
//! or a single writer.

use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::enumerate::{cache_load, cache_store, BallEnumeration};
use crate::error::{Error, Result};
use crate::group::GroupBackend;

pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(BallCache { dir: dir.to_path_buf() })
    }

    fn lock_file(&self) -> Result<File> {
        Ok(OpenOptions::new().create(true).truncate(false).write(true).open(self.dir.join(".lock"))?)
    }

    pub fn path_for(&self, backend: &GroupBackend, radius: usize) -> PathBuf {
        let fp: String = backend.fingerprint()[..8].iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{fp}-r{radius}.htrc"))
    }

    /// `Ok(None)` when there is no entry. A corrupt or mismatched entry is
    /// reported on stderr and treated as missing, so it gets rewritten.
    pub fn load(&self, backend: &Arc<GroupBackend>, radius: usize) -> Result<Option<BallEnumeration>> {
        let path = self.path_for(backend, radius);
        let lock = self.lock_file()?;
        lock.lock_shared()?;
        let result = if path.exists() { Some(cache_load(backend, &path)) } else { None };
        lock.unlock()?;
        match result {
            None => Ok(None),
            Some(Ok(ball)) if ball.radius() == radius => Ok(Some(ball)),
            Some(Ok(_)) => {
                eprintln!("warning: cache entry {} has the wrong radius; recomputing", path.display());
                Ok(None)
            }
            Some(Err(e @ (Error::Checksum | Error::CacheFormat(_) | Error::FingerprintMismatch))) => {
                eprintln!("warning: ignoring cache entry {}: {e}", path.display());
                Ok(None)
            }
            Some(Err(e)) => Err(e),
        }
    }

    pub fn store(&self, ball: &BallEnumeration) -> Result<()> {
        let path = self.path_for(ball.backend(), ball.radius());
        let lock = self.lock_file()?;
        lock.lock()?;
        let result = cache_store(ball, &path);
        lock.unlock()?;
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_ball;
    use crate::presets::preset;

    #[test]
    fn store_then_load_and_recover_from_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::open(dir.path()).unwrap();
        let g = preset("free2").unwrap();
        assert!(cache.load(&g, 4).unwrap().is_none());
        let ball = enumerate_ball(&g, 4).unwrap();
        cache.store(&ball).unwrap();
        assert_eq!(cache.load(&g, 4).unwrap().unwrap(), ball);

        let path = cache.path_for(&g, 4);
        let mut bytes = fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0xff;
        fs::write(&path, bytes).unwrap();
        assert!(cache.load(&g, 4).unwrap().is_none());
    }
}
