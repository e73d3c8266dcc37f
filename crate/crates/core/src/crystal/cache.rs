use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CrystalError, CrystalSlice, LSPath, PathCrystal, DEFAULT_LIMIT};
use crate::lattice::{Gcm, PairingVector, RootVector};

const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct KeyMaterial<'a> {
    schema_version: u32,
    matrix: &'a [Vec<i64>],
    mu: &'a [i64],
    bound: &'a [i64],
}

#[derive(Serialize, Deserialize)]
struct Entry {
    schema_version: u32,
    matrix: Vec<Vec<i64>>,
    mu: PairingVector,
    bound: RootVector,
    elements: Vec<LSPath>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub entries: usize,
    pub bytes: u64,
    pub hits: u64,
    pub misses: u64,
}

/// On-disk store of truncated crystals, one JSON file per `(GCM, μ, bound)`.
#[derive(Debug)]
pub struct CrystalCache {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
}

fn key_locks() -> &'static Mutex<HashMap<String, Arc<Mutex<()>>>> {
    static LOCKS: OnceLock<Mutex<HashMap<String, Arc<Mutex<()>>>>> = OnceLock::new();
    LOCKS.get_or_init(Default::default)
}

fn io_err(e: impl std::fmt::Display) -> CrystalError {
    CrystalError::Cache(e.to_string())
}

pub fn cache_key(gcm: &Gcm, mu: &PairingVector, bound: &RootVector) -> String {
    let material = KeyMaterial {
        schema_version: SCHEMA_VERSION,
        matrix: gcm.matrix(),
        mu: mu.values(),
        bound: bound.coeffs(),
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(&bytes))
}

impl CrystalCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, CrystalError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(io_err)?;
        Ok(CrystalCache { dir, hits: AtomicU64::new(0), misses: AtomicU64::new(0) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    fn load(&self, path: &Path, crystal: &PathCrystal, bound: &RootVector) -> Option<CrystalSlice> {
        let text = fs::read(path).ok()?;
        let entry: Entry = serde_json::from_slice(&text).ok()?;
        if entry.schema_version != SCHEMA_VERSION
            || entry.matrix != crystal.gcm().matrix()
            || &entry.mu != crystal.mu()
            || &entry.bound != bound
        {
            return None;
        }
        CrystalSlice::from_parts(crystal.clone(), Some(bound.clone()), entry.elements).ok()
    }

    fn encode(slice: &CrystalSlice, bound: &RootVector) -> Vec<u8> {
        let entry = Entry {
            schema_version: SCHEMA_VERSION,
            matrix: slice.crystal().gcm().matrix().to_vec(),
            mu: slice.crystal().mu().clone(),
            bound: bound.clone(),
            elements: slice.elements().to_vec(),
        };
        serde_json::to_vec(&entry).expect("entry serializes")
    }

    fn store(&self, path: &Path, bytes: &[u8]) -> Result<(), CrystalError> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        tmp.write_all(bytes).map_err(io_err)?;
        tmp.persist(path).map_err(io_err)?;
        Ok(())
    }

    /// Returns the cached slice or generates and stores it. Concurrent calls
    /// with the same key generate once.
    pub fn get_or_generate(&self, crystal: &PathCrystal, bound: &RootVector) -> Result<CrystalSlice, CrystalError> {
        let key = cache_key(crystal.gcm(), crystal.mu(), bound);
        let lock = key_locks().lock().unwrap().entry(key.clone()).or_default().clone();
        let _guard = lock.lock().unwrap();
        let path = self.file_for(&key);
        if let Some(slice) = self.load(&path, crystal, bound) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(slice);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let slice = crystal.generate(Some(bound), DEFAULT_LIMIT)?;
        self.store(&path, &Self::encode(&slice, bound))?;
        Ok(slice)
    }

    fn entry_files(&self) -> Result<Vec<PathBuf>, CrystalError> {
        let mut out: Vec<PathBuf> = fs::read_dir(&self.dir)
            .map_err(io_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn stats(&self) -> Result<CacheStats, CrystalError> {
        let files = self.entry_files()?;
        let bytes = files.iter().filter_map(|p| fs::metadata(p).ok()).map(|m| m.len()).sum();
        Ok(CacheStats {
            entries: files.len(),
            bytes,
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        })
    }

    /// Removes every entry; returns how many were deleted.
    pub fn clear(&self) -> Result<usize, CrystalError> {
        let files = self.entry_files()?;
        for f in &files {
            fs::remove_file(f).map_err(io_err)?;
        }
        Ok(files.len())
    }

    /// Re-derives one seeded-random entry and compares it byte for byte.
    /// `Ok(None)` when the cache is empty; `Ok(Some(false))` on a mismatch.
    pub fn verify(&self, seed: u64) -> Result<Option<(PathBuf, bool)>, CrystalError> {
        let files = self.entry_files()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(path) = files.choose(&mut rng).cloned() else {
            return Ok(None);
        };
        let stored = fs::read(&path).map_err(io_err)?;
        let ok = (|| {
            let entry: Entry = serde_json::from_slice(&stored).ok()?;
            let gcm = Gcm::new(entry.matrix.clone()).ok()?;
            let crystal = PathCrystal::new(&gcm, &entry.mu).ok()?;
            let fresh = crystal.generate(Some(&entry.bound), DEFAULT_LIMIT).ok()?;
            let name_ok = path.file_stem()?.to_str()? == cache_key(&gcm, &entry.mu, &entry.bound);
            Some(name_ok && Self::encode(&fresh, &entry.bound) == stored)
        })()
        .unwrap_or(false);
        Ok(Some((path, ok)))
    }
}
