//! Persistence backends for the repository.
//!
//! The file layout is:
//!
//! ```text
//! <root>/index.json               {"schema_version": 1}
//! <root>/entries/<entry_id>.json
//! <root>/lineages/<lineage_id>.json
//! <root>/assets/<sha256>
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{RepoError, RepositoryEntry, SlideLineage};
use crate::deck::{EntryId, LineageId};

pub const STORE_SCHEMA_VERSION: u64 = 1;

/// Everything a store holds apart from assets, as read at startup.
#[derive(Default)]
pub struct StoreSnapshot {
    pub entries: BTreeMap<EntryId, RepositoryEntry>,
    pub lineages: BTreeMap<LineageId, SlideLineage>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub trait DocumentStore: Send + Sync {
    fn load(&self) -> Result<StoreSnapshot, RepoError>;
    fn put_entry(&self, entry: &RepositoryEntry) -> Result<(), RepoError>;
    fn put_lineage(&self, lineage: &SlideLineage) -> Result<(), RepoError>;
    fn put_asset(&self, hash: &str, bytes: &[u8]) -> Result<(), RepoError>;
    fn get_asset(&self, hash: &str) -> Result<Option<Vec<u8>>, RepoError>;
}

/// Keeps everything in memory. Useful for tests and throwaway sessions.
#[derive(Default)]
pub struct MemoryStore {
    entries: Mutex<BTreeMap<EntryId, RepositoryEntry>>,
    lineages: Mutex<BTreeMap<LineageId, SlideLineage>>,
    assets: Mutex<BTreeMap<String, Vec<u8>>>,
}

impl DocumentStore for MemoryStore {
    fn load(&self) -> Result<StoreSnapshot, RepoError> {
        Ok(StoreSnapshot {
            entries: self.entries.lock().clone(),
            lineages: self.lineages.lock().clone(),
        })
    }

    fn put_entry(&self, entry: &RepositoryEntry) -> Result<(), RepoError> {
        self.entries.lock().insert(entry.entry_id.clone(), entry.clone());
        Ok(())
    }

    fn put_lineage(&self, lineage: &SlideLineage) -> Result<(), RepoError> {
        self.lineages
            .lock()
            .insert(lineage.lineage_id.clone(), lineage.clone());
        Ok(())
    }

    fn put_asset(&self, hash: &str, bytes: &[u8]) -> Result<(), RepoError> {
        self.assets.lock().insert(hash.to_owned(), bytes.to_vec());
        Ok(())
    }

    fn get_asset(&self, hash: &str) -> Result<Option<Vec<u8>>, RepoError> {
        Ok(self.assets.lock().get(hash).cloned())
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    schema_version: u64,
}

/// One JSON document per entry and lineage, plus a content-addressed asset
/// directory. Writes go through a temp file and a rename.
pub struct FileStore {
    root: PathBuf,
}

fn storage(e: io::Error) -> RepoError {
    RepoError::Storage(e.to_string())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RepoError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(storage)?;
    f.write_all(bytes).map_err(storage)?;
    f.sync_all().map_err(storage)?;
    fs::rename(&tmp, path).map_err(storage)
}

// Ids end up in file names.
fn safe_name(id: &str) -> Result<&str, RepoError> {
    if !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        Ok(id)
    } else {
        Err(RepoError::Storage(format!("id `{id}` is not usable as a file name")))
    }
}

impl FileStore {
    /// Opens (and if needed initializes) a store directory. A manifest that
    /// exists but cannot be read or has another schema version is an error.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, RepoError> {
        let root = root.into();
        for sub in ["entries", "lineages", "assets"] {
            fs::create_dir_all(root.join(sub)).map_err(storage)?;
        }
        let manifest_path = root.join("index.json");
        match fs::read(&manifest_path) {
            Ok(bytes) => {
                let manifest: Manifest = serde_json::from_slice(&bytes).map_err(|e| {
                    RepoError::CorruptStore(format!("{}: {e}", manifest_path.display()))
                })?;
                if manifest.schema_version != STORE_SCHEMA_VERSION {
                    return Err(RepoError::CorruptStore(format!(
                        "{}: unsupported schema_version {}",
                        manifest_path.display(),
                        manifest.schema_version
                    )));
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                let manifest = Manifest {
                    schema_version: STORE_SCHEMA_VERSION,
                };
                write_atomic(
                    &manifest_path,
                    &serde_json::to_vec_pretty(&manifest).expect("manifest serializes"),
                )?;
            }
            Err(e) => return Err(storage(e)),
        }
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn read_dir<T: for<'de> Deserialize<'de>>(&self, sub: &str) -> Result<Vec<T>, RepoError> {
        let mut out = Vec::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(self.root.join(sub))
            .map_err(storage)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()
            .map_err(storage)?;
        paths.sort();
        for path in paths {
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let bytes = fs::read(&path).map_err(storage)?;
            let doc = serde_json::from_slice(&bytes)
                .map_err(|e| RepoError::CorruptStore(format!("{}: {e}", path.display())))?;
            out.push(doc);
        }
        Ok(out)
    }
}

impl DocumentStore for FileStore {
    fn load(&self) -> Result<StoreSnapshot, RepoError> {
        let entries = self
            .read_dir::<RepositoryEntry>("entries")?
            .into_iter()
            .map(|e| (e.entry_id.clone(), e))
            .collect();
        let lineages = self
            .read_dir::<SlideLineage>("lineages")?
            .into_iter()
            .map(|l| (l.lineage_id.clone(), l))
            .collect();
        Ok(StoreSnapshot { entries, lineages })
    }

    fn put_entry(&self, entry: &RepositoryEntry) -> Result<(), RepoError> {
        let name = safe_name(entry.entry_id.as_str())?;
        let path = self.root.join("entries").join(format!("{name}.json"));
        write_atomic(&path, &serde_json::to_vec_pretty(entry).expect("entry serializes"))
    }

    fn put_lineage(&self, lineage: &SlideLineage) -> Result<(), RepoError> {
        let name = safe_name(lineage.lineage_id.as_str())?;
        let path = self.root.join("lineages").join(format!("{name}.json"));
        write_atomic(&path, &serde_json::to_vec_pretty(lineage).expect("lineage serializes"))
    }

    fn put_asset(&self, hash: &str, bytes: &[u8]) -> Result<(), RepoError> {
        let path = self.root.join("assets").join(safe_name(hash)?);
        if path.exists() {
            return Ok(());
        }
        write_atomic(&path, bytes)
    }

    fn get_asset(&self, hash: &str) -> Result<Option<Vec<u8>>, RepoError> {
        let path = self.root.join("assets").join(safe_name(hash)?);
        match fs::read(path) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(storage(e)),
        }
    }
}
