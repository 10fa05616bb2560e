use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{Informant, OracleError, OracleRequest, Role};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub key: String,
    pub role: Role,
    pub payload: BTreeMap<String, String>,
    pub raw_text: String,
    /// Seconds since the epoch at recording time.
    pub timestamp: u64,
}

#[derive(Default)]
struct Inner {
    records: Vec<TranscriptRecord>,
    by_key: HashMap<String, usize>,
    file: Option<File>,
}

/// Append-only request/reply log, one JSON record per line. Keys are unique:
/// a second reply for a known key is never stored.
pub struct TranscriptStore {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

fn store_err(path: &Path, e: impl std::fmt::Display) -> OracleError {
    OracleError::Store {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

impl TranscriptStore {
    pub fn in_memory() -> Self {
        Self {
            path: None,
            inner: Mutex::new(Inner::default()),
        }
    }

    /// Loads `path` if it exists; new records are appended to it.
    pub fn open(path: &Path) -> Result<Self, OracleError> {
        let store = if path.exists() {
            Self::load(path)?
        } else {
            Self::in_memory()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| store_err(path, e))?;
        let mut inner = store.inner.into_inner().unwrap();
        inner.file = Some(file);
        Ok(Self {
            path: Some(path.to_path_buf()),
            inner: Mutex::new(inner),
        })
    }

    /// Loads `path` for reading only.
    pub fn load(path: &Path) -> Result<Self, OracleError> {
        let text = std::fs::read_to_string(path).map_err(|e| store_err(path, e))?;
        let mut inner = Inner::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: TranscriptRecord = serde_json::from_str(line)
                .map_err(|e| store_err(path, format!("line {}: {e}", i + 1)))?;
            if !inner.by_key.contains_key(&rec.key) {
                inner.by_key.insert(rec.key.clone(), inner.records.len());
                inner.records.push(rec);
            }
        }
        Ok(Self {
            path: Some(path.to_path_buf()),
            inner: Mutex::new(inner),
        })
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let inner = self.inner.lock().unwrap();
        inner.by_key.get(key).map(|&i| inner.records[i].raw_text.clone())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> Vec<TranscriptRecord> {
        self.inner.lock().unwrap().records.clone()
    }

    fn append(&self, inner: &mut Inner, req: &OracleRequest, key: String, raw: &str) -> Result<(), OracleError> {
        if inner.by_key.contains_key(&key) {
            return Ok(());
        }
        let rec = TranscriptRecord {
            key: key.clone(),
            role: req.role,
            payload: req.payload.clone(),
            raw_text: raw.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        if let Some(f) = inner.file.as_mut() {
            let line = serde_json::to_string(&rec).expect("record serializes");
            let path = self.path.as_deref().unwrap_or(Path::new("<transcript>"));
            writeln!(f, "{line}").map_err(|e| store_err(path, e))?;
            f.flush().map_err(|e| store_err(path, e))?;
        }
        inner.by_key.insert(key, inner.records.len());
        inner.records.push(rec);
        Ok(())
    }
}

/// Answers from a transcript, falling through to `inner` for unseen keys and
/// recording what it returns. Without an inner informant this is pure
/// replay, and an unseen key is an error.
pub struct CachingInformant {
    inner: Option<Arc<dyn Informant>>,
    store: Arc<TranscriptStore>,
}

impl CachingInformant {
    pub fn recording(inner: Arc<dyn Informant>, store: Arc<TranscriptStore>) -> Self {
        Self {
            inner: Some(inner),
            store,
        }
    }

    pub fn replay(store: Arc<TranscriptStore>) -> Self {
        Self { inner: None, store }
    }

    pub fn store(&self) -> &Arc<TranscriptStore> {
        &self.store
    }
}

impl Informant for CachingInformant {
    fn respond(&self, req: &OracleRequest) -> Result<String, OracleError> {
        let key = req.key();
        // Held across the inner call so one key never reaches it twice.
        let mut guard = self.store.inner.lock().unwrap();
        if let Some(&i) = guard.by_key.get(&key) {
            return Ok(guard.records[i].raw_text.clone());
        }
        let Some(inner) = &self.inner else {
            return Err(OracleError::ReplayMiss {
                role: req.role,
                key,
            });
        };
        let raw = inner.respond(req)?;
        self.store.append(&mut guard, req, key, &raw)?;
        Ok(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Counting(AtomicUsize);

    impl Informant for Counting {
        fn respond(&self, req: &OracleRequest) -> Result<String, OracleError> {
            self.0.fetch_add(1, Ordering::SeqCst);
            Ok(format!("reply to {}", req.payload["word"]))
        }
    }

    #[test]
    fn caching_calls_inner_once_per_key() {
        let counter = Arc::new(Counting(AtomicUsize::new(0)));
        let store = Arc::new(TranscriptStore::in_memory());
        let c = CachingInformant::recording(counter.clone(), store.clone());
        let a = OracleRequest::new(Role::Antonym, &[("word", "a")]);
        let b = OracleRequest::new(Role::Antonym, &[("word", "b")]);
        for _ in 0..3 {
            c.respond(&a).unwrap();
            c.respond(&b).unwrap();
        }
        assert_eq!(counter.0.load(Ordering::SeqCst), 2);
        assert_eq!(store.len(), 2);
    }

    #[test]
    fn record_then_replay_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        let req = OracleRequest::new(Role::Antonym, &[("word", "closer")]);
        {
            let store = Arc::new(TranscriptStore::open(&path).unwrap());
            let inner = Arc::new(Counting(AtomicUsize::new(0)));
            let c = CachingInformant::recording(inner, store);
            assert_eq!(c.respond(&req).unwrap(), "reply to closer");
        }
        let replay = CachingInformant::replay(Arc::new(TranscriptStore::load(&path).unwrap()));
        assert_eq!(replay.respond(&req).unwrap(), "reply to closer");
        let miss = OracleRequest::new(Role::Antonym, &[("word", "other")]);
        assert!(matches!(replay.respond(&miss), Err(OracleError::ReplayMiss { .. })));
    }
}
