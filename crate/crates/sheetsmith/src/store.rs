//! File-backed persistence.
//!
//! Layout under the root:
//!
//! ```text
//! profiles/<id>.json   tasks/<id>.json   packs/<id>.json
//! sessions/<id>.json   blobs/<sha256>    quarantine/<file>
//! ```
//!
//! Every document write goes to a temp file in the target directory, is
//! synced, then renamed over the destination. Blobs are content addressed
//! and written once. The session index lives in memory and is rebuilt by
//! [`SessionStore::recover`].

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use sheetsmith_core::{
    is_valid_id, ArtifactRef, KnowledgePack, LearnerProfile, PipelineSession, SchemaViolation,
    SessionId, TaskItem,
};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {detail}")]
    Corrupt { path: PathBuf, detail: String },
    #[error("refusing to persist: {0}")]
    Invariant(SchemaViolation),
    #[error("invalid id {0:?}")]
    InvalidId(String),
    #[error("injected crash before {0} was committed")]
    InjectedCrash(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Simulates a process kill during the write after the first `n` succeed.
/// The failing write leaves a truncated temp file behind and every later
/// write fails too.
#[derive(Debug)]
pub struct Failpoint {
    remaining: AtomicU64,
}

impl Failpoint {
    pub fn after(n: u64) -> Arc<Self> {
        Arc::new(Self {
            remaining: AtomicU64::new(n),
        })
    }

    fn trip(&self) -> bool {
        self.remaining
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |r| r.checked_sub(1))
            .is_err()
    }
}

/// A document kind stored as `<dir>/<id>.json`.
pub trait Document: Serialize + DeserializeOwned {
    const DIR: &'static str;
    fn key(&self) -> &str;
    fn check(&self) -> Result<(), SchemaViolation>;
}

impl Document for LearnerProfile {
    const DIR: &'static str = "profiles";
    fn key(&self) -> &str {
        self.id.as_str()
    }
    fn check(&self) -> Result<(), SchemaViolation> {
        self.validate()
    }
}

impl Document for TaskItem {
    const DIR: &'static str = "tasks";
    fn key(&self) -> &str {
        self.id.as_str()
    }
    fn check(&self) -> Result<(), SchemaViolation> {
        self.validate()
    }
}

impl Document for KnowledgePack {
    const DIR: &'static str = "packs";
    fn key(&self) -> &str {
        self.id.as_str()
    }
    fn check(&self) -> Result<(), SchemaViolation> {
        self.validate()
    }
}

impl Document for PipelineSession {
    const DIR: &'static str = "sessions";
    fn key(&self) -> &str {
        self.id.as_str()
    }
    fn check(&self) -> Result<(), SchemaViolation> {
        self.check_presence()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuarantinedFile {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Default, Serialize)]
pub struct RecoveryReport {
    pub sessions: Vec<PipelineSession>,
    pub quarantined: Vec<QuarantinedFile>,
    pub removed_temp_files: usize,
}

pub struct SessionStore {
    root: PathBuf,
    failpoint: Option<Arc<Failpoint>>,
    index: Mutex<BTreeSet<SessionId>>,
    tmp_seq: AtomicU64,
}

const TMP_MARK: &str = ".tmp-";

impl SessionStore {
    /// Creates the layout if needed and indexes session files by name.
    /// Call [`recover`](Self::recover) to validate their contents.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        for dir in [
            LearnerProfile::DIR,
            TaskItem::DIR,
            KnowledgePack::DIR,
            PipelineSession::DIR,
            "blobs",
            "quarantine",
        ] {
            let p = root.join(dir);
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        let store = Self {
            root,
            failpoint: None,
            index: Mutex::default(),
            tmp_seq: AtomicU64::new(0),
        };
        let ids = store.scan_ids::<PipelineSession>()?;
        *store.index.lock().expect("index lock") = ids.into_iter().map(SessionId).collect();
        Ok(store)
    }

    pub fn with_failpoint(mut self, fp: Arc<Failpoint>) -> Self {
        self.failpoint = Some(fp);
        self
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn doc_path<D: Document>(&self, id: &str) -> Result<PathBuf, StoreError> {
        if !is_valid_id(id) {
            return Err(StoreError::InvalidId(id.into()));
        }
        Ok(self.root.join(D::DIR).join(format!("{id}.json")))
    }

    fn atomic_write(&self, path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
        let dir = path.parent().expect("store paths have a parent");
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("doc");
        let tmp = dir.join(format!(
            "{name}{TMP_MARK}{}",
            self.tmp_seq.fetch_add(1, Ordering::Relaxed)
        ));
        if self.failpoint.as_ref().is_some_and(|fp| fp.trip()) {
            fs::write(&tmp, &bytes[..bytes.len() / 2]).map_err(io_err(&tmp))?;
            return Err(StoreError::InjectedCrash(path.to_owned()));
        }
        let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(bytes)
            .and_then(|_| f.sync_all())
            .map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))?;
        // Persist the rename itself; not every platform allows syncing a directory.
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
        Ok(())
    }

    pub fn put<D: Document>(&self, doc: &D) -> Result<(), StoreError> {
        doc.check().map_err(StoreError::Invariant)?;
        let path = self.doc_path::<D>(doc.key())?;
        let mut bytes = serde_json::to_vec_pretty(doc).expect("documents serialize");
        bytes.push(b'\n');
        self.atomic_write(&path, &bytes)
    }

    pub fn get<D: Document>(&self, id: &str) -> Result<Option<D>, StoreError> {
        let path = match self.doc_path::<D>(id) {
            Ok(p) => p,
            Err(StoreError::InvalidId(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path)(e)),
        };
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| StoreError::Corrupt {
                path,
                detail: e.to_string(),
            })
    }

    pub fn contains<D: Document>(&self, id: &str) -> bool {
        self.doc_path::<D>(id).is_ok_and(|p| p.exists())
    }

    /// Returns whether a document was removed.
    pub fn delete<D: Document>(&self, id: &str) -> Result<bool, StoreError> {
        let path = self.doc_path::<D>(id)?;
        match fs::remove_file(&path) {
            Ok(()) => Ok(true),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(false),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    fn scan_ids<D: Document>(&self) -> Result<Vec<String>, StoreError> {
        let dir = self.root.join(D::DIR);
        let mut ids = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let name = entry.map_err(io_err(&dir))?.file_name();
            if let Some(id) = name.to_str().and_then(|n| n.strip_suffix(".json")) {
                if is_valid_id(id) {
                    ids.push(id.to_owned());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }

    /// All documents of one kind, ordered by id.
    pub fn list<D: Document>(&self) -> Result<Vec<D>, StoreError> {
        let mut out = Vec::new();
        for id in self.scan_ids::<D>()? {
            out.extend(self.get::<D>(&id)?);
        }
        Ok(out)
    }

    pub fn save_session(&self, s: &PipelineSession) -> Result<(), StoreError> {
        self.check_exports(s)
            .map_err(|detail| StoreError::Corrupt {
                path: self.root.join("blobs"),
                detail,
            })?;
        self.put(s)?;
        self.index.lock().expect("index lock").insert(s.id.clone());
        Ok(())
    }

    pub fn load_session(&self, id: &str) -> Result<Option<PipelineSession>, StoreError> {
        self.get(id)
    }

    pub fn session_ids(&self) -> Vec<SessionId> {
        self.index
            .lock()
            .expect("index lock")
            .iter()
            .cloned()
            .collect()
    }

    fn check_exports(&self, s: &PipelineSession) -> Result<(), String> {
        let refs = s
            .worksheet
            .iter()
            .flat_map(|w| w.exports.values())
            .filter_map(|o| o.artifact());
        for r in refs {
            if !self.has_blob(r) {
                return Err(format!(
                    "export artifact {} is not in the blob store",
                    r.as_str()
                ));
            }
        }
        Ok(())
    }

    fn blob_path(&self, r: &ArtifactRef) -> Option<PathBuf> {
        let h = r.as_str();
        (h.len() == 64 && h.bytes().all(|b| b.is_ascii_hexdigit()))
            .then(|| self.root.join("blobs").join(h))
    }

    pub fn put_blob(&self, bytes: &[u8]) -> Result<ArtifactRef, StoreError> {
        let r = ArtifactRef(hex::encode(Sha256::digest(bytes)));
        let path = self.blob_path(&r).expect("digest is a valid blob name");
        if !path.exists() {
            self.atomic_write(&path, bytes)?;
        }
        Ok(r)
    }

    pub fn get_blob(&self, r: &ArtifactRef) -> Result<Option<Vec<u8>>, StoreError> {
        let Some(path) = self.blob_path(r) else {
            return Ok(None);
        };
        match fs::read(&path) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    pub fn has_blob(&self, r: &ArtifactRef) -> bool {
        self.blob_path(r).is_some_and(|p| p.exists())
    }

    fn quarantine(
        &self,
        path: &Path,
        reason: String,
        report: &mut RecoveryReport,
    ) -> Result<(), StoreError> {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("unnamed")
            .to_owned();
        let dest = self.root.join("quarantine").join(&name);
        fs::rename(path, &dest).map_err(io_err(path))?;
        tracing::warn!(file = %name, %reason, "quarantined session file");
        report
            .quarantined
            .push(QuarantinedFile { file: name, reason });
        Ok(())
    }

    /// Removes interrupted temp files, moves unreadable or invariant-breaking
    /// session files to `quarantine/` and rebuilds the index from what is left.
    pub fn recover(&self) -> Result<RecoveryReport, StoreError> {
        let mut report = RecoveryReport::default();
        for dir in [
            LearnerProfile::DIR,
            TaskItem::DIR,
            KnowledgePack::DIR,
            PipelineSession::DIR,
            "blobs",
        ] {
            let dir = self.root.join(dir);
            for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
                let path = entry.map_err(io_err(&dir))?.path();
                if path
                    .file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.contains(TMP_MARK))
                {
                    fs::remove_file(&path).map_err(io_err(&path))?;
                    report.removed_temp_files += 1;
                }
            }
        }
        let dir = self.root.join(PipelineSession::DIR);
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(io_err(&dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        paths.sort();
        let mut index = BTreeSet::new();
        for path in paths {
            let Some(stem) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".json"))
            else {
                continue;
            };
            let verdict = fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|t| {
                    serde_json::from_str::<PipelineSession>(&t).map_err(|e| e.to_string())
                })
                .and_then(|s| {
                    if s.id.as_str() != stem {
                        return Err(format!("file name disagrees with id {:?}", s.id.as_str()));
                    }
                    s.check_presence().map_err(|v| v.to_string())?;
                    self.check_exports(&s)?;
                    Ok(s)
                });
            match verdict {
                Ok(s) => {
                    index.insert(s.id.clone());
                    report.sessions.push(s);
                }
                Err(reason) => self.quarantine(&path, reason, &mut report)?,
            }
        }
        *self.index.lock().expect("index lock") = index;
        Ok(report)
    }
}
