//! Fixture replay and recording.
//!
//! A fixture suite is a directory holding one JSON file per record, named
//! `<request_hash>_<ordinal>.json`. The nth identical request within a
//! session gets ordinal n; once a hash runs out of ordinals the last one
//! keeps answering. Files are read on every call, so hand edits take effect
//! without a restart.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sheetsmith_core::{ChatRequest, ChatResponse, ProviderKind};

use super::{pretty_request, GatewayError, Provider};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub request_hash: String,
    pub ordinal: u32,
    pub request_snapshot: ChatRequest,
    pub response_text: String,
}

pub fn fixture_file_name(hash: &str, ordinal: u32) -> String {
    format!("{hash}_{ordinal}.json")
}

/// `(hash, ordinal)` from a fixture file name.
fn parse_file_name(name: &str) -> Option<(&str, u32)> {
    let stem = name.strip_suffix(".json")?;
    let (hash, ordinal) = stem.rsplit_once('_')?;
    Some((hash, ordinal.parse().ok()?))
}

fn storage(path: &Path, e: impl std::fmt::Display) -> GatewayError {
    GatewayError::Storage(format!("{}: {e}", path.display()))
}

/// Highest ordinal on disk for `hash`, if any.
fn max_ordinal(dir: &Path, hash: &str) -> Result<Option<u32>, GatewayError> {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(storage(dir, e)),
    };
    let mut max = None;
    for entry in entries {
        let name = entry.map_err(|e| storage(dir, e))?.file_name();
        if let Some((h, n)) = name.to_str().and_then(parse_file_name) {
            if h == hash {
                max = max.max(Some(n));
            }
        }
    }
    Ok(max)
}

fn read_record(path: &Path) -> Result<FixtureRecord, GatewayError> {
    let text = fs::read_to_string(path).map_err(|e| storage(path, e))?;
    serde_json::from_str(&text).map_err(|e| storage(path, e))
}

/// Replays a fixture suite.
pub struct MockProvider {
    dir: PathBuf,
    cursors: Mutex<HashMap<(String, String), u32>>,
}

impl MockProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            cursors: Mutex::default(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

impl Provider for MockProvider {
    fn kind(&self) -> ProviderKind {
        ProviderKind::Mock
    }

    fn complete(&self, session: &str, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        let hash = &req.request_hash;
        let wanted = {
            let mut cursors = self.cursors.lock().expect("cursor lock");
            let slot = cursors
                .entry((session.to_owned(), hash.clone()))
                .or_insert(0);
            let n = *slot;
            *slot += 1;
            n
        };
        let mut path = self.dir.join(fixture_file_name(hash, wanted));
        if !path.exists() {
            match max_ordinal(&self.dir, hash)? {
                Some(last) => path = self.dir.join(fixture_file_name(hash, last)),
                None => {
                    return Err(GatewayError::NoFixture {
                        hash: hash.clone(),
                        request: pretty_request(req),
                    })
                }
            }
        }
        let record = read_record(&path)?;
        let mut raw_meta = Map::new();
        raw_meta.insert(
            "fixture".into(),
            Value::String(fixture_file_name(hash, record.ordinal)),
        );
        Ok(ChatResponse {
            text: record.response_text,
            latency_ms: 0,
            provider: ProviderKind::Mock,
            raw_meta,
        })
    }
}

/// Writes one fixture file per successful provider call.
pub struct FixtureRecorder {
    dir: PathBuf,
    next: Mutex<HashMap<String, u32>>,
}

impl FixtureRecorder {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| storage(&dir, e))?;
        Ok(Self {
            dir,
            next: Mutex::default(),
        })
    }

    pub fn record(
        &self,
        req: &ChatRequest,
        resp: &ChatResponse,
    ) -> Result<FixtureRecord, GatewayError> {
        let mut next = self.next.lock().expect("recorder lock");
        let ordinal = match next.get(&req.request_hash) {
            Some(&n) => n,
            None => max_ordinal(&self.dir, &req.request_hash)?.map_or(0, |m| m + 1),
        };
        let record = FixtureRecord {
            request_hash: req.request_hash.clone(),
            ordinal,
            request_snapshot: req.clone(),
            response_text: resp.text.clone(),
        };
        let path = self
            .dir
            .join(fixture_file_name(&record.request_hash, ordinal));
        let json = serde_json::to_string_pretty(&record).map_err(|e| storage(&path, e))?;
        fs::write(&path, json + "\n").map_err(|e| storage(&path, e))?;
        next.insert(record.request_hash.clone(), ordinal + 1);
        Ok(record)
    }
}

/// Every record of a suite, validated and ordered by (hash, ordinal).
#[derive(Debug, Clone, Default)]
pub struct FixtureSet {
    pub records: BTreeMap<(String, u32), FixtureRecord>,
}

impl FixtureSet {
    /// Missing directories load as empty sets.
    pub fn load(dir: &Path) -> Result<Self, GatewayError> {
        let mut set = Self::default();
        let entries = match fs::read_dir(dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(set),
            Err(e) => return Err(storage(dir, e)),
        };
        for entry in entries {
            let path = entry.map_err(|e| storage(dir, e))?.path();
            let Some((hash, ordinal)) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(parse_file_name)
            else {
                continue;
            };
            let record = read_record(&path)?;
            if record.request_hash != hash || record.ordinal != ordinal {
                return Err(storage(
                    &path,
                    "file name disagrees with request_hash/ordinal inside",
                ));
            }
            if record.request_snapshot.request_hash != record.request_hash {
                return Err(storage(
                    &path,
                    "request_snapshot hashes differently from request_hash",
                ));
            }
            set.records.insert((hash.to_owned(), ordinal), record);
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sheetsmith_core::{build_request, ChatMessage, RequestConfig, RoleTag};

    fn req(text: &str) -> ChatRequest {
        build_request(
            RoleTag::Learner,
            "sys",
            vec![ChatMessage::user(text)],
            &RequestConfig::default(),
        )
        .unwrap()
    }

    fn resp(text: &str) -> ChatResponse {
        ChatResponse {
            text: text.into(),
            latency_ms: 7,
            provider: ProviderKind::Live,
            raw_meta: Map::new(),
        }
    }

    #[test]
    fn file_names_round_trip() {
        assert_eq!(
            parse_file_name(&fixture_file_name("ab12", 3)),
            Some(("ab12", 3))
        );
        assert_eq!(parse_file_name("notes.txt"), None);
    }

    #[test]
    fn record_then_replay_with_sticky_last() {
        let dir = tempfile::tempdir().unwrap();
        let rec = FixtureRecorder::new(dir.path()).unwrap();
        let r = req("a");
        assert_eq!(rec.record(&r, &resp("first")).unwrap().ordinal, 0);
        assert_eq!(rec.record(&r, &resp("second")).unwrap().ordinal, 1);

        let mock = MockProvider::new(dir.path());
        let texts: Vec<_> = (0..3)
            .map(|_| mock.complete("s1", &r).unwrap().text)
            .collect();
        assert_eq!(texts, ["first", "second", "second"]);
        assert_eq!(mock.complete("s2", &r).unwrap().text, "first");

        let err = mock.complete("s1", &req("b")).unwrap_err();
        assert!(
            matches!(&err, GatewayError::NoFixture { hash, request } if *hash == req("b").request_hash && request.contains("\"role_tag\": \"learner\""))
        );
        assert_eq!(FixtureSet::load(dir.path()).unwrap().len(), 2);
    }

    #[test]
    fn recorder_continues_after_existing_ordinals() {
        let dir = tempfile::tempdir().unwrap();
        let r = req("a");
        FixtureRecorder::new(dir.path())
            .unwrap()
            .record(&r, &resp("x"))
            .unwrap();
        assert_eq!(
            FixtureRecorder::new(dir.path())
                .unwrap()
                .record(&r, &resp("y"))
                .unwrap()
                .ordinal,
            1
        );
    }

    #[test]
    fn load_rejects_mismatched_names() {
        let dir = tempfile::tempdir().unwrap();
        let r = req("a");
        FixtureRecorder::new(dir.path())
            .unwrap()
            .record(&r, &resp("x"))
            .unwrap();
        fs::rename(
            dir.path().join(fixture_file_name(&r.request_hash, 0)),
            dir.path().join(fixture_file_name(&r.request_hash, 5)),
        )
        .unwrap();
        assert!(matches!(
            FixtureSet::load(dir.path()),
            Err(GatewayError::Storage(_))
        ));
        assert!(FixtureSet::load(&dir.path().join("missing"))
            .unwrap()
            .is_empty());
    }
}
