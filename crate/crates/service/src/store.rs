//! Plain-JSON persistence under a data root.
//!
//! ```text
//! <root>/config.json
//! <root>/videos/<id>/video.json         id, title, media path
//! <root>/videos/<id>/bundle-<hash>.json write-once analysis bundles
//! <root>/videos/<id>/CURRENT            name of the live bundle file
//! <root>/videos/<id>/bookmarks.json
//! <root>/videos/<id>/screenshots.json
//! ```
//!
//! Every write goes to a temporary file in the same directory and is renamed
//! into place.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use chrono::{SecondsFormat, Utc};
use gesturelens::{AnalysisBundle, AnalysisConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

type Result<T> = std::result::Result<T, ServiceError>;

const POINTER: &str = "CURRENT";
const VIDEO_FILE: &str = "video.json";
const BOOKMARKS_FILE: &str = "bookmarks.json";
const SCREENSHOTS_FILE: &str = "screenshots.json";
const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoMeta {
    pub id: String,
    pub title: String,
    /// Video file, relative to the video directory unless absolute.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub media: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisStatus {
    Pending,
    Analyzed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoSummary {
    pub video_id: String,
    pub title: String,
    pub duration: Option<f64>,
    pub analysis_status: AnalysisStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// What a bookmark points at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum BookmarkTarget {
    GestureSegment(Vec<usize>),
    Phrase(Vec<usize>),
    TimeRange([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewBookmark {
    #[serde(flatten)]
    pub target: BookmarkTarget,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bookmark {
    pub id: String,
    pub video_id: String,
    #[serde(flatten)]
    pub target: BookmarkTarget,
    pub note: String,
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenshotRecord {
    pub id: String,
    pub video_id: String,
    pub timestamp: f64,
    /// The word under the playhead, or empty in silence.
    pub word: String,
    pub created_at: String,
}

/// Records plus the next id number, so ids are never reused.
#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
struct Ledger<T> {
    next_id: u64,
    items: Vec<T>,
}

impl<T> Default for Ledger<T> {
    fn default() -> Self {
        Ledger { next_id: 1, items: Vec::new() }
    }
}

pub struct Store {
    root: PathBuf,
    /// Serializes writes per video.
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    /// Parsed bundles keyed by video, tagged with the file they came from.
    cache: Mutex<HashMap<String, (String, Arc<AnalysisBundle>)>>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn storage(context: impl std::fmt::Display, e: impl std::fmt::Display) -> ServiceError {
    ServiceError::Storage(format!("{context}: {e}"))
}

/// Write `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !id.starts_with('.')
}

/// Install `json` as the live bundle of the video directory `dir`.
///
/// The bundle file is named after `hash` and never rewritten; the pointer
/// file is swapped atomically. Returns the bundle path.
pub fn publish_bundle(dir: &Path, hash: &str, json: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let name = format!("bundle-{hash}.json");
    let path = dir.join(&name);
    if !path.exists() {
        write_atomic(&path, json.as_bytes())?;
    }
    write_atomic(&dir.join(POINTER), name.as_bytes())?;
    Ok(path)
}

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Store {
            root: root.into(),
            locks: Mutex::new(HashMap::new()),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn videos_dir(&self) -> PathBuf {
        self.root.join("videos")
    }

    pub fn video_dir(&self, id: &str) -> Result<PathBuf> {
        if !valid_id(id) {
            return Err(ServiceError::NotFound(format!("no video {id:?}")));
        }
        let dir = self.videos_dir().join(id);
        if dir.join(VIDEO_FILE).is_file() || dir.join(POINTER).is_file() {
            Ok(dir)
        } else {
            Err(ServiceError::NotFound(format!("no video {id:?}")))
        }
    }

    fn lock(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().expect("lock table poisoned");
        locks.entry(id.to_string()).or_default().clone()
    }

    pub fn video_meta(&self, id: &str) -> Result<VideoMeta> {
        let dir = self.video_dir(id)?;
        let path = dir.join(VIDEO_FILE);
        if !path.exists() {
            return Ok(VideoMeta { id: id.to_string(), title: id.to_string(), media: None });
        }
        let bytes = std::fs::read(&path).map_err(|e| storage(path.display(), e))?;
        serde_json::from_slice(&bytes).map_err(|e| storage(path.display(), e))
    }

    /// Register or update a video's metadata.
    pub fn put_video(&self, meta: &VideoMeta) -> Result<()> {
        if !valid_id(&meta.id) {
            return Err(ServiceError::Validation(format!("invalid video id {:?}", meta.id)));
        }
        let dir = self.videos_dir().join(&meta.id);
        std::fs::create_dir_all(&dir).map_err(|e| storage(dir.display(), e))?;
        let json = serde_json::to_vec_pretty(meta).expect("meta serializes");
        write_atomic(&dir.join(VIDEO_FILE), &json).map_err(|e| storage("video.json", e))
    }

    pub fn media_path(&self, id: &str) -> Result<PathBuf> {
        let meta = self.video_meta(id)?;
        let media = meta
            .media
            .ok_or_else(|| ServiceError::NotFound(format!("video {id:?} has no media file")))?;
        let path = if media.is_absolute() { media } else { self.video_dir(id)?.join(media) };
        if path.is_file() {
            Ok(path)
        } else {
            Err(ServiceError::NotFound(format!("media file {} is missing", path.display())))
        }
    }

    pub fn list_videos(&self) -> Result<Vec<VideoSummary>> {
        let dir = self.videos_dir();
        if !self.root.is_dir() {
            return Err(storage(self.root.display(), "data root is not a readable directory"));
        }
        let entries = match std::fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(storage(dir.display(), e)),
        };
        let mut ids: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_dir())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|id| valid_id(id))
            .collect();
        ids.sort();
        let mut out = Vec::new();
        for id in ids {
            let Ok(meta) = self.video_meta(&id) else {
                continue;
            };
            let (status, duration, diagnostic) = match self.bundle(&id) {
                Ok(b) => (AnalysisStatus::Analyzed, Some(b.duration), None),
                Err(ServiceError::Conflict(_)) => (AnalysisStatus::Pending, None, None),
                Err(ServiceError::NotFound(_)) => continue,
                Err(e) => (AnalysisStatus::Failed, None, Some(e.to_string())),
            };
            out.push(VideoSummary {
                video_id: id,
                title: meta.title,
                duration,
                analysis_status: status,
                diagnostic,
            });
        }
        Ok(out)
    }

    /// The live bundle of a video. Pending videos give `Conflict`; unreadable
    /// or invalid bundles give `Storage`.
    pub fn bundle(&self, id: &str) -> Result<Arc<AnalysisBundle>> {
        let dir = self.video_dir(id)?;
        let pointer = match std::fs::read_to_string(dir.join(POINTER)) {
            Ok(p) => p.trim().to_string(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ServiceError::Conflict(format!("video {id:?} has not been analyzed yet")))
            }
            Err(e) => return Err(storage("bundle pointer", e)),
        };
        if let Some((name, b)) = self.cache.lock().expect("cache poisoned").get(id) {
            if *name == pointer {
                return Ok(b.clone());
            }
        }
        if !valid_id(&pointer) {
            return Err(storage("bundle pointer", format!("invalid file name {pointer:?}")));
        }
        let path = dir.join(&pointer);
        let bytes = std::fs::read(&path).map_err(|e| storage(path.display(), e))?;
        let bundle = Arc::new(
            AnalysisBundle::from_json(&bytes).map_err(|e| storage(format!("bundle of {id}"), e))?,
        );
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(id.to_string(), (pointer, bundle.clone()));
        Ok(bundle)
    }

    pub fn config(&self) -> Result<AnalysisConfig> {
        let path = self.root.join(CONFIG_FILE);
        match std::fs::read(&path) {
            Ok(bytes) => AnalysisConfig::from_json(&bytes).map_err(|e| storage(path.display(), e)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(AnalysisConfig::default()),
            Err(e) => Err(storage(path.display(), e)),
        }
    }

    pub fn put_config(&self, config: &AnalysisConfig) -> Result<()> {
        config
            .validate()
            .map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        let lock = self.lock("");
        let _guard = lock.lock().expect("config lock poisoned");
        std::fs::create_dir_all(&self.root).map_err(|e| storage(self.root.display(), e))?;
        write_atomic(&self.root.join(CONFIG_FILE), config.to_json().as_bytes())
            .map_err(|e| storage(CONFIG_FILE, e))
    }

    fn read_ledger<T: Serialize + DeserializeOwned>(&self, dir: &Path, file: &str) -> Result<Ledger<T>> {
        let path = dir.join(file);
        match std::fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map_err(|e| storage(path.display(), e)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Ledger::default()),
            Err(e) => Err(storage(path.display(), e)),
        }
    }

    fn write_ledger<T: Serialize + DeserializeOwned>(&self, dir: &Path, file: &str, ledger: &Ledger<T>) -> Result<()> {
        let json = serde_json::to_vec_pretty(ledger).expect("ledger serializes");
        write_atomic(&dir.join(file), &json).map_err(|e| storage(file, e))
    }

    pub fn bookmarks(&self, id: &str) -> Result<Vec<Bookmark>> {
        let dir = self.video_dir(id)?;
        Ok(self.read_ledger(&dir, BOOKMARKS_FILE)?.items)
    }

    pub fn create_bookmark(&self, id: &str, new: NewBookmark) -> Result<Bookmark> {
        let dir = self.video_dir(id)?;
        let bundle = self.bundle(id)?;
        validate_target(&bundle, &new.target)?;
        let lock = self.lock(id);
        let _guard = lock.lock().expect("video lock poisoned");
        let mut ledger: Ledger<Bookmark> = self.read_ledger(&dir, BOOKMARKS_FILE)?;
        let bookmark = Bookmark {
            id: format!("bm-{}", ledger.next_id),
            video_id: id.to_string(),
            target: new.target,
            note: new.note,
            created_at: now(),
        };
        ledger.next_id += 1;
        ledger.items.push(bookmark.clone());
        self.write_ledger(&dir, BOOKMARKS_FILE, &ledger)?;
        Ok(bookmark)
    }

    /// Remove a bookmark. Deleting an unknown id succeeds; returns whether
    /// anything was removed.
    pub fn delete_bookmark(&self, id: &str, bookmark_id: &str) -> Result<bool> {
        let dir = self.video_dir(id)?;
        let lock = self.lock(id);
        let _guard = lock.lock().expect("video lock poisoned");
        let mut ledger: Ledger<Bookmark> = self.read_ledger(&dir, BOOKMARKS_FILE)?;
        let before = ledger.items.len();
        ledger.items.retain(|b| b.id != bookmark_id);
        if ledger.items.len() == before {
            return Ok(false);
        }
        self.write_ledger(&dir, BOOKMARKS_FILE, &ledger)?;
        Ok(true)
    }

    pub fn screenshots(&self, id: &str) -> Result<Vec<ScreenshotRecord>> {
        let dir = self.video_dir(id)?;
        Ok(self.read_ledger(&dir, SCREENSHOTS_FILE)?.items)
    }

    pub fn record_screenshot(&self, id: &str, timestamp: f64) -> Result<ScreenshotRecord> {
        let dir = self.video_dir(id)?;
        let bundle = self.bundle(id)?;
        if !(timestamp.is_finite() && (0.0..=bundle.duration).contains(&timestamp)) {
            return Err(ServiceError::Validation(format!(
                "timestamp {timestamp} is outside the video (0 to {})",
                bundle.duration
            )));
        }
        let word = bundle.word_at(timestamp).map(|w| w.text.clone()).unwrap_or_default();
        let lock = self.lock(id);
        let _guard = lock.lock().expect("video lock poisoned");
        let mut ledger: Ledger<ScreenshotRecord> = self.read_ledger(&dir, SCREENSHOTS_FILE)?;
        let record = ScreenshotRecord {
            id: format!("ss-{}", ledger.next_id),
            video_id: id.to_string(),
            timestamp,
            word,
            created_at: now(),
        };
        ledger.next_id += 1;
        ledger.items.push(record.clone());
        self.write_ledger(&dir, SCREENSHOTS_FILE, &ledger)?;
        Ok(record)
    }
}

fn validate_target(bundle: &AnalysisBundle, target: &BookmarkTarget) -> Result<()> {
    match target {
        BookmarkTarget::GestureSegment(ids) | BookmarkTarget::Phrase(ids) if ids.is_empty() => {
            Err(ServiceError::Validation("bookmark references nothing".into()))
        }
        BookmarkTarget::GestureSegment(ids) => match ids.iter().find(|&&s| bundle.segment(s).is_none()) {
            Some(s) => Err(ServiceError::Validation(format!("no gesture segment {s}"))),
            None => Ok(()),
        },
        BookmarkTarget::Phrase(ids) => match ids.iter().find(|&&p| bundle.phrase(p).is_none()) {
            Some(p) => Err(ServiceError::Validation(format!("no phrase {p}"))),
            None => Ok(()),
        },
        BookmarkTarget::TimeRange([start, end]) => {
            if start.is_finite() && end.is_finite() && 0.0 <= *start && start < end && *end <= bundle.duration {
                Ok(())
            } else {
                Err(ServiceError::Validation(format!(
                    "time range [{start}, {end}] is not inside the video (0 to {})",
                    bundle.duration
                )))
            }
        }
    }
}
